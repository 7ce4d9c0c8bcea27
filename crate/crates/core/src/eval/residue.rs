use alloc::format;

use super::{check_argument, EvalOptions, EvalReport, Method};
use crate::error::{Error, Result};
use crate::gamma::{self, POLE_TOL};
use crate::math::{self, CompensatedSum, LN_PI};
use crate::spec::{FoxHSpec, POLE_HORIZON};

/// Sum of residues at the left poles of `H[c x]`.
pub fn eval_residue_series(spec: &FoxHSpec, x: f64, tol: f64) -> Result<f64> {
    residue_series(spec, x, &EvalOptions::with_tol(tol)).map(|r| r.value)
}

/// As [`eval_residue_series`], with diagnostics.
pub fn residue_series(spec: &FoxHSpec, x: f64, opts: &EvalOptions) -> Result<EvalReport> {
    check_argument(x)?;
    let d = spec.derive_params();
    if !(d.scale_balance > 0.0 && d.sector_width > 0.0) {
        return Err(Error::SeriesDomain(format!(
            "needs scale balance > 0 and sector width > 0 (got {}, {})",
            d.scale_balance, d.sector_width
        )));
    }
    spec.validate_separation()?;
    let poles = spec.poles(POLE_HORIZON, 0);
    if !poles.simple {
        let mut v: alloc::vec::Vec<f64> = poles.left.iter().map(|p| p.value).collect();
        v.sort_by(f64::total_cmp);
        let at = v
            .windows(2)
            .find(|w| crate::spec::poles_coincide(w[0], w[1]))
            .map_or(f64::NAN, |w| w[0]);
        return Err(Error::MultiplePoles(at));
    }
    residue_sum(spec, spec.c * x, opts)
}

/// `ln|term|` and its sign, plus an upper envelope for `ln|term|` that
/// ignores the zeros of reciprocal gamma factors.
struct Term {
    log_mag: f64,
    log_envelope: f64,
    sign: f64,
    zero: bool,
    /// This and every later term of the same pole family vanish.
    tail_zero: bool,
}

fn numerator(y: f64, at: f64, collision: bool) -> Result<(f64, f64)> {
    match gamma::ln_gamma_real(y) {
        Ok(v) => Ok(v),
        Err(Error::GammaPole(_)) if collision => Err(Error::PoleCollision {
            upper: usize::MAX,
            lower: usize::MAX,
            k: 0,
            l: 0,
            location: at,
        }),
        Err(Error::GammaPole(_)) => Err(Error::MultiplePoles(at)),
        Err(e) => Err(e),
    }
}

/// Adds `-ln|Gamma(y)|` to the term; returns false when `1/Gamma(y) = 0`.
fn reciprocal(y: f64, t: &mut Term) -> Result<()> {
    if y >= 0.5 {
        let (lg, _) = gamma::ln_gamma_real(y)?;
        t.log_mag -= lg;
        t.log_envelope -= lg;
        return Ok(());
    }
    let (lg1, _) = gamma::ln_gamma_real(1.0 - y)?;
    // 1/Gamma(y) = sin(pi y) Gamma(1-y) / pi
    t.log_envelope += lg1 - LN_PI;
    if math::near_nonpositive_integer(y, POLE_TOL) {
        t.zero = true;
        return Ok(());
    }
    let s = math::sin_pi(y);
    t.log_mag += math::ln(s.abs()) + lg1 - LN_PI;
    if s < 0.0 {
        t.sign = -t.sign;
    }
    Ok(())
}

fn term(spec: &FoxHSpec, j: usize, l: usize, ln_z: f64) -> Result<Term> {
    let pj = spec.lower[j];
    let s = -(pj.shift + l as f64) / pj.scale;
    let (lf, _) = gamma::ln_gamma_real(l as f64 + 1.0)?;
    let base = -lf - math::ln(pj.scale) - s * ln_z;
    let mut t = Term {
        log_mag: base,
        log_envelope: base,
        sign: if l % 2 == 0 { 1.0 } else { -1.0 },
        zero: false,
        tail_zero: false,
    };
    for (k, p) in spec.lower.iter().enumerate() {
        let y = p.shift + p.scale * s;
        if k < spec.m {
            if k == j {
                continue;
            }
            let (lg, sg) = numerator(y, s, false)?;
            t.log_mag += lg;
            t.log_envelope += lg;
            t.sign *= sg;
        } else {
            reciprocal(1.0 - y, &mut t)?;
        }
    }
    for (i, p) in spec.upper.iter().enumerate() {
        let y = p.shift + p.scale * s;
        if i < spec.n {
            let (lg, sg) = numerator(1.0 - y, s, true)?;
            t.log_mag += lg;
            t.log_envelope += lg;
            t.sign *= sg;
        } else {
            reciprocal(y, &mut t)?;
            // y falls by a whole number per term, so it stays on the zeros
            let step = p.scale / pj.scale;
            if math::near_nonpositive_integer(y, POLE_TOL)
                && math::near_nonpositive_integer(-step, POLE_TOL)
                && step > 0.5
            {
                t.tail_zero = true;
            }
        }
    }
    Ok(t)
}

/// Residue sum at argument `z = c x` without the domain gate; callers
/// decide whether the series applies.
pub(crate) fn residue_sum(spec: &FoxHSpec, z: f64, opts: &EvalOptions) -> Result<EvalReport> {
    let ln_z = math::ln(z);
    let mut total = CompensatedSum::new();
    let mut terms = 0usize;
    let mut max_term = 0.0f64;
    let mut tail_bound = 0.0;
    for j in 0..spec.m {
        let mut sum = CompensatedSum::new();
        let mut prev_env: Option<f64> = None;
        let mut small_run = 0usize;
        let mut done = false;
        for l in 0..opts.max_terms {
            let t = term(spec, j, l, ln_z)?;
            terms += 1;
            if t.log_envelope > 700.0 {
                return Err(Error::NoConvergence {
                    terms,
                    last_term: f64::INFINITY,
                });
            }
            let value = if t.zero {
                0.0
            } else {
                t.sign * math::exp(t.log_mag)
            };
            sum.add(value);
            max_term = max_term.max(value.abs());
            if t.tail_zero {
                done = true;
                break;
            }
            let env = math::exp(t.log_envelope);
            let target = (opts.tol * sum.value().abs().max(total.value().abs()))
                .max(opts.abs_tol)
                .max(1e-300);
            if env <= target {
                small_run += 1;
            } else {
                small_run = 0;
            }
            if small_run >= 3 {
                if let Some(pe) = prev_env {
                    let ratio = if pe > 0.0 { env / pe } else { 0.0 };
                    if ratio < 1.0 {
                        let tail = env * ratio / (1.0 - ratio);
                        if tail <= target {
                            tail_bound += tail;
                            done = true;
                        }
                    }
                }
            }
            if done {
                break;
            }
            prev_env = Some(env);
        }
        if !done {
            return Err(Error::NoConvergence {
                terms,
                last_term: prev_env.unwrap_or(f64::NAN),
            });
        }
        total.add(sum.value());
    }
    Ok(EvalReport {
        value: total.value(),
        method: Method::ResidueSeries,
        terms,
        tail_bound,
        max_term,
        imag_residual: 0.0,
        contour: None,
    })
}
