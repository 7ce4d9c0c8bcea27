use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::asymptotics::circle_estimate;
use super::{check_argument, EvalOptions, EvalReport, Method};
use crate::error::{Error, Result};
use crate::gamma;
use crate::math::{self, CompensatedSum, LN_PI, PI};
use crate::spec::FoxHSpec;

/// A vertical contour `s = abscissa + i t`, `|t| <= half_length`, sampled
/// with spacing `step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contour {
    pub abscissa: f64,
    pub half_length: f64,
    pub step: f64,
}

fn require_decay(spec: &FoxHSpec) -> Result<f64> {
    let d = spec.derive_params();
    if d.sector_width > 0.0 {
        Ok(d.sector_width)
    } else {
        Err(Error::Domain(format!(
            "contour integral needs sector width > 0, got {}",
            d.sector_width
        )))
    }
}

fn check_abscissa(spec: &FoxHSpec, gamma: f64) -> Result<()> {
    let lo = spec.max_left_pole().unwrap_or(f64::NEG_INFINITY);
    let hi = spec.min_right_pole().unwrap_or(f64::INFINITY);
    if gamma.is_finite() && gamma > lo && gamma < hi {
        Ok(())
    } else {
        Err(Error::BadContour(gamma))
    }
}

fn integrand(spec: &FoxHSpec, gamma: f64, t: f64, ln_z: f64) -> Result<Complex64> {
    let s = Complex64::new(gamma, t);
    let w = spec.ln_kernel(s)? - s * ln_z;
    if w.re == f64::NEG_INFINITY {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(w.exp())
}

/// `(1/2pi) int |f|` over `|t| > T` estimated from the large-`|s|` envelope.
fn envelope_tail(spec: &FoxHSpec, z: f64, gamma: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return f64::INFINITY;
    }
    match circle_estimate(spec, Complex64::new(z, 0.0), gamma, 0.5 * PI, t) {
        Ok(ce) => {
            let rate = ce.linear_rate - ce.log_power / t;
            if rate <= 0.0 {
                f64::INFINITY
            } else {
                // both half-lines, divided by 2 pi
                math::exp(ce.log_bound) / rate / PI
            }
        }
        Err(_) => f64::INFINITY,
    }
}

/// Trapezoidal Mellin-Barnes quadrature on a caller-fixed contour with
/// `nodes` equally spaced points on `[-half_length, half_length]`.
pub fn eval_mellin_barnes(
    spec: &FoxHSpec,
    x: f64,
    abscissa: f64,
    half_length: f64,
    nodes: usize,
    tol: f64,
) -> Result<EvalReport> {
    check_argument(x)?;
    let width = require_decay(spec)?;
    check_abscissa(spec, abscissa)?;
    if nodes < 3 || !(half_length > 0.0) {
        return Err(Error::Domain(format!(
            "need at least 3 nodes and a positive half length (got {nodes}, {half_length})"
        )));
    }
    let z = spec.c * x;
    let ln_z = math::ln(z);
    let h = 2.0 * half_length / (nodes - 1) as f64;
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    let mut max_term = 0.0f64;
    let mut edge = 0.0f64;
    for k in 0..nodes {
        let t = -half_length + k as f64 * h;
        let f = integrand(spec, abscissa, t, ln_z)?;
        let w = if k == 0 || k == nodes - 1 { 0.5 } else { 1.0 };
        re.add(w * f.re);
        im.add(w * f.im);
        max_term = max_term.max(f.norm() * h / (2.0 * PI));
        if k == 0 || k == nodes - 1 {
            edge = edge.max(f.norm());
        }
    }
    let value = re.value() * h / (2.0 * PI);
    let imag = im.value() * h / (2.0 * PI);
    let direct = edge / (width * 0.5 * PI) / PI;
    let tail = envelope_tail(spec, z, abscissa, half_length).min(f64::MAX).max(direct);
    let limit = tol * value.abs().max(1e-300);
    if tail > limit {
        return Err(Error::Truncation { bound: tail, tol: limit });
    }
    Ok(EvalReport {
        value,
        method: Method::MellinBarnes,
        terms: nodes,
        tail_bound: tail,
        max_term,
        imag_residual: imag,
        contour: Some(Contour {
            abscissa,
            half_length,
            step: h,
        }),
    })
}

/// `ln|Gamma(y)|`, `+inf` at poles.
fn ln_abs_gamma(y: f64) -> f64 {
    gamma::ln_gamma_real(y).map_or(f64::INFINITY, |v| v.0)
}

/// Smooth stand-in for `ln|Gamma(y)|` in denominators: the `|sin(pi y)|`
/// factor of the reflection formula is replaced by one.
fn ln_gamma_envelope(y: f64) -> f64 {
    if y >= 0.5 {
        ln_abs_gamma(y)
    } else {
        LN_PI - ln_abs_gamma(1.0 - y)
    }
}

/// Log-magnitude of the integrand on the real axis, with denominators
/// smoothed so the profile has no spurious dips.
fn real_profile(spec: &FoxHSpec, gamma: f64, ln_z: f64) -> f64 {
    let mut acc = -gamma * ln_z;
    for (j, p) in spec.lower.iter().enumerate() {
        let y = p.shift + p.scale * gamma;
        if j < spec.m {
            acc += ln_abs_gamma(y);
        } else {
            acc -= ln_gamma_envelope(1.0 - y);
        }
    }
    for (i, p) in spec.upper.iter().enumerate() {
        let y = p.shift + p.scale * gamma;
        if i < spec.n {
            acc += ln_abs_gamma(1.0 - y);
        } else {
            acc -= ln_gamma_envelope(y);
        }
    }
    acc
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (math::sqrt(5.0) - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if (b - a).abs() <= 1e-7 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Abscissa minimizing the integrand magnitude on the real axis between
/// the two pole families. Near that point the integrand is no larger than
/// the result, which keeps the quadrature free of cancellation.
pub fn default_abscissa(spec: &FoxHSpec, x: f64) -> Result<f64> {
    check_argument(x)?;
    let ln_z = math::ln(spec.c * x);
    let lo = spec.max_left_pole();
    let hi = spec.min_right_pole();
    let (a, b) = match (lo, hi) {
        (Some(lo), Some(hi)) => {
            if hi <= lo {
                return Err(Error::BadContour(0.5 * (lo + hi)));
            }
            let w = hi - lo;
            (lo + 1e-3 * w, hi - 1e-3 * w)
        }
        (Some(lo), None) => (lo + 1e-3, lo + reach(|g| real_profile(spec, lo + g, ln_z))),
        (None, Some(hi)) => (hi - reach(|g| real_profile(spec, hi - g, ln_z)), hi - 1e-3),
        (None, None) => {
            let r = reach(|g| real_profile(spec, g, ln_z).min(real_profile(spec, -g, ln_z)));
            (-r, r)
        }
    };
    let f = |g: f64| real_profile(spec, g, ln_z);
    // coarse scan, denser near both ends, then golden refinement
    const N: usize = 96;
    let pts: Vec<f64> = (0..=N)
        .map(|k| {
            let u = k as f64 / N as f64;
            let v = 0.5 - 0.5 * math::cos(PI * u);
            a + (b - a) * v
        })
        .collect();
    let vals: Vec<f64> = pts.iter().map(|&g| f(g)).collect();
    let best = vals
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .min_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::BadContour(0.5 * (a + b)))?;
    let left = pts[best.saturating_sub(1)];
    let right = pts[(best + 1).min(N)];
    let mut g = golden_min(f, left, right);
    // keep a margin from the poles
    if let Some(lo) = lo {
        let margin = 0.05 * hi.map_or(1.0, |h| (h - lo).min(1.0));
        g = g.max(lo + margin);
    }
    if let Some(hi) = hi {
        let margin = 0.05 * lo.map_or(1.0, |l| (hi - l).min(1.0));
        g = g.min(hi - margin);
    }
    Ok(g)
}

/// Distance from the starting point after which `f` starts increasing.
fn reach<F: Fn(f64) -> f64>(f: F) -> f64 {
    let mut g = 1.0;
    let mut prev = f(0.5);
    while g < 1e6 {
        let v = f(g);
        if v > prev && v.is_finite() {
            return 2.0 * g;
        }
        prev = v;
        g *= 2.0;
    }
    g
}

/// Mellin-Barnes quadrature with an automatically chosen contour.
///
/// The step follows from the width of the pole-free strip around the
/// contour and the growth of the integrand across it; the half length
/// grows until both the asymptotic envelope and the observed integrand
/// put the neglected tail below `opts.tol` relative to the sum.
pub fn mellin_barnes(spec: &FoxHSpec, x: f64, opts: &EvalOptions) -> Result<EvalReport> {
    check_argument(x)?;
    let width = require_decay(spec)?;
    let gamma = default_abscissa(spec, x)?;
    let z = spec.c * x;
    let ln_z = math::ln(z);
    let lo = spec.max_left_pole().map_or(f64::INFINITY, |l| gamma - l);
    let hi = spec.min_right_pole().map_or(f64::INFINITY, |h| h - gamma);
    let strip = 0.8 * lo.min(hi).min(5.0);
    let centre = real_profile(spec, gamma, ln_z);
    if centre < -745.0 {
        // the integrand underflows at the saddle: the value is below the
        // smallest subnormal
        return Ok(EvalReport {
            value: 0.0,
            method: Method::MellinBarnes,
            terms: 0,
            tail_bound: 0.0,
            max_term: 0.0,
            imag_residual: 0.0,
            contour: None,
        });
    }
    let growth = (real_profile(spec, gamma - strip, ln_z) - centre)
        .max(real_profile(spec, gamma + strip, ln_z) - centre)
        .max(0.0);
    let growth = if growth.is_finite() { growth } else { 50.0 };
    let h = 2.0 * PI * strip / (38.0 + growth);
    let decay_rate = width * 0.5 * PI;

    let f0 = integrand(spec, gamma, 0.0, ln_z)?;
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    re.add(f0.re);
    im.add(f0.im);
    let mut max_term = f0.norm();
    let window = (math::ceil(1.0 / h) as usize).max(1);
    let mut recent: Vec<f64> = alloc::vec![f64::INFINITY; window];
    let mut nodes = 1usize;
    let mut k = 1usize;
    loop {
        let t = k as f64 * h;
        let fp = integrand(spec, gamma, t, ln_z)?;
        let fm = integrand(spec, gamma, -t, ln_z)?;
        re.add(fp.re);
        re.add(fm.re);
        im.add(fp.im);
        im.add(fm.im);
        nodes += 2;
        let mag = fp.norm().max(fm.norm());
        max_term = max_term.max(mag);
        recent[k % window] = mag;
        if t >= 1.0 && k % 4 == 0 {
            let value = re.value() * h / (2.0 * PI);
            let target = (0.25 * opts.tol * value.abs()).max(opts.abs_tol).max(1e-300);
            let observed = recent.iter().cloned().fold(0.0, f64::max) / decay_rate / PI;
            if observed <= target {
                let env = envelope_tail(spec, z, gamma, t);
                if env <= target || env.is_nan() {
                    return Ok(EvalReport {
                        value,
                        method: Method::MellinBarnes,
                        terms: nodes,
                        tail_bound: observed.max(if env.is_finite() { env } else { 0.0 }),
                        max_term: max_term * h / (2.0 * PI),
                        imag_residual: im.value() * h / (2.0 * PI),
                        contour: Some(Contour {
                            abscissa: gamma,
                            half_length: t,
                            step: h,
                        }),
                    });
                }
            }
        }
        if nodes >= opts.max_nodes {
            let value = re.value() * h / (2.0 * PI);
            return Err(Error::Truncation {
                bound: recent.iter().cloned().fold(0.0, f64::max) / decay_rate / PI,
                tol: opts.tol * value.abs(),
            });
        }
        k += 1;
    }
}
