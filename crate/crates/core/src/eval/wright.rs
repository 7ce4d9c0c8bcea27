use alloc::format;

use super::{EvalOptions, EvalReport, Method};
use crate::error::{Error, Result};
use crate::gamma::{self, POLE_TOL};
use crate::math::{self, CompensatedSum};
use crate::spec::ParamPair;

/// Convergence data for a Wright series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrightStats {
    /// `sum lower scales - sum upper scales`; the series is entire when > -1.
    pub scale_balance: f64,
    /// `prod A_i^{A_i} / prod B_j^{B_j}`, the constant in the term ratio.
    pub ratio_constant: f64,
}

impl WrightStats {
    pub fn of(upper: &[ParamPair], lower: &[ParamPair]) -> Self {
        let su: f64 = upper.iter().map(|p| p.scale).sum();
        let sl: f64 = lower.iter().map(|p| p.scale).sum();
        let lr: f64 = upper
            .iter()
            .map(|p| p.scale * math::ln(p.scale))
            .sum::<f64>()
            - lower
                .iter()
                .map(|p| p.scale * math::ln(p.scale))
                .sum::<f64>();
        Self {
            scale_balance: sl - su,
            ratio_constant: math::exp(lr),
        }
    }

    /// Large-`k` estimate of `|t_{k+1} / t_k|`.
    pub fn ratio_estimate(&self, z: f64, k: usize) -> f64 {
        z.abs() * self.ratio_constant * math::pow((k + 1) as f64, -(1.0 + self.scale_balance))
    }
}

/// `sum_k prod Gamma(A_i + a_i k) / prod Gamma(B_j + b_j k) * z^k / k!`.
pub fn eval_wright_series(
    upper: &[ParamPair],
    lower: &[ParamPair],
    z: f64,
    tol: f64,
) -> Result<f64> {
    wright_series(upper, lower, z, &EvalOptions::with_tol(tol)).map(|r| r.value)
}

/// As [`eval_wright_series`], with diagnostics.
pub fn wright_series(
    upper: &[ParamPair],
    lower: &[ParamPair],
    z: f64,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("z={z}")));
    }
    let stats = WrightStats::of(upper, lower);
    if z != 0.0 && stats.scale_balance <= -1.0 {
        return Err(Error::Divergent(format!(
            "scale balance {} <= -1",
            stats.scale_balance
        )));
    }
    let ln_z = if z != 0.0 { math::ln(z.abs()) } else { 0.0 };
    let mut sum = CompensatedSum::new();
    let mut max_term = 0.0f64;
    let mut small_run = 0usize;
    let mut prev = 0.0f64;
    for k in 0..opts.max_terms {
        let kf = k as f64;
        let mut log_mag = if k == 0 { 0.0 } else { kf * ln_z };
        log_mag -= gamma::ln_gamma_real(kf + 1.0)?.0;
        let mut sign = if z < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        let mut zero = false;
        for p in upper {
            let (lg, sg) = gamma::ln_gamma_real(p.shift + p.scale * kf)?;
            log_mag += lg;
            sign *= sg;
        }
        for p in lower {
            let y = p.shift + p.scale * kf;
            if math::near_nonpositive_integer(y, POLE_TOL) {
                zero = true;
                break;
            }
            let (lg, sg) = gamma::ln_gamma_real(y)?;
            log_mag -= lg;
            sign *= sg;
        }
        let t = if zero { 0.0 } else { sign * math::exp(log_mag) };
        if !t.is_finite() {
            return Err(Error::NoConvergence {
                terms: k + 1,
                last_term: t,
            });
        }
        sum.add(t);
        max_term = max_term.max(t.abs());
        if z == 0.0 {
            return Ok(report(sum.value(), 1, 0.0, max_term));
        }
        let target = opts.tol * sum.value().abs().max(1e-300);
        if t.abs() <= target {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 3 {
            let observed = if prev > 0.0 { t.abs() / prev } else { 0.0 };
            let r = observed.max(stats.ratio_estimate(z, k));
            let anchor = t.abs().max(prev);
            if r < 1.0 && anchor * r / (1.0 - r) <= target {
                return Ok(report(sum.value(), k + 1, anchor * r / (1.0 - r), max_term));
            }
        }
        if t != 0.0 {
            prev = t.abs();
        }
    }
    Err(Error::NoConvergence {
        terms: opts.max_terms,
        last_term: prev,
    })
}

fn report(value: f64, terms: usize, tail_bound: f64, max_term: f64) -> EvalReport {
    EvalReport {
        value,
        method: Method::WrightSeries,
        terms,
        tail_bound,
        max_term,
        imag_residual: 0.0,
        contour: None,
    }
}
