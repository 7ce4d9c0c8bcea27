//! Numerical evaluation of Fox-H functions.
//!
//! The residue series is the primary path. Vertical-contour quadrature backs
//! it up where the series is unavailable or loses precision to cancellation.

mod asymptotics;
mod clusters;
mod contour;
mod residue;
mod wright;

pub use asymptotics::{circle_estimate, tail_behavior, CircleEstimate, TailBehavior};
pub use contour::{default_abscissa, eval_mellin_barnes, mellin_barnes, Contour};
pub use residue::{eval_residue_series, residue_series};
pub use wright::{eval_wright_series, wright_series, WrightStats};

use alloc::format;

use crate::error::{Error, Result};
use crate::spec::{FoxHSpec, POLE_HORIZON};

/// Default iteration cap for series.
pub const MAX_TERMS: usize = 10_000;
/// Default node cap for contour quadrature.
pub const MAX_NODES: usize = 2_000_000;

/// Tolerances and caps shared by all evaluation paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// Relative tolerance for truncating series and quadrature tails.
    pub tol: f64,
    /// Absolute error the caller can absorb; zero asks for relative accuracy only.
    pub abs_tol: f64,
    pub max_terms: usize,
    pub max_nodes: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            abs_tol: 0.0,
            max_terms: MAX_TERMS,
            max_nodes: MAX_NODES,
        }
    }
}

impl EvalOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ResidueSeries,
    /// Residue series of the reflected spec at `1/x`.
    ReflectedSeries,
    MellinBarnes,
    WrightSeries,
    /// Closed form with no numerical work, e.g. outside a bounded support.
    Exact,
}

/// A value plus the diagnostics of the path that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub value: f64,
    pub method: Method,
    /// Series terms or quadrature nodes used.
    pub terms: usize,
    /// Estimated size of the neglected tail.
    pub tail_bound: f64,
    /// Largest term magnitude; compared with `value` it measures cancellation.
    pub max_term: f64,
    /// Imaginary part of the quadrature sum (zero for series).
    pub imag_residual: f64,
    pub contour: Option<Contour>,
}

impl EvalReport {
    pub(crate) fn exact(value: f64) -> Self {
        Self {
            value,
            method: Method::Exact,
            terms: 0,
            tail_bound: 0.0,
            max_term: value.abs(),
            imag_residual: 0.0,
            contour: None,
        }
    }

    /// Roundoff estimate from cancellation among terms.
    pub fn cancellation_error(&self) -> f64 {
        self.max_term * 8.0 * f64::EPSILON * crate::math::sqrt(self.terms.max(1) as f64)
    }
}

pub(crate) fn check_argument(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("x={x} must be positive and finite")))
    }
}

/// Relative accuracy under which a series result is accepted without a
/// quadrature cross-over.
const SERIES_ACCEPT: f64 = 1e-10;

fn precise(rep: &EvalReport, opts: &EvalOptions) -> bool {
    let err = rep.cancellation_error();
    err <= SERIES_ACCEPT * rep.value.abs() || err <= opts.abs_tol || rep.max_term == 0.0
}

/// Evaluates `H[c x]` choosing the method from the structure of `spec`:
/// left residue series when the scale balance is positive, the reflected
/// series when it is negative, the series on the matching side of the
/// convergence radius when it is zero, and contour quadrature whenever a
/// series is unavailable or cancels too badly.
pub fn evaluate(spec: &FoxHSpec, x: f64, opts: &EvalOptions) -> Result<EvalReport> {
    check_argument(x)?;
    if spec.is_empty() {
        return Err(Error::Domain(
            "the empty spec is a point mass, not a function".into(),
        ));
    }
    let d = spec.derive_params();
    let z = spec.c * x;
    let balance_zero = d.scale_balance.abs() <= 1e-14 * (spec.p() + spec.q()) as f64;
    let separated = spec.validate_separation();
    let mut series_err = None;
    if separated.is_ok() {
        let attempt = if balance_zero {
            let radius = d.scale_product;
            // on the radius itself the series converges only when its
            // coefficients decay; the term cap catches the cases where not
            if z <= radius {
                series_if_simple(spec, z, opts, Method::ResidueSeries)
            } else {
                let r = spec.inverted();
                if r.m == 0 {
                    Some(Ok(EvalReport::exact(0.0)))
                } else {
                    series_if_simple(&r, 1.0 / z, opts, Method::ReflectedSeries)
                }
            }
        } else if d.scale_balance > 0.0 {
            series_if_simple(spec, z, opts, Method::ResidueSeries)
        } else {
            let r = spec.inverted();
            series_if_simple(&r, 1.0 / z, opts, Method::ReflectedSeries)
        };
        match attempt {
            Some(Ok(rep)) if precise(&rep, opts) => return Ok(rep),
            Some(Ok(rep)) if d.sector_width <= 0.0 => return Ok(rep),
            Some(Ok(_)) => {}
            Some(Err(e)) => series_err = Some(e),
            None => {}
        }
    } else if let Err(e) = separated {
        series_err = Some(e);
    }
    if d.sector_width > 0.0 {
        return mellin_barnes(spec, x, opts);
    }
    Err(series_err.unwrap_or_else(|| {
        Error::SeriesDomain(format!(
            "no convergent representation at x={x} (sector width {}, scale balance {})",
            d.sector_width, d.scale_balance
        ))
    }))
}

fn series_if_simple(
    spec: &FoxHSpec,
    z: f64,
    opts: &EvalOptions,
    method: Method,
) -> Option<Result<EvalReport>> {
    let result = if spec.poles(POLE_HORIZON, 0).simple {
        residue::residue_sum(spec, z, opts)
    } else if spec.derive_params().sector_width <= 0.0 {
        // No contour fallback exists, so sum the multiple poles directly.
        clusters::cluster_residue_sum(spec, z, opts)
    } else {
        return None;
    };
    Some(result.map(|mut r| {
        r.method = method;
        r
    }))
}
