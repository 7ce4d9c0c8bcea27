//! Residue series over clusters of left poles.
//!
//! Coincident or nearly coincident poles are grouped and each group's residue
//! is taken as a contour integral around a small circle (trapezoidal rule,
//! which converges geometrically for analytic periodic integrands). This
//! covers multiple poles where contour quadrature along a vertical line is
//! unavailable because the sector width vanishes.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::{EvalOptions, EvalReport, Method};
use crate::error::{Error, Result};
use crate::math::{self, CompensatedSum, PI};
use crate::spec::FoxHSpec;

/// Nodes on each residue circle.
const NODES: usize = 64;
/// Poles closer than this are summed under one circle.
const CLUSTER_GAP: f64 = 0.05;

fn left_poles(spec: &FoxHSpec, horizon: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for p in &spec.lower[..spec.m] {
        let last = math::floor(horizon * p.scale - p.shift).max(0.0) as usize;
        for l in 0..=last {
            out.push(-(p.shift + l as f64) / p.scale);
        }
    }
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// Groups sorted (descending) poles into `(hi, lo)` extents.
fn clusters(poles: &[f64]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for &v in poles {
        match out.last_mut() {
            Some(c) if c.1 - v < CLUSTER_GAP => c.1 = v,
            _ => out.push((v, v)),
        }
    }
    out
}

/// `(residue, envelope)` of `K(s) z^{-s}` inside the circle around
/// `center` with radius `r`; the envelope is `r * max |K z^{-s}|`.
fn circle_residue(spec: &FoxHSpec, center: f64, r: f64, ln_z: f64) -> Result<(f64, f64)> {
    let mut logs = [Complex64::new(0.0, 0.0); NODES];
    let mut top = f64::NEG_INFINITY;
    for (k, slot) in logs.iter_mut().enumerate() {
        let theta = 2.0 * PI * (k as f64 + 0.5) / NODES as f64;
        let s = Complex64::new(center + r * math::cos(theta), r * math::sin(theta));
        let w = spec.ln_kernel(s)? - s * ln_z;
        top = top.max(w.re);
        *slot = w;
    }
    if top == f64::NEG_INFINITY {
        return Ok((0.0, 0.0));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, w) in logs.iter().enumerate() {
        let theta = 2.0 * PI * (k as f64 + 0.5) / NODES as f64;
        acc += (w - top).exp() * Complex64::new(math::cos(theta), math::sin(theta));
    }
    let scale = math::exp(top) * r;
    Ok((acc.re * scale / NODES as f64, scale))
}

/// Sum of left residues of `H[z]` with poles of any multiplicity.
pub(crate) fn cluster_residue_sum(
    spec: &FoxHSpec,
    z: f64,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    let ln_z = math::ln(z);
    let right = spec.min_right_pole().unwrap_or(f64::INFINITY);
    let mut horizon = 64.0f64;
    let mut groups = clusters(&left_poles(spec, horizon));
    let mut total = CompensatedSum::new();
    let mut max_term = 0.0f64;
    let mut bins: Vec<f64> = Vec::new();
    let mut bin_index: Option<i64> = None;
    let mut bin_env = 0.0;
    let mut idx = 0usize;
    for used in 0..opts.max_terms {
        if idx + 1 >= groups.len() {
            horizon *= 2.0;
            let done_to = groups[idx.min(groups.len() - 1)].0;
            groups = clusters(&left_poles(spec, horizon));
            idx = groups
                .iter()
                .position(|g| g.0 <= done_to)
                .unwrap_or(groups.len() - 1);
        }
        let (hi, lo) = groups[idx];
        let next = groups[idx + 1].0;
        let prev = if idx == 0 { right } else { groups[idx - 1].1 };
        let half = 0.5 * (hi - lo);
        let center = 0.5 * (hi + lo);
        let room = (lo - next).min(prev - hi).min(2.0);
        let r = half + 0.45 * room;
        let (value, env) = circle_residue(spec, center, r, ln_z)?;
        if !env.is_finite() || !value.is_finite() {
            return Err(Error::NoConvergence {
                terms: used + 1,
                last_term: f64::INFINITY,
            });
        }
        total.add(value);
        max_term = max_term.max(env);
        let b = math::floor(-hi) as i64;
        if bin_index != Some(b) {
            if bin_index.is_some() {
                bins.push(bin_env);
            }
            bin_index = Some(b);
            bin_env = 0.0;
        }
        bin_env += env;
        idx += 1;
        let n = bins.len();
        if n >= 4 {
            let target = (opts.tol * total.value().abs()).max(opts.abs_tol).max(1e-300);
            let last = &bins[n - 3..];
            if last.iter().all(|&e| e <= target) && bins[n - 2] > 0.0 {
                let ratio = bins[n - 1] / bins[n - 2];
                if ratio < 1.0 && bins[n - 1] * ratio / (1.0 - ratio) <= target {
                    return Ok(EvalReport {
                        value: total.value(),
                        method: Method::ResidueSeries,
                        terms: (used + 1) * NODES,
                        tail_bound: bins[n - 1] * ratio / (1.0 - ratio),
                        max_term,
                        imag_residual: 0.0,
                        contour: None,
                    });
                }
            }
        }
    }
    Err(Error::NoConvergence {
        terms: opts.max_terms,
        last_term: bins.last().copied().unwrap_or(f64::NAN),
    })
}
