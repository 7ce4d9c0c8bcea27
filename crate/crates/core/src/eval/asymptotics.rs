use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{self, LN_2PI, PI};
use crate::spec::{FoxHSpec, POLE_HORIZON};

/// Large-`R` envelope of `|kernel(s) z^{-s}|` on `s = gamma + R e^{i theta}`:
/// `C * exp(growth_rate R ln R - linear_rate R + log_power ln R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleEstimate {
    /// `cos(theta) * scale_balance`.
    pub growth_rate: f64,
    /// `cos(theta) ln(e^{balance} |z| / scale_product) + sin(theta) * angle_term`.
    pub linear_rate: f64,
    /// `exponent_shift + gamma * scale_balance`.
    pub log_power: f64,
    /// `sector_lower * theta - sector_upper * sign(theta)(|theta| - pi) - arg z`.
    pub angle_term: f64,
    /// `ln C`.
    pub log_constant: f64,
    /// Log of the envelope at the requested radius.
    pub log_bound: f64,
}

impl CircleEstimate {
    pub fn constant(&self) -> f64 {
        math::exp(self.log_constant)
    }
}

/// Envelope constants for the arc of radius `radius` at angle `theta`
/// around `gamma`. `theta` must lie in `(-pi, pi)` and be nonzero.
pub fn circle_estimate(
    spec: &FoxHSpec,
    z: Complex64,
    gamma: f64,
    theta: f64,
    radius: f64,
) -> Result<CircleEstimate> {
    if theta == 0.0 || !(theta.abs() < PI) {
        return Err(Error::ThetaZero);
    }
    if z.norm() == 0.0 || !z.norm().is_finite() {
        return Err(Error::Domain(format!("z={z}")));
    }
    let d = spec.derive_params();
    let ln_abs_z = math::ln(z.norm());
    let reflected = theta.signum() * (theta.abs() - PI);
    let angle_term = d.sector_lower * theta - d.sector_upper * reflected - z.arg();
    let growth_rate = math::cos(theta) * d.scale_balance;
    let linear_rate = math::cos(theta) * (d.scale_balance + ln_abs_z - math::ln(d.scale_product))
        + math::sin(theta) * angle_term;
    let log_power = d.exponent_shift + gamma * d.scale_balance;
    let count = (spec.m + spec.n) as f64 - 0.5 * (spec.p() + spec.q()) as f64;
    let mut log_constant = -gamma * ln_abs_z + count * LN_2PI;
    for p in &spec.lower {
        log_constant += (p.shift + p.scale * gamma - 0.5) * math::ln(p.scale);
    }
    for p in &spec.upper {
        log_constant -= (p.shift + p.scale * gamma - 0.5) * math::ln(p.scale);
    }
    let lr = math::ln(radius);
    let log_bound = log_constant + growth_rate * radius * lr - linear_rate * radius + log_power * lr;
    Ok(CircleEstimate {
        growth_rate,
        linear_rate,
        log_power,
        angle_term,
        log_constant,
        log_bound,
    })
}

/// Leading behavior of an all-moments density `H^{m,0}_{p,m}` at both ends:
/// `~ x^{zero_exponent}` as `x -> 0` and
/// `~ x^{infinity_exponent} exp(-infinity_rate x^{infinity_power})` as `x -> inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailBehavior {
    pub infinity_exponent: f64,
    pub infinity_rate: f64,
    pub infinity_power: f64,
    pub zero_exponent: f64,
    /// Lower pairs attaining `zero_exponent`.
    pub argmin_indices: Vec<usize>,
}

pub fn tail_behavior(spec: &FoxHSpec) -> Result<TailBehavior> {
    if spec.n != 0 || spec.m != spec.q() || spec.m == 0 {
        return Err(Error::Shape(format!(
            "tail constants need n = 0 and m = q >= 1 (got m={}, n={}, q={})",
            spec.m,
            spec.n,
            spec.q()
        )));
    }
    let d = spec.derive_params();
    if !(d.sector_width > 0.0) {
        return Err(Error::SeriesDomain(format!(
            "sector width {} must be positive",
            d.sector_width
        )));
    }
    let poles = spec.poles(POLE_HORIZON, 0);
    if !poles.simple {
        return Err(Error::MultiplePoles(f64::NAN));
    }
    let ratios: Vec<f64> = spec.lower.iter().map(|p| p.shift / p.scale).collect();
    let zero_exponent = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let argmin_indices = ratios
        .iter()
        .enumerate()
        .filter(|(_, r)| crate::spec::poles_coincide(**r, zero_exponent))
        .map(|(j, _)| j)
        .collect();
    let balance = d.scale_balance;
    Ok(TailBehavior {
        infinity_exponent: (d.exponent_shift + 0.5) / balance,
        infinity_rate: balance * math::pow(d.scale_product, -1.0 / balance),
        infinity_power: 1.0 / balance,
        zero_exponent,
        argmin_indices,
    })
}
