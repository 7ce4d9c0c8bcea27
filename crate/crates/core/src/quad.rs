//! Globally adaptive 15-point Gauss-Kronrod quadrature.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{self, CompensatedSum};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Integral estimate with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        resk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let value = resk * half;
    let error = ((resk - resg) * half).abs();
    Ok(Segment { a, b, value, error })
}

/// Integrates `f` over `[a, b]` to `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    const MAX_SEGMENTS: usize = 4000;
    let mut segments: Vec<Segment> = Vec::with_capacity(64);
    segments.push(kronrod(&mut f, a, b)?);
    let mut evaluations = 15;
    loop {
        let mut total = CompensatedSum::new();
        let mut err = 0.0;
        for s in &segments {
            total.add(s.value);
            err += s.error;
        }
        let value = total.value();
        if !value.is_finite() {
            return Err(Error::Domain("non-finite integrand".into()));
        }
        let target = abs_tol.max(rel_tol * value.abs());
        if err <= target {
            return Ok(Quadrature {
                value,
                error: err,
                evaluations,
            });
        }
        if segments.len() >= MAX_SEGMENTS {
            return Err(Error::NoConvergence {
                terms: evaluations,
                last_term: err,
            });
        }
        let (idx, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let worst = segments.swap_remove(idx);
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // cannot split further; accept what we have
            segments.push(worst);
            let value = segments.iter().map(|s| s.value).sum();
            return Ok(Quadrature {
                value,
                error: err,
                evaluations,
            });
        }
        segments.push(kronrod(&mut f, worst.a, mid)?);
        segments.push(kronrod(&mut f, mid, worst.b)?);
        evaluations += 30;
    }
}

/// Integrates `f` over `[exp(lo), exp(hi)]` in the variable `u = ln x`.
pub fn integrate_log<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate(
        |u| {
            let x = math::exp(u);
            Ok(f(x)? * x)
        },
        lo,
        hi,
        abs_tol,
        rel_tol,
    )
}
