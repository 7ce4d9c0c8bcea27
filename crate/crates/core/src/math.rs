//! Thin wrappers over `libm` plus compensated summation.

pub use core::f64::consts::{E, LN_2, PI};

pub const LN_2PI: f64 = 1.837_877_066_409_345_5;
pub const LN_PI: f64 = 1.144_729_885_849_400_2;
pub const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}
#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}
#[inline]
pub fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}
#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}
#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}
#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}
#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}
#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}
#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}
#[inline]
pub fn cosh(x: f64) -> f64 {
    libm::cosh(x)
}
#[inline]
pub fn expm1(x: f64) -> f64 {
    libm::expm1(x)
}
#[inline]
pub fn ln1p(x: f64) -> f64 {
    libm::log1p(x)
}

/// sin(pi x) with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    if x.is_nan() || x.is_infinite() {
        return f64::NAN;
    }
    let mut r = x % 2.0;
    if r < 0.0 {
        r += 2.0;
    }
    // r in [0, 2)
    let (sign, r) = if r >= 1.0 { (-1.0, r - 1.0) } else { (1.0, r) };
    let v = if r == 0.0 {
        0.0
    } else if r < 0.25 {
        sin(PI * r)
    } else if r < 0.75 {
        cos(PI * (0.5 - r))
    } else {
        sin(PI * (1.0 - r))
    };
    sign * v
}

/// True when `x` lies within `tol` (relative, floored at 1) of 0, -1, -2, ...
pub fn near_nonpositive_integer(x: f64, tol: f64) -> bool {
    if x > 0.5 {
        return false;
    }
    let r = round(x);
    (x - r).abs() <= tol * r.abs().max(1.0)
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Agreement in units of roundoff relative to `scale`.
pub fn within_ulps(a: f64, b: f64, scale: f64, ulps: f64) -> bool {
    let s = scale.abs().max(a.abs()).max(b.abs());
    (a - b).abs() <= ulps * f64::EPSILON * s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_pi_hits_integers_exactly() {
        for k in -5..=5 {
            assert_eq!(sin_pi(k as f64), 0.0);
        }
        assert!((sin_pi(0.5) - 1.0).abs() < 1e-16);
        assert!((sin_pi(-0.5) + 1.0).abs() < 1e-16);
        assert!((sin_pi(2.25) - sin(PI * 0.25)).abs() < 1e-15);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-17);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-16).abs() < 1e-30);
    }
}
