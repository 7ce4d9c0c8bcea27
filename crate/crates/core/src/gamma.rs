//! Log-gamma over the complex plane, real gamma helpers, and Stirling-type
//! magnitude estimates for `Gamma(b + a s)` and `Gamma(b - a s)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{self, near_nonpositive_integer, sin_pi, HALF_LN_2PI, LN_PI, PI};

/// Distance (relative) under which an argument counts as sitting on a pole.
pub const POLE_TOL: f64 = 1e-13;

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEF: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_76e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_88e-3,
    0.217_439_618_115_212_64e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

fn lanczos_complex(z: Complex64) -> Complex64 {
    let zm = z - 1.0;
    let mut x = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        x += *c / (zm + i as f64);
    }
    let t = zm + (LANCZOS_G + 0.5);
    (zm + 0.5) * t.ln() - t + x.ln() + HALF_LN_2PI
}

fn lanczos_real(z: f64) -> f64 {
    let zm = z - 1.0;
    let mut x = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        x += c / (zm + i as f64);
    }
    let t = zm + LANCZOS_G + 0.5;
    (zm + 0.5) * math::ln(t) - t + math::ln(x) + HALF_LN_2PI
}

/// Principal branch of `ln(sin(pi z))` for `Im z > 0`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im < 20.0 {
        let s = Complex64::new(
            sin_pi(z.re) * math::cosh(PI * z.im),
            sin_pi(z.re + 0.5) * libm::sinh(PI * z.im),
        );
        return s.ln();
    }
    // sin(pi z) = i/2 e^{-i pi z} (1 - e^{2 i pi z}); the bracket is 1 to
    // working precision once Im z > 20.
    let corr = Complex64::new(0.0, 2.0 * PI * z.re).exp() * math::exp(-2.0 * PI * z.im);
    let mut w = Complex64::new(PI * z.im - math::LN_2, 0.5 * PI - PI * z.re) + (-corr).ln_1p();
    // bring the imaginary part back to (-pi, pi]
    let turns = math::round(w.im / (2.0 * PI));
    w.im -= turns * 2.0 * PI;
    if w.im <= -PI {
        w.im += 2.0 * PI;
    } else if w.im > PI {
        w.im -= 2.0 * PI;
    }
    w
}

trait Ln1p {
    fn ln_1p(self) -> Complex64;
}

impl Ln1p for Complex64 {
    fn ln_1p(self) -> Complex64 {
        if self.norm() < 1e-4 {
            // two-term series is exact to double precision here
            self - self * self * 0.5
        } else {
            (self + 1.0).ln()
        }
    }
}

/// Principal branch of `ln Gamma(z)`, analytic on the plane cut along
/// the non-positive real axis. On the cut itself the real part is
/// `ln|Gamma|` and the imaginary part is `0` or `pi` by sign.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(alloc::format!("ln_gamma({z})")));
    }
    if z.im < 0.0 {
        return ln_gamma(z.conj()).map(|w| w.conj());
    }
    if z.im == 0.0 {
        let (lg, sign) = ln_gamma_real(z.re)?;
        return Ok(Complex64::new(lg, if sign < 0.0 { PI } else { 0.0 }));
    }
    if z.re >= 0.5 {
        return Ok(lanczos_complex(z));
    }
    if z.re > -64.0 {
        // upward recurrence keeps every factor in the upper half plane,
        // so the principal branch is preserved
        let shift = math::floor(0.5 - z.re) + 1.0;
        let n = shift as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            acc += (z + k as f64).ln();
        }
        return Ok(lanczos_complex(z + shift) - acc);
    }
    let tmp = 2.0 * PI * math::floor(0.5 * z.re + 0.25);
    Ok(Complex64::new(LN_PI, tmp) - ln_sin_pi(z) - ln_gamma(Complex64::new(1.0, 0.0) - z)?)
}

/// `(ln|Gamma(x)|, sign Gamma(x))` for real `x`.
pub fn ln_gamma_real(x: f64) -> Result<(f64, f64)> {
    if x.is_nan() {
        return Err(Error::Domain(alloc::format!("ln_gamma_real({x})")));
    }
    if near_nonpositive_integer(x, POLE_TOL) {
        return Err(Error::GammaPole(x));
    }
    if x >= 0.5 {
        return Ok((lanczos_real(x), 1.0));
    }
    let s = sin_pi(x);
    let (lg1, _) = ln_gamma_real(1.0 - x)?;
    Ok((LN_PI - math::ln(s.abs()) - lg1, if s < 0.0 { -1.0 } else { 1.0 }))
}

/// `Gamma(x)` for real `x`; errors at the poles.
pub fn gamma(x: f64) -> Result<f64> {
    let (lg, sign) = ln_gamma_real(x)?;
    Ok(sign * math::exp(lg))
}

/// `1/Gamma(x)`, which is entire: exactly zero at the poles of `Gamma`.
pub fn recip_gamma(x: f64) -> f64 {
    match ln_gamma_real(x) {
        Ok((lg, sign)) => sign * math::exp(-lg),
        Err(_) => 0.0,
    }
}

/// An asymptotic estimate of `ln|Gamma(.)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnitudeEstimate {
    pub log_magnitude: f64,
    /// False when the gamma argument sits on the branch cut, where the
    /// Stirling form does not apply.
    pub valid: bool,
}

fn magnitude_with_arg(b: Complex64, a: f64, s: Complex64, arg_s: f64) -> MagnitudeEstimate {
    let r = s.norm();
    let power = a * s.re + b.re - 0.5;
    let log_magnitude = HALF_LN_2PI + power * (math::ln(a) + math::ln(r))
        - a * (s.re + s.im * arg_s)
        - b.im * arg_s;
    let w = b + s * a;
    let valid = !(w.im == 0.0 && w.re <= 0.0) && r > 0.0;
    MagnitudeEstimate {
        log_magnitude,
        valid,
    }
}

/// Large-`|s|` estimate of `ln|Gamma(b + a s)|`, `a > 0`.
pub fn gamma_magnitude_plus(b: Complex64, a: f64, s: Complex64) -> MagnitudeEstimate {
    magnitude_with_arg(b, a, s, s.arg())
}

/// Large-`|s|` estimate of `ln|Gamma(b - a s)|`, `a > 0`, obtained from the
/// plus form at `-s` with `arg(-s) = sign(arg s) (|arg s| - pi)`.
pub fn gamma_magnitude_minus(b: Complex64, a: f64, s: Complex64) -> Result<MagnitudeEstimate> {
    let theta = s.arg();
    if theta == 0.0 {
        return Err(Error::SectorViolation);
    }
    let reflected = theta.signum() * (theta.abs() - PI);
    Ok(magnitude_with_arg(b, a, -s, reflected))
}
