//! Closed-form and direct-series oracles that share no code with the Fox-H
//! evaluators. Used by the fixture battery and by tests.
//!
//! Names take optional parameters in brackets, e.g. `incomplete_gamma[rho=0.3]`
//! or `gauss_2f1[a=1,b=2,c=3.5]`. Greek spellings (`ρ`, `β`, `η`) are accepted.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math::{self, CompensatedSum};
use crate::quad;

const SERIES_CAP: usize = 100_000;
const SERIES_TOL: f64 = 1e-16;

/// Parsed oracle name with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleName {
    pub base: String,
    pub params: Vec<(String, f64)>,
}

impl OracleName {
    pub fn parse(name: &str) -> Result<Self> {
        let name = name.trim();
        let (base, rest) = match name.find('[') {
            Some(i) => (&name[..i], Some(&name[i + 1..])),
            None => (name, None),
        };
        let mut params = Vec::new();
        if let Some(rest) = rest {
            let body = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::UnknownFixture(format!("{name}: missing ']'")))?;
            for item in body.split(',').filter(|s| !s.trim().is_empty()) {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| Error::UnknownFixture(format!("{name}: bad parameter {item}")))?;
                let v: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::UnknownFixture(format!("{name}: bad value {v}")))?;
                params.push((canonical_key(k.trim()), v));
            }
        }
        Ok(Self {
            base: base.trim().to_string(),
            params,
        })
    }

    fn get(&self, key: &str, default: Option<f64>) -> Result<f64> {
        self.params
            .iter()
            .find(|(k, _)| k == key)
            .map(|&(_, v)| v)
            .or(default)
            .ok_or_else(|| Error::UnknownFixture(format!("{}: missing parameter {key}", self.base)))
    }
}

fn canonical_key(k: &str) -> String {
    match k {
        "ρ" => "rho",
        "β" => "beta",
        "η" => "eta",
        "α" => "alpha",
        "γ" => "gamma",
        "ν" => "nu",
        other => other,
    }
    .to_string()
}

/// Names accepted by [`reference_eval`].
pub const ORACLES: [&str; 17] = [
    "exp",
    "stretched_gamma[e,eta]",
    "bessel_k_half",
    "airy_density",
    "beta_density[e,b]",
    "log_sqrt_ratio",
    "arccos_sqrt",
    "neg_ei",
    "incomplete_gamma[rho]",
    "kummer_1f1[a,b]",
    "gauss_2f1[a,b,c]",
    "mittag_leffler[beta]",
    "m_wright[beta]",
    "prabhakar[alpha,beta,gamma]",
    "bessel_k0_product",
    "bessel_k0_product_cdf",
    "power_law[a]",
];

/// Evaluates the named oracle at `x > 0`.
pub fn reference_eval(name: &str, x: f64) -> Result<f64> {
    let o = OracleName::parse(name)?;
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!("{name}: x={x} must be positive")));
    }
    match o.base.as_str() {
        "exp" => Ok(math::exp(-x)),
        "stretched_gamma" => {
            let e = o.get("e", Some(0.0))?;
            let eta = o.get("eta", Some(1.0))?;
            Ok(math::exp(e / eta * math::ln(x) - math::pow(x, 1.0 / eta))
                / (eta * libm::tgamma(e + eta)))
        }
        "bessel_k_half" => {
            // 4 K_{1/2}(2x) / (Gamma(1/4) Gamma(3/4)), K_{1/2}(z) = sqrt(pi/(2z)) e^{-z}
            let k = math::sqrt(PI / (4.0 * x)) * math::exp(-2.0 * x);
            Ok(4.0 * k / (PI * core::f64::consts::SQRT_2))
        }
        "airy_density" => {
            let z = math::pow(9.0 * x, 1.0 / 3.0);
            Ok(2.0 * PI * math::pow(3.0, 1.0 / 6.0) * airy_ai(z)? / libm::tgamma(4.0 / 3.0))
        }
        "beta_density" => {
            let e = o.get("e", None)?;
            let b = o.get("b", None)?;
            if x >= 1.0 {
                return Ok(0.0);
            }
            let ln_beta = libm::lgamma(e + 1.0) + libm::lgamma(b) - libm::lgamma(e + 1.0 + b);
            Ok(math::exp(e * math::ln(x) + (b - 1.0) * math::ln1p(-x) - ln_beta))
        }
        "log_sqrt_ratio" => {
            if x >= 1.0 {
                return Ok(0.0);
            }
            Ok(math::ln((1.0 + math::sqrt(1.0 - x)) / math::sqrt(x)))
        }
        "arccos_sqrt" => {
            if x >= 1.0 {
                return Ok(0.0);
            }
            Ok(libm::acos(math::sqrt(x)))
        }
        "neg_ei" => Ok(exp_integral_e1(x)),
        "incomplete_gamma" => upper_incomplete_gamma(o.get("rho", None)?, x),
        "kummer_1f1" => kummer_negative(o.get("a", None)?, o.get("b", None)?, x),
        "gauss_2f1" => gauss_negative(o.get("a", None)?, o.get("b", None)?, o.get("c", None)?, x),
        "mittag_leffler" => mittag_leffler_negative(o.get("beta", None)?, x),
        "m_wright" => m_wright(o.get("beta", None)?, x),
        "prabhakar" => prabhakar_negative(
            o.get("alpha", None)?,
            o.get("beta", None)?,
            o.get("gamma", None)?,
            x,
        ),
        "bessel_k0_product" => Ok(2.0 * bessel_k(0.0, 2.0 * math::sqrt(x))),
        "bessel_k0_product_cdf" => {
            let z = 2.0 * math::sqrt(x);
            Ok(1.0 - z * bessel_k(1.0, z))
        }
        "power_law" => {
            // Gamma(1-a) (1+x)^{a-1}
            let a = o.get("a", None)?;
            Ok(libm::tgamma(1.0 - a) * math::pow(1.0 + x, a - 1.0))
        }
        _ => Err(Error::UnknownFixture(o.base)),
    }
}

/// Sums `term(k)` until three consecutive terms fall below the relative
/// tolerance. Terms are produced by the caller's own recurrence.
fn sum_series(mut term: impl FnMut(usize) -> f64, what: &str) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    let mut small = 0;
    let mut biggest = 0.0f64;
    for k in 0..SERIES_CAP {
        let t = term(k);
        if !t.is_finite() {
            return Err(Error::Domain(format!("{what}: term {k} overflowed")));
        }
        acc.add(t);
        biggest = biggest.max(t.abs());
        if t.abs() <= SERIES_TOL * acc.value().abs() || t == 0.0 && k > 0 {
            small += 1;
            if small >= 3 {
                let v = acc.value();
                if biggest > v.abs() * 1e7 {
                    return Err(Error::Domain(format!(
                        "{what}: cancellation from terms of size {biggest:e} leaves {v:e}"
                    )));
                }
                return Ok(v);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NoConvergence {
        terms: SERIES_CAP,
        last_term: f64::NAN,
    })
}

/// Airy Ai from its Maclaurin series (ratio recurrences on both halves).
fn airy_ai(z: f64) -> Result<f64> {
    const C1: f64 = 0.355_028_053_887_817_2;
    const C2: f64 = 0.258_819_403_792_806_8;
    let z3 = z * z * z;
    let mut f_term = 1.0;
    let f = sum_series(
        |k| {
            if k > 0 {
                let kk = k as f64;
                f_term *= z3 / ((3.0 * kk - 1.0) * (3.0 * kk));
            }
            f_term
        },
        "airy f",
    )?;
    let mut g_term = z;
    let g = sum_series(
        |k| {
            if k > 0 {
                let kk = k as f64;
                g_term *= z3 / ((3.0 * kk) * (3.0 * kk + 1.0));
            }
            g_term
        },
        "airy g",
    )?;
    Ok(C1 * f - C2 * g)
}

/// `E_1(x) = -Ei(-x)`: power series for small x, continued fraction beyond.
fn exp_integral_e1(x: f64) -> f64 {
    const EULER: f64 = 0.577_215_664_901_532_9;
    if x <= 1.0 {
        let mut acc = CompensatedSum::new();
        let mut fact = 1.0;
        for k in 1..60 {
            fact *= -x / k as f64;
            let t = fact / k as f64;
            acc.add(t);
            if t.abs() < 1e-18 {
                break;
            }
        }
        return -EULER - math::ln(x) - acc.value();
    }
    // modified Lentz on the continued fraction for e^x E_1(x)
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * math::exp(-x)
}

/// `Gamma(rho, x) = int_x^inf w^{rho-1} e^{-w} dw` by adaptive quadrature.
fn upper_incomplete_gamma(rho: f64, x: f64) -> Result<f64> {
    let mut total = 0.0;
    let mut lo = x;
    // piecewise to keep each panel smooth; tail beyond 80 units is below 1e-34
    for width in [1.0, 4.0, 16.0, 64.0] {
        let hi = lo + width;
        let q = quad::integrate(
            |w| Ok(math::exp((rho - 1.0) * math::ln(w) - w)),
            lo,
            hi,
            0.0,
            1e-14,
        )?;
        total += q.value;
        lo = hi;
    }
    Ok(total)
}

/// `1F1(a; b; -x)` via Kummer's transformation `e^{-x} 1F1(b-a; b; x)`.
fn kummer_negative(a: f64, b: f64, x: f64) -> Result<f64> {
    let mut t = 1.0;
    let s = sum_series(
        |k| {
            if k > 0 {
                let kk = (k - 1) as f64;
                t *= (b - a + kk) / (b + kk) * x / (kk + 1.0);
            }
            t
        },
        "kummer",
    )?;
    Ok(math::exp(-x) * s)
}

/// `2F1(a, b; c; -x)` via Pfaff's transformation to the argument `x/(1+x)`.
fn gauss_negative(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    let w = x / (1.0 + x);
    let mut t = 1.0;
    let s = sum_series(
        |k| {
            if k > 0 {
                let kk = (k - 1) as f64;
                t *= (a + kk) * (c - b + kk) / ((c + kk) * (kk + 1.0)) * w;
            }
            t
        },
        "gauss",
    )?;
    Ok(math::pow(1.0 + x, -a) * s)
}

/// `E_beta(-x)`: exact forms at beta = 1 and 1/2, direct series otherwise.
fn mittag_leffler_negative(beta: f64, x: f64) -> Result<f64> {
    if beta == 1.0 {
        return Ok(math::exp(-x));
    }
    if beta == 0.5 {
        return Ok(scaled_erfc(x));
    }
    sum_series(
        |k| math::pow(-x, k as f64) / libm::tgamma(beta * k as f64 + 1.0),
        "mittag-leffler",
    )
}

/// `e^{x^2} erfc(x)` with an asymptotic expansion where `e^{x^2}` overflows.
fn scaled_erfc(x: f64) -> f64 {
    if x < 25.0 {
        return math::exp(x * x) * libm::erfc(x);
    }
    let inv = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut acc = 1.0;
    for k in 1..8 {
        term *= -((2 * k - 1) as f64) * inv;
        acc += term;
    }
    acc / (x * math::sqrt(PI))
}

/// M-Wright function `sum (-x)^k / (k! Gamma(1 - beta - beta k))`.
fn m_wright(beta: f64, x: f64) -> Result<f64> {
    let mut fact = 1.0;
    sum_series(
        |k| {
            if k > 0 {
                fact *= -x / k as f64;
            }
            // 1/Gamma(1-y) = Gamma(y) sin(pi y) / pi with y = beta (k+1)
            let y = beta * (k + 1) as f64;
            let recip = if y == math::round(y) {
                0.0
            } else {
                libm::tgamma(y) * math::sin_pi(y) / PI
            };
            fact * recip
        },
        "m-wright",
    )
}

/// Three-parameter Mittag-Leffler `E^gamma_{alpha,beta}(-x)`.
fn prabhakar_negative(alpha: f64, beta: f64, gamma: f64, x: f64) -> Result<f64> {
    let mut poch = 1.0;
    sum_series(
        |k| {
            if k > 0 {
                let kk = (k - 1) as f64;
                poch *= (gamma + kk) * -x / (kk + 1.0);
            }
            poch / libm::tgamma(alpha * k as f64 + beta)
        },
        "prabhakar",
    )
}

/// `K_nu(z) = int_0^inf e^{-z cosh u} cosh(nu u) du` by the trapezoid rule,
/// which converges geometrically for this analytic integrand.
fn bessel_k(nu: f64, z: f64) -> f64 {
    let h = 0.02;
    // integrand below 1e-300 relative once z cosh u exceeds z + 700
    let u_max = libm::acosh(1.0 + 700.0 / z).max(1.0);
    let n = math::ceil(u_max / h) as usize;
    let mut acc = CompensatedSum::new();
    acc.add(0.5 * math::exp(-z));
    for i in 1..=n {
        let u = i as f64 * h;
        acc.add(math::exp(-z * math::cosh(u)) * math::cosh(nu * u));
    }
    acc.value() * h
}
