//! Parameter sets, derived quantities, pole bookkeeping and validation.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gamma;
use crate::math;

/// Number of poles per family enumerated by the separation and simplicity checks.
pub const POLE_HORIZON: usize = 64;

/// One gamma factor `Gamma(shift + scale * s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamPair {
    pub shift: f64,
    pub scale: f64,
}

impl ParamPair {
    pub const fn new(shift: f64, scale: f64) -> Self {
        Self { shift, scale }
    }
}

/// `H^{m,n}_{p,q}[c x]` with `p = upper.len()` and `q = lower.len()`.
///
/// Kernel:
/// `prod_{j<m} G(b_j+B_j s) prod_{i<n} G(1-a_i-A_i s) /
///  (prod_{i>=n} G(a_i+A_i s) prod_{j>=m} G(1-b_j-B_j s))`
/// with upper pairs `(a_i, A_i)` and lower pairs `(b_j, B_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FoxHSpec {
    pub m: usize,
    pub n: usize,
    pub upper: Vec<ParamPair>,
    pub lower: Vec<ParamPair>,
    /// Argument scale: the function is evaluated at `c * x`.
    pub c: f64,
}

impl FoxHSpec {
    pub fn new(m: usize, n: usize, upper: Vec<ParamPair>, lower: Vec<ParamPair>) -> Result<Self> {
        let spec = Self {
            m,
            n,
            upper,
            lower,
            c: 1.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_scale(mut self, c: f64) -> Result<Self> {
        self.c = c;
        self.validate()?;
        Ok(self)
    }

    /// The empty spec `H^{0,0}_{0,0}`; as a law it is the point mass at 1.
    pub fn empty() -> Self {
        Self {
            m: 0,
            n: 0,
            upper: Vec::new(),
            lower: Vec::new(),
            c: 1.0,
        }
    }

    pub fn p(&self) -> usize {
        self.upper.len()
    }

    pub fn q(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_empty() && self.lower.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.m > self.q() {
            return Err(Error::InvalidSpec(format!(
                "m={} exceeds q={}",
                self.m,
                self.q()
            )));
        }
        if self.n > self.p() {
            return Err(Error::InvalidSpec(format!(
                "n={} exceeds p={}",
                self.n,
                self.p()
            )));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidSpec(format!("scale c={} must be positive", self.c)));
        }
        for (side, pairs) in [("upper", &self.upper), ("lower", &self.lower)] {
            for (i, pp) in pairs.iter().enumerate() {
                if !pp.shift.is_finite() {
                    return Err(Error::InvalidSpec(format!("{side}[{i}] shift is not finite")));
                }
                if !(pp.scale.is_finite() && pp.scale > 0.0) {
                    return Err(Error::InvalidSpec(format!(
                        "{side}[{i}] scale {} must be positive",
                        pp.scale
                    )));
                }
            }
        }
        Ok(())
    }

    /// Derived structural constants.
    pub fn derive_params(&self) -> DerivedParams {
        let (m, n) = (self.m, self.n);
        let sum_scale = |pairs: &[ParamPair]| pairs.iter().map(|p| p.scale).sum::<f64>();
        let sector_lower = sum_scale(&self.lower[..m]) - sum_scale(&self.upper[n..]);
        let sector_upper = sum_scale(&self.upper[..n]) - sum_scale(&self.lower[m..]);
        let scale_balance = sum_scale(&self.lower) - sum_scale(&self.upper);
        let log_scale_product = self
            .lower
            .iter()
            .map(|p| p.scale * math::ln(p.scale))
            .sum::<f64>()
            - self
                .upper
                .iter()
                .map(|p| p.scale * math::ln(p.scale))
                .sum::<f64>();
        let exponent_shift = self.lower.iter().map(|p| p.shift).sum::<f64>()
            - self.upper.iter().map(|p| p.shift).sum::<f64>()
            + (self.p() as f64 - self.q() as f64) / 2.0;
        DerivedParams {
            sector_width: sector_lower + sector_upper,
            sector_lower,
            sector_upper,
            scale_balance,
            scale_product: math::exp(log_scale_product),
            exponent_shift,
        }
    }

    /// Left poles `-(b_j + l)/B_j` for `j < m`, `l <= max_l`, and right poles
    /// `(1 - a_i + k)/A_i` for `i < n`, `k <= max_k`.
    pub fn poles(&self, max_l: usize, max_k: usize) -> PoleSet {
        let left: Vec<Pole> = self.lower[..self.m]
            .iter()
            .enumerate()
            .flat_map(|(j, p)| {
                (0..=max_l).map(move |l| Pole {
                    value: -(p.shift + l as f64) / p.scale,
                    family: j,
                    order: l,
                })
            })
            .collect();
        let right: Vec<Pole> = self.upper[..self.n]
            .iter()
            .enumerate()
            .flat_map(|(i, p)| {
                (0..=max_k).map(move |k| Pole {
                    value: (1.0 - p.shift + k as f64) / p.scale,
                    family: i,
                    order: k,
                })
            })
            .collect();
        let simple = first_coincidence(&left).is_none();
        PoleSet {
            left,
            right,
            simple,
        }
    }

    /// Rightmost left pole, if any.
    pub fn max_left_pole(&self) -> Option<f64> {
        self.lower[..self.m]
            .iter()
            .map(|p| -p.shift / p.scale)
            .reduce(f64::max)
    }

    /// Leftmost right pole, if any.
    pub fn min_right_pole(&self) -> Option<f64> {
        self.upper[..self.n]
            .iter()
            .map(|p| (1.0 - p.shift) / p.scale)
            .reduce(f64::min)
    }

    /// Checks that no left pole coincides with a right pole within the horizon.
    pub fn validate_separation(&self) -> Result<()> {
        for (i, a) in self.upper[..self.n].iter().enumerate() {
            for (j, b) in self.lower[..self.m].iter().enumerate() {
                for k in 0..POLE_HORIZON {
                    for l in 0..POLE_HORIZON {
                        let lhs = a.scale * (b.shift + l as f64);
                        let rhs = b.scale * (a.shift - k as f64 - 1.0);
                        let scale = lhs.abs().max(rhs.abs()).max(1.0);
                        if (lhs - rhs).abs() <= 1e-12 * scale {
                            return Err(Error::PoleCollision {
                                upper: i,
                                lower: j,
                                k,
                                l,
                                location: -(b.shift + l as f64) / b.scale,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Which of the conditions for `H/K` to be a probability density hold.
    pub fn density_conditions(&self) -> DensityConditions {
        let mut failures = Vec::new();
        for (i, p) in self.upper.iter().enumerate() {
            let s = p.shift + p.scale;
            if i < self.n && s >= 1.0 {
                failures.push(format!("upper[{i}]: shift+scale={s} must be < 1"));
            }
            if i >= self.n && s <= 0.0 {
                failures.push(format!("upper[{i}]: shift+scale={s} must be > 0"));
            }
        }
        let right = self.poles(0, POLE_HORIZON).right;
        if let Some(x) = first_coincidence(&right) {
            failures.push(format!("right poles coincide at s={x}"));
        }
        let upper_ok = failures.is_empty();
        let mark = failures.len();
        for (j, p) in self.lower.iter().enumerate() {
            let s = p.shift + p.scale;
            if j < self.m && s <= 0.0 {
                failures.push(format!("lower[{j}]: shift+scale={s} must be > 0"));
            }
            if j >= self.m && s >= 1.0 {
                failures.push(format!("lower[{j}]: shift+scale={s} must be < 1"));
            }
        }
        let lower_ok = failures.len() == mark;
        let d = self.derive_params();
        let decay_ok = d.sector_width > 0.0 || (d.sector_width == 0.0 && d.exponent_shift < -1.0);
        if !decay_ok {
            failures.push(format!(
                "need sector width > 0, or = 0 with exponent shift < -1 (got {}, {})",
                d.sector_width, d.exponent_shift
            ));
        }
        DensityConditions {
            upper_ok,
            lower_ok,
            decay_ok,
            failures,
        }
    }

    /// Spec of the unnormalized Laplace transform `s -> int e^{-sx} H[cx] dx`,
    /// up to the factor `1/c` that the caller applies.
    pub fn lt_spec(&self) -> Result<FoxHSpec> {
        // the empty spec is the point mass at 1, with transform e^{-s}
        if !self.is_empty() {
            self.density_conditions().check()?;
        }
        let upper = self
            .lower
            .iter()
            .map(|p| ParamPair::new(1.0 - p.shift - p.scale, p.scale))
            .collect();
        let mut lower = Vec::with_capacity(self.p() + 1);
        lower.push(ParamPair::new(0.0, 1.0));
        lower.extend(
            self.upper
                .iter()
                .map(|p| ParamPair::new(1.0 - p.shift - p.scale, p.scale)),
        );
        let spec = FoxHSpec {
            m: self.n + 1,
            n: self.m,
            upper,
            lower,
            c: 1.0 / self.c,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `H^{n,m}_{q,p}[1/(cx)]` with reflected pairs equals `H^{m,n}_{p,q}[cx]`.
    pub fn inverted(&self) -> FoxHSpec {
        FoxHSpec {
            m: self.n,
            n: self.m,
            upper: self
                .lower
                .iter()
                .map(|p| ParamPair::new(1.0 - p.shift, p.scale))
                .collect(),
            lower: self
                .upper
                .iter()
                .map(|p| ParamPair::new(1.0 - p.shift, p.scale))
                .collect(),
            c: 1.0 / self.c,
        }
    }

    /// Natural log of the Mellin kernel at complex `s`.
    pub fn ln_kernel(&self, s: Complex64) -> Result<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, p) in self.lower.iter().enumerate() {
            let w = s * p.scale + p.shift;
            if j < self.m {
                acc += gamma::ln_gamma(w)?;
            } else {
                match gamma::ln_gamma(one - w) {
                    Ok(v) => acc -= v,
                    Err(Error::GammaPole(_)) => return Ok(Complex64::new(f64::NEG_INFINITY, 0.0)),
                    Err(e) => return Err(e),
                }
            }
        }
        for (i, p) in self.upper.iter().enumerate() {
            let w = s * p.scale + p.shift;
            if i < self.n {
                acc += gamma::ln_gamma(one - w)?;
            } else {
                match gamma::ln_gamma(w) {
                    Ok(v) => acc -= v,
                    Err(Error::GammaPole(_)) => return Ok(Complex64::new(f64::NEG_INFINITY, 0.0)),
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(acc)
    }

    /// Mellin kernel at real `s`, as a plain product of gamma values.
    pub fn kernel_real(&self, s: f64) -> Result<f64> {
        let mut num = 1.0;
        let mut den_recip = 1.0;
        for (j, p) in self.lower.iter().enumerate() {
            let w = p.shift + p.scale * s;
            if j < self.m {
                num *= gamma::gamma(w)?;
            } else {
                den_recip *= gamma::recip_gamma(1.0 - w);
            }
        }
        for (i, p) in self.upper.iter().enumerate() {
            let w = p.shift + p.scale * s;
            if i < self.n {
                num *= gamma::gamma(1.0 - w)?;
            } else {
                den_recip *= gamma::recip_gamma(w);
            }
        }
        Ok(num * den_recip)
    }

    /// Mellin transform `int x^{s-1} H[cx] dx = c^{-s} * kernel(s)`.
    pub fn mellin_transform(&self, s: f64) -> Result<f64> {
        Ok(math::pow(self.c, -s) * self.kernel_real(s)?)
    }
}

/// Structural constants of a spec.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// `sum_{j<m} B_j - sum_{j>=m} B_j + sum_{i<n} A_i - sum_{i>=n} A_i`;
    /// the function is analytic in `|arg z| < sector_width * pi / 2`.
    pub sector_width: f64,
    /// `sum_{j<m} B_j - sum_{i>=n} A_i`.
    pub sector_lower: f64,
    /// `sum_{i<n} A_i - sum_{j>=m} B_j`.
    pub sector_upper: f64,
    /// `sum B_j - sum A_i`; positive means the left residue series converges everywhere.
    pub scale_balance: f64,
    /// `prod B_j^{B_j} / prod A_i^{A_i}`.
    pub scale_product: f64,
    /// `sum b_j - sum a_i + (p - q)/2`.
    pub exponent_shift: f64,
}

/// One enumerated pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub value: f64,
    /// Index of the generating pair (lower pair for left poles, upper for right).
    pub family: usize,
    /// `l` or `k` in the enumeration.
    pub order: usize,
}

/// Enumerated pole families.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSet {
    pub left: Vec<Pole>,
    pub right: Vec<Pole>,
    /// No two left poles coincide.
    pub simple: bool,
}

impl fmt::Display for FoxHSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs = |v: &[ParamPair]| {
            v.iter()
                .map(|p| format!("({}, {})", p.shift, p.scale))
                .collect::<Vec<_>>()
                .join(" ")
        };
        write!(
            f,
            "H^{{{},{}}}_{{{},{}}}[{}x | {}; {}]",
            self.m,
            self.n,
            self.p(),
            self.q(),
            self.c,
            pairs(&self.upper),
            pairs(&self.lower)
        )
    }
}

/// Outcome of the density-condition check.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityConditions {
    pub upper_ok: bool,
    pub lower_ok: bool,
    pub decay_ok: bool,
    pub failures: Vec<String>,
}

impl DensityConditions {
    pub fn all_ok(&self) -> bool {
        self.upper_ok && self.lower_ok && self.decay_ok
    }

    pub fn check(self) -> Result<()> {
        if self.all_ok() {
            Ok(())
        } else {
            Err(Error::InvalidDensity(self.failures))
        }
    }
}

/// Two poles coincide when they differ by at most `1e-12 * max(1, |pole|)`.
pub fn poles_coincide(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0)
}

fn first_coincidence(poles: &[Pole]) -> Option<f64> {
    let mut values: Vec<f64> = poles.iter().map(|p| p.value).collect();
    values.sort_by(f64::total_cmp);
    values
        .windows(2)
        .find(|w| poles_coincide(w[0], w[1]))
        .map(|w| w[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            FoxHSpec::new(2, 0, vec![], vec![ParamPair::new(0.0, 1.0)]),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            FoxHSpec::new(1, 0, vec![], vec![ParamPair::new(0.0, -1.0)]),
            Err(Error::InvalidSpec(_))
        ));
        assert!(FoxHSpec::empty().validate().is_ok());
    }

    #[test]
    fn exponential_params() {
        let s = FoxHSpec::new(1, 0, vec![], vec![ParamPair::new(0.0, 1.0)]).unwrap();
        let d = s.derive_params();
        assert_eq!(d.sector_width, 1.0);
        assert_eq!(d.scale_balance, 1.0);
        assert_eq!(d.scale_product, 1.0);
        assert_eq!(d.exponent_shift, -0.5);
    }

    #[test]
    fn collision_is_located() {
        let s = FoxHSpec::new(
            1,
            1,
            vec![ParamPair::new(1.0, 1.0)],
            vec![ParamPair::new(0.0, 1.0)],
        )
        .unwrap();
        match s.validate_separation() {
            Err(Error::PoleCollision { k, l, .. }) => assert_eq!((k, l), (0, 0)),
            other => panic!("{other:?}"),
        }
    }
}
