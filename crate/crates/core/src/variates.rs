//! Products, powers and sampling of Fox-H random variables.
//!
//! A variate carries its spec, the normalizer `K = int H[c x] dx` and its
//! support. Variates built from class members also remember how to sample
//! themselves as a product of powers of gamma, beta and M-Wright draws.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Exp1, Gamma};

use crate::densities::{self, build_class, ClassSpec, ClassTag, Support, WrightFactor};
use crate::error::{Error, Result};
use crate::eval::{self, EvalOptions};
use crate::math::{self, PI};
use crate::quad;
use crate::spec::{FoxHSpec, ParamPair};

/// A random variable with density `H[c x] / k_value`.
#[derive(Debug, Clone, PartialEq)]
pub struct FoxHVariate {
    pub spec: FoxHSpec,
    pub k_value: f64,
    pub support: Support,
    /// Class members and exponents whose product has this law, if known.
    recipe: Option<Vec<(ClassSpec, f64)>>,
}

impl FoxHVariate {
    /// The variate of a class member.
    pub fn from_class(cs: &ClassSpec) -> Result<Self> {
        let built = build_class(cs)?;
        Ok(Self {
            spec: built.spec,
            k_value: built.normalization.k_value,
            support: built.support,
            recipe: Some(alloc::vec![(cs.clone(), 1.0)]),
        })
    }

    /// A variate from a raw spec; `K` is the kernel at 1 divided by `c`.
    /// Such variates cannot be sampled.
    pub fn from_spec(spec: FoxHSpec) -> Result<Self> {
        if spec.is_empty() {
            return Ok(identity_variate());
        }
        let k_value = spec.kernel_real(1.0)? / spec.c;
        if !(k_value.is_finite() && k_value > 0.0) {
            return Err(Error::InvalidDensity(alloc::vec![format!(
                "normalizer {k_value} is not positive"
            )]));
        }
        let support = Support::of_spec(&spec);
        Ok(Self {
            spec,
            k_value,
            support,
            recipe: None,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.spec.is_empty()
    }

    /// Density at `x`.
    pub fn density(&self, x: f64, opts: &EvalOptions) -> Result<f64> {
        eval::check_argument(x)?;
        match self.support {
            Support::PointAtOne => Err(Error::Domain(
                "the point mass at 1 has no density function".into(),
            )),
            Support::UnitInterval if x >= 1.0 => Ok(0.0),
            _ => Ok(eval::evaluate(&self.spec, x, opts)?.value / self.k_value),
        }
    }

    /// `E[X^r] = c^{-r} kernel(r + 1) / kernel(1)`.
    pub fn moment(&self, r: f64) -> Result<f64> {
        if self.spec.is_empty() {
            return Ok(1.0);
        }
        if self.spec.n == 0 && self.spec.m == self.spec.q() {
            return densities::mellin_moment(&self.spec, r);
        }
        let num = self.spec.kernel_real(r + 1.0)?;
        let den = self.spec.kernel_real(1.0)?;
        Ok(num / den * math::pow(self.spec.c, -r))
    }

    /// Whether [`FoxHVariate::sample`] is available.
    pub fn samplable(&self) -> bool {
        self.recipe.is_some()
    }

    /// `n` draws from stream 0 of `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        self.sample_stream(n, seed, 0)
    }

    /// `n` draws from an independent stream derived from `seed`.
    pub fn sample_stream(&self, n: usize, seed: u64, stream: u64) -> Result<Vec<f64>> {
        let recipe = self.recipe.as_ref().ok_or_else(|| {
            Error::Shape("only variates built from class members can be sampled".into())
        })?;
        let samplers = recipe
            .iter()
            .map(|(cs, p)| Ok((Sampler::new(cs)?, *p)))
            .collect::<Result<Vec<_>>>()?;
        let mut rng = stream_rng(seed, stream);
        Ok((0..n)
            .map(|_| {
                samplers
                    .iter()
                    .map(|(s, p)| math::pow(s.draw(&mut rng), *p))
                    .product()
            })
            .collect())
    }
}

/// The point mass at 1, `H^{0,0}_{0,0}`.
pub fn identity_variate() -> FoxHVariate {
    FoxHVariate {
        spec: FoxHSpec::empty(),
        k_value: 1.0,
        support: Support::PointAtOne,
        recipe: Some(Vec::new()),
    }
}

fn merge(a: &[ParamPair], ka: usize, b: &[ParamPair], kb: usize) -> Vec<ParamPair> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(&a[..ka]);
    out.extend_from_slice(&b[..kb]);
    out.extend_from_slice(&a[ka..]);
    out.extend_from_slice(&b[kb..]);
    out
}

/// Law of `X1 X2` for independent `X1`, `X2`.
pub fn product(v1: &FoxHVariate, v2: &FoxHVariate) -> FoxHVariate {
    let (s1, s2) = (&v1.spec, &v2.spec);
    let spec = FoxHSpec {
        m: s1.m + s2.m,
        n: s1.n + s2.n,
        upper: merge(&s1.upper, s1.n, &s2.upper, s2.n),
        lower: merge(&s1.lower, s1.m, &s2.lower, s2.m),
        c: s1.c * s2.c,
    };
    let support = match (v1.support, v2.support) {
        (Support::PointAtOne, s) | (s, Support::PointAtOne) => s,
        (Support::UnitInterval, Support::UnitInterval) => Support::UnitInterval,
        _ => Support::PositiveHalfLine,
    };
    let recipe = match (&v1.recipe, &v2.recipe) {
        (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
        _ => None,
    };
    FoxHVariate {
        spec,
        k_value: v1.k_value * v2.k_value,
        support,
        recipe,
    }
}

/// Law of `X^power`.
pub fn power(v: &FoxHVariate, power: f64) -> Result<FoxHVariate> {
    if !(power.is_finite() && power != 0.0) {
        return Err(Error::Domain(format!("power must be finite and nonzero, got {power}")));
    }
    if v.is_identity() {
        return Ok(v.clone());
    }
    let s = &v.spec;
    let spec = if power > 0.0 {
        let map = |p: &ParamPair| ParamPair::new(p.shift + p.scale * (1.0 - power), p.scale * power);
        FoxHSpec {
            m: s.m,
            n: s.n,
            upper: s.upper.iter().map(map).collect(),
            lower: s.lower.iter().map(map).collect(),
            c: math::pow(s.c, power),
        }
    } else {
        // Gamma(x + y (1 - |P| s')) turns into the opposite-side factor
        // Gamma(1 - (1 - x - y - y|P|) - y|P| s').
        let q = -power;
        let map = |p: &ParamPair| ParamPair::new(1.0 - p.shift - p.scale - p.scale * q, p.scale * q);
        FoxHSpec {
            m: s.n,
            n: s.m,
            upper: s.lower.iter().map(map).collect(),
            lower: s.upper.iter().map(map).collect(),
            c: math::pow(s.c, power),
        }
    };
    let support = match v.support {
        Support::UnitInterval if power > 0.0 => Support::UnitInterval,
        _ => Support::PositiveHalfLine,
    };
    Ok(FoxHVariate {
        spec,
        k_value: v.k_value * math::pow(s.c, 1.0 - power),
        support,
        recipe: v
            .recipe
            .as_ref()
            .map(|r| r.iter().map(|(cs, p)| (cs.clone(), p * power)).collect()),
    })
}

/// ChaCha8 stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `n` independent draws from a class member.
pub fn sample(cs: &ClassSpec, n: usize, seed: u64) -> Result<Vec<f64>> {
    sample_stream(cs, n, seed, 0)
}

/// As [`sample`], on an independent stream derived from `seed`.
pub fn sample_stream(cs: &ClassSpec, n: usize, seed: u64, stream: u64) -> Result<Vec<f64>> {
    let sampler = Sampler::new(cs)?;
    let mut rng = stream_rng(seed, stream);
    Ok((0..n).map(|_| sampler.draw(&mut rng)).collect())
}

/// A uniform in the open interval (0, 1).
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// `M_beta` draw: `S^{-beta}` for a one-sided stable `S` with Laplace
/// transform `exp(-s^beta)`, written through Kanter's representation.
pub fn mwright_draw<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    let u = PI * open_unit(rng);
    let e: f64 = Exp1.sample(rng);
    if beta == 0.0 {
        return e;
    }
    let a = math::pow(math::sin(beta * u), beta / (1.0 - beta)) * math::sin((1.0 - beta) * u)
        / math::pow(math::sin(u), 1.0 / (1.0 - beta));
    math::pow(e / a, 1.0 - beta)
}

enum Draw {
    Gamma { dist: Gamma<f64>, eta: f64 },
    Beta { dist: Beta<f64>, eta: f64 },
    /// `W^exponent` with `W ~ M_beta`.
    Wright { beta: f64, exponent: f64 },
    Table(CdfTable),
}

impl Draw {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Draw::Gamma { dist, eta } => math::pow(dist.sample(rng), *eta),
            Draw::Beta { dist, eta } => math::pow(dist.sample(rng), *eta),
            Draw::Wright { beta, exponent } => math::pow(mwright_draw(*beta, rng), *exponent),
            Draw::Table(t) => t.draw(rng),
        }
    }
}

/// Draws a class member as a product of independent factor draws.
pub struct Sampler {
    factors: Vec<Draw>,
}

impl Sampler {
    pub fn new(cs: &ClassSpec) -> Result<Self> {
        let bad = |e: &dyn core::fmt::Display| Error::InvalidClassParams(format!("{e}"));
        let mut factors = Vec::new();
        for f in cs.beta_block() {
            factors.push(Draw::Beta {
                dist: Beta::new(f.e + f.eta, f.b).map_err(|e| bad(&e))?,
                eta: f.eta,
            });
        }
        for f in cs.gamma_block() {
            factors.push(Draw::Gamma {
                dist: Gamma::new(f.e + f.eta, 1.0).map_err(|e| bad(&e))?,
                eta: f.eta,
            });
        }
        for f in cs.wright_block() {
            let exponent = f.alpha * f.gamma;
            if (f.a + f.alpha - 1.0).abs() <= 1e-12 {
                factors.push(Draw::Wright {
                    beta: f.beta,
                    exponent,
                });
            } else {
                factors.push(Draw::Table(CdfTable::new(f)?));
            }
        }
        Ok(Self { factors })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.factors.iter().map(|d| d.draw(rng)).product()
    }
}

/// Cells of the tabulated inverse CDF.
const TABLE_CELLS: usize = 2048;

/// Inverse-CDF sampler on a tabulated CDF in the variable `u = ln x`.
/// Below the table the CDF follows the leading power law `x^kappa`.
struct CdfTable {
    u_lo: f64,
    width: f64,
    kappa: f64,
    /// Cumulative mass at cell edges, starting with the mass below `u_lo`.
    cdf: Vec<f64>,
}

impl CdfTable {
    fn new(f: &WrightFactor) -> Result<Self> {
        let cs = ClassSpec::new(ClassTag::C4, Vec::new(), Vec::new(), alloc::vec![*f])?;
        let built = build_class(&cs)?;
        let opts = EvalOptions::default();
        let mass = |u: f64| -> Result<f64> {
            let x = math::exp(u);
            Ok(densities::density_of(&built, x, &opts)? * x)
        };
        // leading left pole -c / (alpha gamma)
        let kappa = f.c() / (f.alpha * f.gamma);
        let center = math::ln(densities::moment(&cs, 1)?);
        let mut u_hi = center;
        while mass(u_hi)? > 1e-18 && u_hi < center + 200.0 {
            u_hi += 0.5;
        }
        let mut u_lo = center;
        while mass(u_lo)? / kappa > 1e-13 && u_lo > center - 200.0 {
            u_lo -= 0.5;
        }
        let width = (u_hi - u_lo) / TABLE_CELLS as f64;
        let mut cdf = Vec::with_capacity(TABLE_CELLS + 1);
        let mut acc = mass(u_lo)? / kappa;
        cdf.push(acc);
        for i in 0..TABLE_CELLS {
            let a = u_lo + width * i as f64;
            acc += quad::integrate(&mass, a, a + width, 1e-17, 1e-10)?.value;
            cdf.push(acc);
        }
        for v in &mut cdf {
            *v /= acc;
        }
        Ok(Self {
            u_lo,
            width,
            kappa,
            cdf,
        })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let p = open_unit(rng);
        let below = self.cdf[0];
        if p < below {
            return math::exp(self.u_lo) * math::pow(p / below, 1.0 / self.kappa);
        }
        let i = self.cdf.partition_point(|&v| v <= p).clamp(1, self.cdf.len() - 1);
        let (f0, f1) = (self.cdf[i - 1], self.cdf[i]);
        let t = if f1 > f0 { (p - f0) / (f1 - f0) } else { 0.5 };
        math::exp(self.u_lo + self.width * ((i - 1) as f64 + t))
    }
}
