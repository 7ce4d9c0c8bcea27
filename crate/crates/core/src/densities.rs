//! The eight families C0..C7 of Fox-H densities with all moments finite.
//!
//! Every family is a product of three kinds of independent factors:
//! stretched gamma (`gamma_block`), stretched beta (`beta_block`) and
//! generalized M-Wright (`wright_block`). The built spec is
//! `H^{q,0}_{p,q}` with lower pairs ordered beta, gamma, wright and upper
//! pairs ordered beta, wright.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::eval::{self, EvalOptions, EvalReport, Method};
use crate::gamma;
use crate::math::{self, CompensatedSum};
use crate::quad;
use crate::spec::{DerivedParams, FoxHSpec, ParamPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassTag {
    C0,
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
}

impl ClassTag {
    pub const ALL: [ClassTag; 8] = [
        ClassTag::C0,
        ClassTag::C1,
        ClassTag::C2,
        ClassTag::C3,
        ClassTag::C4,
        ClassTag::C5,
        ClassTag::C6,
        ClassTag::C7,
    ];

    /// Which blocks are present: (gamma, beta, wright).
    pub fn blocks(self) -> (bool, bool, bool) {
        match self {
            ClassTag::C0 => (false, false, false),
            ClassTag::C1 => (true, false, false),
            ClassTag::C2 => (false, true, false),
            ClassTag::C3 => (true, true, false),
            ClassTag::C4 => (false, false, true),
            ClassTag::C5 => (true, false, true),
            ClassTag::C6 => (false, true, true),
            ClassTag::C7 => (true, true, true),
        }
    }

    fn from_blocks(g: bool, b: bool, w: bool) -> Self {
        ClassTag::ALL
            .into_iter()
            .find(|t| t.blocks() == (g, b, w))
            .expect("all eight combinations are tagged")
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ClassTag::C0 => "C0",
            ClassTag::C1 => "C1",
            ClassTag::C2 => "C2",
            ClassTag::C3 => "C3",
            ClassTag::C4 => "C4",
            ClassTag::C5 => "C5",
            ClassTag::C6 => "C6",
            ClassTag::C7 => "C7",
        }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ClassTag::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidClassParams(format!("unknown class tag {s:?}")))
    }
}

/// `X^eta` with `X ~ Gamma(e + eta)`: lower pair `(e, eta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFactor {
    pub e: f64,
    pub eta: f64,
}

/// `X^eta` with `X ~ Beta(e + eta, b)`: upper `(e + b, eta)`, lower `(e, eta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaFactor {
    pub e: f64,
    pub eta: f64,
    pub b: f64,
}

/// Generalized M-Wright factor: upper `(1 - beta + beta c, alpha beta gamma)`,
/// lower `(c, alpha gamma)` with `c = a - alpha gamma + alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrightFactor {
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl WrightFactor {
    pub fn c(&self) -> f64 {
        self.a - self.alpha * self.gamma + self.alpha
    }
}

/// A validated member of one of the eight classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSpec {
    tag: ClassTag,
    gamma_block: Vec<GammaFactor>,
    beta_block: Vec<BetaFactor>,
    wright_block: Vec<WrightFactor>,
}

impl ClassSpec {
    /// Checks the tag against the blocks and every sign condition.
    pub fn new(
        tag: ClassTag,
        gamma_block: Vec<GammaFactor>,
        beta_block: Vec<BetaFactor>,
        wright_block: Vec<WrightFactor>,
    ) -> Result<Self> {
        let present = (
            !gamma_block.is_empty(),
            !beta_block.is_empty(),
            !wright_block.is_empty(),
        );
        if present != tag.blocks() {
            let (g, b, w) = tag.blocks();
            let want = |on: bool| if on { "non-empty" } else { "empty" };
            return Err(Error::InvalidClassParams(format!(
                "{tag} needs gamma_block {}, beta_block {}, wright_block {}",
                want(g),
                want(b),
                want(w)
            )));
        }
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidClassParams(format!("{what} = {v} is not finite")))
            }
        };
        for (i, g) in gamma_block.iter().enumerate() {
            finite(g.e, "e")?;
            finite(g.eta, "η")?;
            if !(g.eta > 0.0) {
                return Err(Error::InvalidClassParams(format!(
                    "gamma_block[{i}]: η must be > 0 (got {})",
                    g.eta
                )));
            }
            if !(g.e + g.eta > 0.0) {
                return Err(Error::InvalidClassParams(format!(
                    "gamma_block[{i}]: e+η must be > 0 (got {})",
                    g.e + g.eta
                )));
            }
        }
        for (i, b) in beta_block.iter().enumerate() {
            finite(b.e, "e")?;
            finite(b.eta, "η")?;
            finite(b.b, "b")?;
            if !(b.eta > 0.0) {
                return Err(Error::InvalidClassParams(format!(
                    "beta_block[{i}]: η must be > 0 (got {})",
                    b.eta
                )));
            }
            if !(b.e + b.eta > 0.0) {
                return Err(Error::InvalidClassParams(format!(
                    "beta_block[{i}]: e+η must be > 0 (got {})",
                    b.e + b.eta
                )));
            }
            if !(b.b > 0.0) {
                return Err(Error::InvalidClassParams(format!(
                    "beta_block[{i}]: b must be > 0 (got {})",
                    b.b
                )));
            }
        }
        for (k, w) in wright_block.iter().enumerate() {
            finite(w.a, "a")?;
            finite(w.alpha, "α")?;
            finite(w.beta, "β")?;
            finite(w.gamma, "γ")?;
            if !(w.alpha > 0.0) {
                return Err(Error::InvalidClassParams(format!(
                    "wright_block[{k}]: α must be > 0 (got {})",
                    w.alpha
                )));
            }
            if !(w.beta > 0.0 && w.beta < 1.0) {
                return Err(Error::InvalidClassParams(format!(
                    "wright_block[{k}]: β_k ∈ (0,1) required (got {})",
                    w.beta
                )));
            }
            if !(w.gamma > 0.0) {
                return Err(Error::InvalidClassParams(format!(
                    "wright_block[{k}]: γ must be > 0 (got {})",
                    w.gamma
                )));
            }
            if !(w.a + w.alpha > 0.0) {
                return Err(Error::InvalidClassParams(format!(
                    "wright_block[{k}]: a+α must be > 0 (got {})",
                    w.a + w.alpha
                )));
            }
        }
        Ok(Self {
            tag,
            gamma_block,
            beta_block,
            wright_block,
        })
    }

    /// Like [`ClassSpec::new`] with the tag read off the non-empty blocks.
    pub fn from_blocks(
        gamma_block: Vec<GammaFactor>,
        beta_block: Vec<BetaFactor>,
        wright_block: Vec<WrightFactor>,
    ) -> Result<Self> {
        let tag = ClassTag::from_blocks(
            !gamma_block.is_empty(),
            !beta_block.is_empty(),
            !wright_block.is_empty(),
        );
        Self::new(tag, gamma_block, beta_block, wright_block)
    }

    /// The degenerate class: the point mass at 1.
    pub fn c0() -> Self {
        Self {
            tag: ClassTag::C0,
            gamma_block: Vec::new(),
            beta_block: Vec::new(),
            wright_block: Vec::new(),
        }
    }

    pub fn tag(&self) -> ClassTag {
        self.tag
    }
    pub fn gamma_block(&self) -> &[GammaFactor] {
        &self.gamma_block
    }
    pub fn beta_block(&self) -> &[BetaFactor] {
        &self.beta_block
    }
    pub fn wright_block(&self) -> &[WrightFactor] {
        &self.wright_block
    }
}

/// Generalized M-Wright density with kernel `Gamma(a + alpha s) / Gamma(1 - beta + beta a + beta alpha s)`,
/// i.e. the C4 member with a single factor and `gamma = 1`.
pub fn generalized_mwright(a: f64, alpha: f64, beta: f64) -> Result<ClassSpec> {
    ClassSpec::new(
        ClassTag::C4,
        Vec::new(),
        Vec::new(),
        alloc::vec![WrightFactor {
            a,
            alpha,
            beta,
            gamma: 1.0
        }],
    )
}

/// Where a density lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    PositiveHalfLine,
    /// Vanishes for `x >= 1`.
    UnitInterval,
    /// The point mass at 1 (no density function).
    PointAtOne,
}

impl Support {
    pub fn as_str(self) -> &'static str {
        match self {
            Support::PositiveHalfLine => "positive-half-line",
            Support::UnitInterval => "unit-interval",
            Support::PointAtOne => "point-at-one",
        }
    }

    /// Support of `H/K` read off the structure of a density spec: zero scale
    /// balance with unit scale product means the function vanishes beyond 1.
    pub fn of_spec(spec: &FoxHSpec) -> Self {
        if spec.is_empty() {
            return Support::PointAtOne;
        }
        let d = spec.derive_params();
        let tiny = 1e-14 * (spec.p() + spec.q()) as f64;
        if spec.n == 0 && d.scale_balance.abs() <= tiny && (d.scale_product - 1.0).abs() <= 1e-12 {
            Support::UnitInterval
        } else {
            Support::PositiveHalfLine
        }
    }
}

/// Normalizing constant `K = kernel(1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization {
    pub k_value: f64,
}

/// A class member turned into a concrete spec.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassDensity {
    pub spec: FoxHSpec,
    pub normalization: Normalization,
    pub support: Support,
}

/// Assembles the parameter layout and normalizing constant of a class member.
pub fn build_class(cs: &ClassSpec) -> Result<ClassDensity> {
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    let mut ln_k = 0.0;
    for f in &cs.beta_block {
        upper.push(ParamPair::new(f.e + f.b, f.eta));
        lower.push(ParamPair::new(f.e, f.eta));
        ln_k += ln_gamma_pos(f.e + f.eta)? - ln_gamma_pos(f.e + f.b + f.eta)?;
    }
    for f in &cs.gamma_block {
        lower.push(ParamPair::new(f.e, f.eta));
        ln_k += ln_gamma_pos(f.e + f.eta)?;
    }
    for f in &cs.wright_block {
        let c = f.c();
        let ag = f.alpha * f.gamma;
        upper.push(ParamPair::new(1.0 - f.beta + f.beta * c, ag * f.beta));
        lower.push(ParamPair::new(c, ag));
        ln_k += ln_gamma_pos(f.a + f.alpha)?
            - ln_gamma_pos(1.0 - f.beta + f.beta * f.a + f.beta * f.alpha)?;
    }
    let q = lower.len();
    let spec = FoxHSpec::new(q, 0, upper, lower)?;
    let support = Support::of_spec(&spec);
    Ok(ClassDensity {
        spec,
        normalization: Normalization {
            k_value: math::exp(ln_k),
        },
        support,
    })
}

fn ln_gamma_pos(x: f64) -> Result<f64> {
    let (lg, sign) = gamma::ln_gamma_real(x)?;
    if sign < 0.0 {
        return Err(Error::InvalidClassParams(format!(
            "Gamma({x}) is negative; class constants need positive arguments"
        )));
    }
    Ok(lg)
}

/// Density value `H(x)/K`, or 0 outside a bounded support.
pub fn density_eval(cs: &ClassSpec, x: f64) -> Result<f64> {
    let built = build_class(cs)?;
    density_of(&built, x, &EvalOptions::default())
}

/// Density of an already built class member.
pub fn density_of(built: &ClassDensity, x: f64, opts: &EvalOptions) -> Result<f64> {
    eval::check_argument(x)?;
    match built.support {
        Support::PointAtOne => Err(Error::Domain(
            "C0 is the point mass at 1 and has no density function".into(),
        )),
        Support::UnitInterval if x >= 1.0 => Ok(0.0),
        _ => Ok(eval::evaluate(&built.spec, x, opts)?.value / built.normalization.k_value),
    }
}

/// `E[X^l] = kernel(l + 1) / kernel(1)`.
pub fn moment(cs: &ClassSpec, l: u32) -> Result<f64> {
    mellin_moment(&build_class(cs)?.spec, l as f64)
}

/// `E[X^r]` for real `r` with `r > -(min shift/scale) - 1`, computed as a
/// product of per-factor gamma ratios so that `r = 0` gives exactly 1.
pub fn mellin_moment(spec: &FoxHSpec, r: f64) -> Result<f64> {
    if spec.n != 0 || spec.m != spec.q() {
        return Err(Error::Shape("moments need an H^{q,0}_{p,q} density spec".into()));
    }
    let mut ln_m = 0.0;
    let mut sign = 1.0;
    for p in &spec.lower {
        let (a, sa) = gamma::ln_gamma_real(p.shift + p.scale * (r + 1.0))?;
        let (b, sb) = gamma::ln_gamma_real(p.shift + p.scale)?;
        ln_m += a - b;
        sign *= sa * sb;
    }
    for p in &spec.upper {
        let (a, sa) = gamma::ln_gamma_real(p.shift + p.scale * (r + 1.0))?;
        let (b, sb) = gamma::ln_gamma_real(p.shift + p.scale)?;
        ln_m -= a - b;
        sign *= sa * sb;
    }
    Ok(sign * math::exp(ln_m) * math::pow(spec.c, -r))
}

/// How a Laplace-transform value was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceReport {
    pub value: f64,
    pub method: Method,
    /// Estimated relative error of `value`.
    pub rel_error: f64,
    pub warnings: Vec<String>,
}

/// `phi(s) = int e^{-sx} density(x) dx`.
pub fn laplace_transform(cs: &ClassSpec, s: f64) -> Result<f64> {
    laplace_report(cs, s).map(|r| r.value)
}

/// Generalized Wright series first; if it diverges or cancels, the Fox-H
/// evaluator on the transform's own spec.
pub fn laplace_report(cs: &ClassSpec, s: f64) -> Result<LaplaceReport> {
    let built = build_class(cs)?;
    let mut rep = laplace_of(&built, s, &EvalOptions::default())?;
    if !cs.beta_block.is_empty() {
        let sum_b: f64 = cs.beta_block.iter().map(|b| b.b).sum();
        if sum_b <= 1.0 {
            rep.warnings.push(format!(
                "sum of beta exponents b = {sum_b} <= 1: outside the range where the series theorem asserts complete monotonicity"
            ));
        }
    }
    Ok(rep)
}

/// Laplace transform of an already built density.
pub fn laplace_of(built: &ClassDensity, s: f64, opts: &EvalOptions) -> Result<LaplaceReport> {
    if !s.is_finite() {
        return Err(Error::Domain(format!("s={s}")));
    }
    let warnings = Vec::new();
    if built.support == Support::PointAtOne {
        return Ok(LaplaceReport {
            value: math::exp(-s),
            method: Method::Exact,
            rel_error: f64::EPSILON,
            warnings,
        });
    }
    let k = built.normalization.k_value;
    let (upper, lower) = wright_pairs(&built.spec);
    let wright = eval::wright_series(&upper, &lower, -s, opts);
    let last_err = match wright {
        Ok(rep) => {
            let err = series_rel_error(&rep);
            if err <= 1e-10 || s <= 0.0 {
                return Ok(LaplaceReport {
                    value: rep.value / k,
                    method: Method::WrightSeries,
                    rel_error: err,
                    warnings,
                });
            }
            Error::NoConvergence {
                terms: rep.terms,
                last_term: rep.max_term,
            }
        }
        Err(e) => e,
    };
    if s <= 0.0 {
        return Err(last_err);
    }
    let lt = built.spec.lt_spec()?;
    let rep = eval::evaluate(&lt, s, opts)?;
    let value = rep.value / (k * built.spec.c);
    let rel = match rep.method {
        Method::MellinBarnes => {
            (rep.tail_bound + rep.imag_residual.abs()).max(1e-12 * rep.value.abs()) / rep.value.abs()
        }
        _ => series_rel_error(&rep).max(1e-14),
    };
    Ok(LaplaceReport {
        value,
        method: rep.method,
        rel_error: rel,
        warnings,
    })
}

fn series_rel_error(rep: &EvalReport) -> f64 {
    if rep.value == 0.0 {
        return f64::INFINITY;
    }
    (rep.cancellation_error() + rep.tail_bound).max(f64::EPSILON * rep.value.abs()) / rep.value.abs()
}

/// Pairs of the Wright series `sum kernel(k+1) z^k / k!`.
pub fn wright_pairs(spec: &FoxHSpec) -> (Vec<ParamPair>, Vec<ParamPair>) {
    let shift = |p: &ParamPair| ParamPair::new(p.shift + p.scale, p.scale);
    (
        spec.lower.iter().map(shift).collect(),
        spec.upper.iter().map(shift).collect(),
    )
}

/// Closed-form structural constants of the Laplace transform's spec.
pub fn class_lt_params(cs: &ClassSpec) -> DerivedParams {
    let shrink: f64 = cs.gamma_block.iter().map(|g| g.eta).sum::<f64>()
        + cs
            .wright_block
            .iter()
            .map(|w| w.alpha * w.gamma * (1.0 - w.beta))
            .sum::<f64>();
    let ln_delta = -cs.gamma_block.iter().map(|g| g.eta * math::ln(g.eta)).sum::<f64>()
        + cs
            .wright_block
            .iter()
            .map(|w| {
                let ag = w.alpha * w.gamma;
                ag * (w.beta - 1.0) * math::ln(ag) + ag * w.beta * math::ln(w.beta)
            })
            .sum::<f64>();
    let m = cs.gamma_block.len() as f64;
    let mu = cs.gamma_block.iter().map(|g| g.e + g.eta).sum::<f64>()
        - cs.beta_block.iter().map(|b| b.b).sum::<f64>()
        + cs
            .wright_block
            .iter()
            .map(|w| (w.beta - 1.0) * (1.0 - w.a - w.alpha))
            .sum::<f64>()
        - (m + 1.0) / 2.0;
    DerivedParams {
        sector_width: 1.0 + shrink,
        sector_lower: 1.0,
        sector_upper: shrink,
        scale_balance: 1.0 - shrink,
        scale_product: math::exp(ln_delta),
        exponent_shift: mu,
    }
}

/// One sign failure of `(-1)^k phi^(k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityViolation {
    pub s: f64,
    pub order: usize,
    /// `(-1)^k` times the estimated derivative.
    pub signed_derivative: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub grid: Vec<f64>,
    pub max_order: usize,
    pub violations: Vec<MonotonicityViolation>,
    /// Smallest `signed_derivative + tolerance` seen, normalized by `phi(s)`.
    pub worst_margin: f64,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Finite-difference sign check of `(-1)^k phi^(k)(s) >= 0` for `k <= max_order`.
pub fn check_complete_monotonicity(
    cs: &ClassSpec,
    grid: &[f64],
    max_order: usize,
) -> Result<MonotonicityReport> {
    let built = build_class(cs)?;
    let entire = class_lt_params(cs).scale_balance > 1e-12;
    let opts = EvalOptions::default();
    let noise = |s: f64| -> Result<f64> {
        Ok(laplace_of(&built, s, &opts)?.rel_error.max(1e-14))
    };
    check_complete_monotonicity_with(
        |s| Ok(laplace_of(&built, s, &opts)?.value),
        noise,
        entire,
        grid,
        max_order,
    )
}

/// [`check_complete_monotonicity`] for an arbitrary function. `noise(s)` is
/// its relative accuracy near `s`; `entire` allows stencils reaching `s <= 0`.
pub fn check_complete_monotonicity_with<F, N>(
    mut f: F,
    mut noise: N,
    entire: bool,
    grid: &[f64],
    max_order: usize,
) -> Result<MonotonicityReport>
where
    F: FnMut(f64) -> Result<f64>,
    N: FnMut(f64) -> Result<f64>,
{
    if max_order > 8 {
        return Err(Error::Domain(format!("max_order {max_order} exceeds 8")));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) || grid.iter().any(|s| !s.is_finite()) {
        return Err(Error::Domain("grid must be finite and strictly increasing".into()));
    }
    if !entire && grid.iter().any(|&s| s <= 0.0) {
        return Err(Error::Domain("grid must be positive for a non-entire transform".into()));
    }
    let mut violations = Vec::new();
    let mut worst = f64::INFINITY;
    for &s in grid {
        let eps = noise(s)?;
        let f0 = f(s)?;
        let scale = f0.abs().max(f64::MIN_POSITIVE);
        let tol0 = 4.0 * eps * scale;
        worst = worst.min((f0 + tol0) / scale);
        if f0 < -tol0 {
            violations.push(MonotonicityViolation {
                s,
                order: 0,
                signed_derivative: f0,
                tolerance: tol0,
            });
        }
        for k in 1..=max_order {
            let (d, tol) = derivative(&mut f, s, k, eps, entire)?;
            let signed = if k % 2 == 0 { d } else { -d };
            worst = worst.min((signed + tol) / scale);
            if signed < -tol {
                violations.push(MonotonicityViolation {
                    s,
                    order: k,
                    signed_derivative: signed,
                    tolerance: tol,
                });
            }
        }
    }
    Ok(MonotonicityReport {
        grid: grid.to_vec(),
        max_order,
        violations,
        worst_margin: worst,
    })
}

/// k-th derivative by finite differences with one Richardson step.
/// Returns the estimate and an error bound covering truncation and noise.
fn derivative<F>(f: &mut F, s: f64, k: usize, eps: f64, entire: bool) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let kf = k as f64;
    let scale = s.max(1.0);
    let central_h = (1e-3f64)
        .max(1e-2 * s)
        .max(math::pow(math::pow(2.0, kf) * eps, 1.0 / (kf + 4.0)) * scale);
    let central = entire || s - kf * central_h / 2.0 > 0.0;
    let h = if central {
        central_h
    } else {
        (1e-3f64)
            .max(1e-2 * s)
            .max(math::pow(math::pow(2.0, kf) * eps, 1.0 / (kf + 2.0)) * scale)
    };
    let mut fmax = 0.0f64;
    let mut diff = |h: f64, fmax: &mut f64| -> Result<f64> {
        let mut acc = CompensatedSum::new();
        let mut binom = 1.0;
        for i in 0..=k {
            let x = if central {
                s + (kf / 2.0 - i as f64) * h
            } else {
                s + (kf - i as f64) * h
            };
            let v = f(x)?;
            *fmax = fmax.max(v.abs());
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            acc.add(sign * binom * v);
            binom = binom * (kf - i as f64) / (i as f64 + 1.0);
        }
        Ok(acc.value() / math::pow(h, kf))
    };
    let coarse = diff(h, &mut fmax)?;
    let fine = diff(h / 2.0, &mut fmax)?;
    let (est, gain) = if central {
        ((4.0 * fine - coarse) / 3.0, 5.0 / 3.0)
    } else {
        (2.0 * fine - coarse, 3.0)
    };
    let roundoff = gain * math::pow(2.0, kf) * eps * fmax / math::pow(h / 2.0, kf);
    let truncation = (fine - coarse).abs();
    Ok((est, truncation + roundoff))
}

/// Integrates `g(x) * density(x)` over the support. Used to cross-check
/// normalization, moments and Laplace transforms against the closed forms.
pub fn integrate_density<G>(built: &ClassDensity, mut g: G, rel_tol: f64) -> Result<f64>
where
    G: FnMut(f64) -> f64,
{
    let opts = EvalOptions::default();
    if built.support == Support::PointAtOne {
        return Ok(g(1.0));
    }
    let ratios = built.spec.lower.iter().map(|p| p.shift / p.scale);
    let rho = ratios.fold(f64::INFINITY, f64::min);
    // mass below exp(lo) is ~ exp(lo (rho + 1)), kept under 1e-16
    let lo = (-37.0 / (rho + 1.0)).max(-700.0);
    let mut total = 0.0;
    match built.support {
        Support::UnitInterval => {
            let half = -math::LN_2;
            total += quad::integrate_log(
                |x| Ok(g(x) * density_of(built, x, &opts)?),
                lo,
                half,
                1e-15,
                rel_tol,
            )?
            .value;
            // x = 1 - e^v near the right end
            total += quad::integrate(
                |v| {
                    let t = math::exp(v);
                    let x = 1.0 - t;
                    Ok(g(x) * density_of(built, x, &opts)? * t)
                },
                -60.0,
                half,
                1e-15,
                rel_tol,
            )?
            .value;
        }
        _ => {
            total += quad::integrate_log(
                |x| Ok(g(x) * density_of(built, x, &opts)?),
                lo,
                0.0,
                1e-15,
                rel_tol,
            )?
            .value;
            // walk right until the integrand is negligible over a doubling
            let mut a = 1.0f64;
            let mut quiet = 0;
            while quiet < 2 && a < 1e8 {
                let b = 2.0 * a;
                let piece = quad::integrate_log(
                    |x| Ok(g(x) * density_of(built, x, &opts)?),
                    math::ln(a),
                    math::ln(b),
                    1e-17,
                    rel_tol,
                )?
                .value;
                total += piece;
                if piece.abs() <= 1e-16 * total.abs().max(1e-300) {
                    quiet += 1;
                } else {
                    quiet = 0;
                }
                a = b;
            }
        }
    }
    Ok(total)
}

/// `phi(s)` with the `k`-th series term sign-flipped; a deliberately wrong
/// transform for exercising the monotonicity check.
pub fn corrupted_laplace(cs: &ClassSpec, s: f64, flipped: u32) -> Result<f64> {
    let phi = laplace_transform(cs, s)?;
    let mut fact = 1.0;
    for i in 1..=flipped {
        fact *= i as f64;
    }
    let term = moment(cs, flipped)? * math::pow(-s, flipped as f64) / fact;
    Ok(phi - 2.0 * term)
}

impl fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag)?;
        let mut parts: Vec<String> = Vec::new();
        for g in &self.gamma_block {
            parts.push(format!("gamma(e={}, η={})", g.e, g.eta));
        }
        for b in &self.beta_block {
            parts.push(format!("beta(e={}, η={}, b={})", b.e, b.eta, b.b));
        }
        for w in &self.wright_block {
            parts.push(format!(
                "wright(a={}, α={}, β={}, γ={})",
                w.a, w.alpha, w.beta, w.gamma
            ));
        }
        if !parts.is_empty() {
            write!(f, " {}", parts.join(" "))?;
        }
        Ok(())
    }
}
