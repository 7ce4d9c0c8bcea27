//! Non-negativity certification through integral decompositions.
//!
//! A spec is rewritten as nested Mellin-type integrals
//! `int_0^inf t^{eta-1} F[x t^{-/+sigma}] G[t] dt` whose integrands have no
//! upper (procedure A steps 1 and 3) or no lower (step 2) parameter pairs.
//! When every leaf is non-negative so is the original function.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cell::Cell;

use crate::densities::{build_class, ClassSpec};
use crate::error::{Error, Result};
use crate::eval::{self, EvalOptions};
use crate::math;
use crate::quad;
use crate::spec::{FoxHSpec, ParamPair};

/// Largest accepted difference between a matched pair and the original.
pub const MATCH_TOL: f64 = 1e-12;
/// Pairs equal within this are treated as a zero sector width.
const ZERO_WIDTH: f64 = 1e-12;

/// One rewriting step: pairs `(c_i, gamma_i)` with exponents `eta`, `sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepMatching {
    pub pairs: Vec<(f64, f64)>,
    pub eta: f64,
    pub sigma: f64,
}

/// A rewriting of a spec's parameters for procedure A or B.
///
/// Procedure A: `first` rewrites every upper pair as
/// `(c_i + eta gamma_i, sigma gamma_i)`; `lower_split` rewrites the first
/// `h` lower pairs as `(d_j + eta delta_j, sigma delta_j)`; `upper_split`
/// rewrites the first `g` pairs `(c_i, gamma_i)` as `(v_i + eta nu_i, sigma nu_i)`.
///
/// Procedure B: `first` rewrites every upper pair as
/// `(1 - d_i - eta delta_i, sigma delta_i)`; `lower_split` splits the
/// `H^{m,0}_{0,q}` factor and `upper_split` the `H^{M,0}_{0,Q}` factor, both
/// in the form of procedure A step 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    pub first: StepMatching,
    pub lower_split: Option<StepMatching>,
    pub upper_split: Option<StepMatching>,
}

impl Matching {
    pub fn new(first: StepMatching) -> Self {
        Self {
            first,
            lower_split: None,
            upper_split: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    A1,
    A2,
    A3,
    B1,
    /// Product of independent variates: `eta = 0`, `sigma = 1`.
    Product,
}

impl Step {
    pub fn as_str(self) -> &'static str {
        match self {
            Step::A1 => "A-1",
            Step::A2 => "A-2",
            Step::A3 => "A-3",
            Step::B1 => "B-1",
            Step::Product => "product",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafKind {
    /// `H^{m,0}_{0,q}` or `H^{0,N}_{P,0}` left over after splitting.
    Atomic,
    /// `H^{h,0}_{0,h}` or `H^{0,g}_{g,0}` split off in a second step.
    Auxiliary,
    /// A factor of a product whose sign is checked directly.
    Factor,
}

impl LeafKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LeafKind::Atomic => "atomic",
            LeafKind::Auxiliary => "auxiliary",
            LeafKind::Factor => "factor",
        }
    }
}

/// Sector widths across one decomposition edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub parent: f64,
    pub outer: f64,
    pub inner: f64,
    /// `parent - (outer + sigma inner)`.
    pub residual: f64,
    /// A zero width was accepted because the exponent shift is below -1.
    pub zero_width: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf { spec: FoxHSpec, kind: LeafKind },
    Integral(Box<Edge>),
}

/// `parent(x) = int_0^inf t^{eta-1} outer[x t^{-sigma}] inner[t] dt`, with
/// `x t^{+sigma}` for procedure B.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub step: Step,
    pub parent: FoxHSpec,
    pub eta: f64,
    pub sigma: f64,
    pub outer: Node,
    pub inner: Node,
    pub budget: Budget,
}

impl Edge {
    /// Exponent of `t` in the outer argument.
    pub fn outer_exponent(&self) -> f64 {
        if self.step == Step::B1 {
            self.sigma
        } else {
            -self.sigma
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub root: Node,
}

impl Node {
    pub fn spec(&self) -> &FoxHSpec {
        match self {
            Node::Leaf { spec, .. } => spec,
            Node::Integral(e) => &e.parent,
        }
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<(&'a FoxHSpec, LeafKind)>) {
        match self {
            Node::Leaf { spec, kind } => out.push((spec, *kind)),
            Node::Integral(e) => {
                e.outer.collect_leaves(out);
                e.inner.collect_leaves(out);
            }
        }
    }

    fn collect_edges<'a>(&'a self, out: &mut Vec<&'a Edge>) {
        if let Node::Integral(e) = self {
            out.push(e);
            e.outer.collect_edges(out);
            e.inner.collect_edges(out);
        }
    }

    /// Where a compactly supported leaf drops to zero, possibly with a jump.
    fn support_edge(&self) -> Option<f64> {
        match self {
            Node::Leaf { spec, .. } if !spec.is_empty() && spec.n == 0 => {
                let d = spec.derive_params();
                let balanced = d.scale_balance.abs() <= 1e-14 * (spec.p() + spec.q()) as f64;
                balanced.then(|| d.scale_product / spec.c)
            }
            _ => None,
        }
    }

    fn depth(&self) -> i32 {
        match self {
            Node::Leaf { .. } => 0,
            Node::Integral(e) => 1 + e.outer.depth().max(e.inner.depth()),
        }
    }

    /// Value at `x`; `abs_tol` is the absolute error the caller can absorb.
    fn value(&self, x: f64, opts: &EvalOptions, abs_tol: f64) -> Result<f64> {
        match self {
            Node::Leaf { spec, .. } => {
                let loose = EvalOptions { abs_tol, ..*opts };
                leaf_value(spec, x, &loose)
            }
            Node::Integral(e) => {
                let exponent = e.outer_exponent();
                let mut breaks = Vec::new();
                if let Some(r) = e.inner.support_edge() {
                    breaks.push(math::ln(r));
                }
                if let Some(r) = e.outer.support_edge() {
                    breaks.push((math::ln(r) - math::ln(x)) / exponent);
                }
                // the leaf side goes first so the nested side knows its slack
                let inner_first = matches!(e.inner, Node::Leaf { .. });
                convolve(
                    |t, slack| {
                        let y = x * math::pow(t, exponent);
                        let (first, second, a, b) = if inner_first {
                            (&e.inner, &e.outer, t, y)
                        } else {
                            (&e.outer, &e.inner, y, t)
                        };
                        let v = first.value(a, opts, 0.0)?;
                        if v == 0.0 {
                            return Ok(0.0);
                        }
                        Ok(v * second.value(b, opts, slack / v.abs())?)
                    },
                    e.eta,
                    &breaks,
                    // nested values carry the inner quadrature error
                    1e-8 * math::pow(10.0, (self.depth() - 1) as f64),
                    abs_tol,
                )
            }
        }
    }
}

impl Decomposition {
    /// A decomposition with nothing split off.
    pub fn leaf(spec: FoxHSpec, kind: LeafKind) -> Self {
        Self {
            root: Node::Leaf { spec, kind },
        }
    }

    pub fn leaves(&self) -> Vec<(&FoxHSpec, LeafKind)> {
        let mut out = Vec::new();
        self.root.collect_leaves(&mut out);
        out
    }

    pub fn edges(&self) -> Vec<&Edge> {
        let mut out = Vec::new();
        self.root.collect_edges(&mut out);
        out
    }

    /// Some edges passed on positive widths and others on the zero-width variant.
    pub fn mixed_budget(&self) -> bool {
        let edges: Vec<_> = self
            .edges()
            .into_iter()
            .filter(|e| e.step != Step::Product)
            .collect();
        edges.iter().any(|e| e.budget.zero_width) && edges.iter().any(|e| !e.budget.zero_width)
    }

    /// Value of the decomposed function at `x` by nested quadrature.
    pub fn recompose(&self, x: f64) -> Result<f64> {
        eval::check_argument(x)?;
        self.root.value(x, &EvalOptions::with_tol(1e-10), 0.0)
    }
}

fn leaf_value(spec: &FoxHSpec, x: f64, opts: &EvalOptions) -> Result<f64> {
    eval::check_argument(x)?;
    Ok(eval::evaluate(spec, x, opts)?.value)
}

/// `int_0^inf t^{eta-1} f(t) dt` in the variable `u = ln t`: panels of
/// width 2 grow outward from the largest sampled integrand until two in a
/// row are negligible on each side. Panels are split at `breaks` (in `u`),
/// where the integrand may jump.
fn convolve<F>(mut f: F, eta: f64, breaks: &[f64], rel_tol: f64, abs_tol: f64) -> Result<f64>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let slack = Cell::new(abs_tol);
    let mut g = |u: f64| -> Result<f64> {
        let w = math::exp(eta * u);
        let v = f(math::exp(u), slack.get() / w)?;
        Ok(if v == 0.0 { 0.0 } else { v * w })
    };
    let mut center = 0.0;
    let mut best = 0.0f64;
    // outward from u = 0 so that far, tiny samples can be computed loosely;
    // each side stops after three negligible samples
    for dir in [1.0, -1.0] {
        let mut faint = 0;
        let first = if dir > 0.0 { 0 } else { 1 };
        for k in first..=10 {
            let u = dir * k as f64;
            slack.set(abs_tol.max(1e-14 * best));
            let Ok(v) = g(u) else { continue };
            if v.abs() > best {
                best = v.abs();
                center = u;
            }
            if v.abs() <= 1e-16 * best {
                faint += 1;
                if faint == 3 {
                    break;
                }
            } else {
                faint = 0;
            }
        }
    }
    let noise = abs_tol.max(0.01 * rel_tol * best).max(1e-300);
    slack.set(0.1 * noise);
    let mut total = split_integrate(&mut g, center - 1.0, center + 1.0, noise, rel_tol, breaks)?;
    for dir in [-1.0, 1.0] {
        let mut edge = center + dir;
        let mut quiet = 0;
        let mut width = 2.0;
        while quiet < 2 && (edge - center).abs() < 300.0 {
            let next = edge + width * dir;
            width = (2.0 * width).min(32.0);
            let (a, b) = if dir > 0.0 { (edge, next) } else { (next, edge) };
            let floor = noise.max(0.01 * rel_tol * total.abs());
            slack.set(0.1 * floor);
            let piece = split_integrate(&mut g, a, b, floor, rel_tol, breaks)?;
            total += piece;
            if piece.abs() <= floor {
                quiet += 1;
            } else {
                quiet = 0;
            }
            edge = next;
        }
    }
    Ok(total)
}

fn split_integrate<F>(
    g: &mut F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    breaks: &[f64],
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&u| u > a && u < b).collect();
    cuts.sort_by(f64::total_cmp);
    let mut lo = a;
    let mut total = 0.0;
    for hi in cuts.into_iter().chain([b]) {
        total += quad::integrate(&mut *g, lo, hi, abs_tol, rel_tol)?.value;
        lo = hi;
    }
    Ok(total)
}

fn check_pairs(
    what: &str,
    target: &[ParamPair],
    matched: &[(f64, f64)],
    rebuild: impl Fn(f64, f64) -> (f64, f64),
) -> Result<()> {
    if target.len() != matched.len() {
        return Err(Error::BadMatching(format!(
            "{what}: {} pairs given for {} parameters",
            matched.len(),
            target.len()
        )));
    }
    for (i, (p, &(c, g))) in target.iter().zip(matched).enumerate() {
        let (a, alpha) = rebuild(c, g);
        let res = (a - p.shift).abs().max((alpha - p.scale).abs());
        if !(res <= MATCH_TOL * p.shift.abs().max(p.scale).max(1.0)) {
            return Err(Error::BadMatching(format!(
                "{what}: pair {i} rebuilds ({a}, {alpha}) for ({}, {}), residual {res:e}",
                p.shift, p.scale
            )));
        }
    }
    Ok(())
}

fn check_step(step: &StepMatching, what: &str) -> Result<()> {
    if !(step.sigma > 0.0 && step.sigma.is_finite()) {
        return Err(Error::Budget(format!("{what}: sigma = {} must be positive", step.sigma)));
    }
    if !step.eta.is_finite() {
        return Err(Error::BadMatching(format!("{what}: eta = {} is not finite", step.eta)));
    }
    if step.pairs.iter().any(|&(_, g)| !(g > 0.0)) {
        return Err(Error::BadMatching(format!("{what}: matched scales must be positive")));
    }
    Ok(())
}

fn pairs(v: &[(f64, f64)]) -> Vec<ParamPair> {
    v.iter().map(|&(a, b)| ParamPair::new(a, b)).collect()
}

fn spec_of(m: usize, n: usize, upper: Vec<ParamPair>, lower: Vec<ParamPair>) -> Result<FoxHSpec> {
    FoxHSpec::new(m, n, upper, lower)
}

/// Sector-width check on one edge: both factors need a positive width, or
/// a zero width with exponent shift below -1.
fn budget(step: Step, parent: &FoxHSpec, outer: &FoxHSpec, inner: &FoxHSpec, sigma: f64) -> Result<Budget> {
    let p = parent.derive_params().sector_width;
    let o = outer.derive_params();
    let i = inner.derive_params();
    let mut zero_width = false;
    for (name, d) in [("outer", &o), ("inner", &i)] {
        if d.sector_width > ZERO_WIDTH {
            continue;
        }
        if d.sector_width.abs() <= ZERO_WIDTH && d.exponent_shift < -1.0 {
            zero_width = true;
            continue;
        }
        return Err(Error::Budget(format!(
            "{}: {name} factor has sector width {} (exponent shift {})",
            step.as_str(),
            d.sector_width,
            d.exponent_shift
        )));
    }
    Ok(Budget {
        parent: p,
        outer: o.sector_width,
        inner: i.sector_width,
        residual: p - (o.sector_width + sigma * i.sector_width),
        zero_width,
    })
}

/// Procedure A step 2 on `H^{m,0}_{0,q}`: the first `h` lower pairs become
/// an auxiliary `H^{h,0}_{0,h}`.
fn split_lower(spec: &FoxHSpec, step: &StepMatching, outer_kind: LeafKind) -> Result<Node> {
    check_step(step, "A-2")?;
    let (m, q, h) = (spec.m, spec.q(), step.pairs.len());
    if spec.n != 0 || spec.p() != 0 {
        return Err(Error::Shape(format!(
            "A-2 needs H^{{m,0}}_{{0,q}}, got p={}, n={}",
            spec.p(),
            spec.n
        )));
    }
    if m < 2 || h == 0 || h >= m || q % m != h {
        return Err(Error::Shape(format!(
            "A-2 needs q = l m + h with h in 1..m-1 (m={m}, q={q}, h={h})"
        )));
    }
    check_pairs("A-2", &spec.lower[..h], &step.pairs, |d, delta| {
        (d + step.eta * delta, step.sigma * delta)
    })?;
    let outer = spec_of(m - h, 0, Vec::new(), spec.lower[h..].to_vec())?.with_scale(spec.c)?;
    let inner = spec_of(h, 0, Vec::new(), pairs(&step.pairs))?;
    let b = budget(Step::A2, spec, &outer, &inner, step.sigma)?;
    Ok(Node::Integral(Box::new(Edge {
        step: Step::A2,
        parent: spec.clone(),
        eta: step.eta,
        sigma: step.sigma,
        outer: Node::Leaf {
            spec: outer,
            kind: outer_kind,
        },
        inner: Node::Leaf {
            spec: inner,
            kind: LeafKind::Auxiliary,
        },
        budget: b,
    })))
}

/// Procedure A step 3 on `H^{0,N}_{P,0}`: the first `g` upper pairs become
/// an auxiliary `H^{0,g}_{g,0}`.
fn split_upper(spec: &FoxHSpec, step: &StepMatching) -> Result<Node> {
    check_step(step, "A-3")?;
    let (n, p, g) = (spec.n, spec.p(), step.pairs.len());
    if spec.m != 0 || spec.q() != 0 {
        return Err(Error::Shape(format!(
            "A-3 needs H^{{0,N}}_{{P,0}}, got m={}, q={}",
            spec.m,
            spec.q()
        )));
    }
    if n < 2 || g == 0 || g >= n || p % n != g {
        return Err(Error::Shape(format!(
            "A-3 needs P = k N + g with g in 1..N-1 (N={n}, P={p}, g={g})"
        )));
    }
    check_pairs("A-3", &spec.upper[..g], &step.pairs, |v, nu| {
        (v + step.eta * nu, step.sigma * nu)
    })?;
    let outer = spec_of(0, n - g, spec.upper[g..].to_vec(), Vec::new())?.with_scale(spec.c)?;
    let inner = spec_of(0, g, pairs(&step.pairs), Vec::new())?;
    let b = budget(Step::A3, spec, &outer, &inner, step.sigma)?;
    Ok(Node::Integral(Box::new(Edge {
        step: Step::A3,
        parent: spec.clone(),
        eta: step.eta,
        sigma: step.sigma,
        outer: Node::Leaf {
            spec: outer,
            kind: LeafKind::Atomic,
        },
        inner: Node::Leaf {
            spec: inner,
            kind: LeafKind::Auxiliary,
        },
        budget: b,
    })))
}

fn maybe_split_lower(spec: FoxHSpec, step: Option<&StepMatching>) -> Result<Node> {
    match step {
        Some(s) => split_lower(&spec, s, LeafKind::Atomic),
        None => Ok(Node::Leaf {
            spec,
            kind: LeafKind::Atomic,
        }),
    }
}

/// Procedure A.
pub fn decompose_a(spec: &FoxHSpec, matching: &Matching) -> Result<Decomposition> {
    let lower_only = spec_of(spec.m, 0, Vec::new(), spec.lower.clone())?.with_scale(spec.c)?;
    if spec.p() == 0 {
        if !matching.first.pairs.is_empty() {
            return Err(Error::BadMatching("spec has no upper pairs to match".into()));
        }
        return Ok(Decomposition {
            root: maybe_split_lower(lower_only, matching.lower_split.as_ref())?,
        });
    }
    let first = &matching.first;
    check_step(first, "A-1")?;
    check_pairs("A-1", &spec.upper, &first.pairs, |c, g| {
        (c + first.eta * g, first.sigma * g)
    })?;
    let factor = spec_of(0, spec.n, pairs(&first.pairs), Vec::new())?;
    let b = budget(Step::A1, spec, &lower_only, &factor, first.sigma)?;
    let outer = maybe_split_lower(lower_only, matching.lower_split.as_ref())?;
    let inner = match &matching.upper_split {
        Some(s) => split_upper(&factor, s)?,
        None => Node::Leaf {
            spec: factor,
            kind: LeafKind::Atomic,
        },
    };
    Ok(Decomposition {
        root: Node::Integral(Box::new(Edge {
            step: Step::A1,
            parent: spec.clone(),
            eta: first.eta,
            sigma: first.sigma,
            outer,
            inner,
            budget: b,
        })),
    })
}

/// Procedure B.
pub fn decompose_b(spec: &FoxHSpec, matching: &Matching) -> Result<Decomposition> {
    let first = &matching.first;
    check_step(first, "B-1")?;
    if spec.p() == 0 {
        return Err(Error::Shape("B-1 needs at least one upper pair".into()));
    }
    check_pairs("B-1", &spec.upper, &first.pairs, |d, delta| {
        (1.0 - d - first.eta * delta, first.sigma * delta)
    })?;
    let lower_only = spec_of(spec.m, 0, Vec::new(), spec.lower.clone())?.with_scale(spec.c)?;
    let factor = spec_of(spec.n, 0, Vec::new(), pairs(&first.pairs))?;
    let b = budget(Step::B1, spec, &lower_only, &factor, first.sigma)?;
    let outer = maybe_split_lower(lower_only, matching.lower_split.as_ref())?;
    let inner = maybe_split_lower(factor, matching.upper_split.as_ref())?;
    Ok(Decomposition {
        root: Node::Integral(Box::new(Edge {
            step: Step::B1,
            parent: spec.clone(),
            eta: first.eta,
            sigma: first.sigma,
            outer,
            inner,
            budget: b,
        })),
    })
}

/// Product tree of a class member: each gamma, beta or M-Wright factor is
/// a leaf and each edge is a Mellin convolution.
pub fn decompose_class(cs: &ClassSpec) -> Result<Decomposition> {
    let mut leaves: Vec<FoxHSpec> = Vec::new();
    for f in cs.beta_block() {
        leaves.push(spec_of(
            1,
            0,
            alloc::vec![ParamPair::new(f.e + f.b, f.eta)],
            alloc::vec![ParamPair::new(f.e, f.eta)],
        )?);
    }
    for f in cs.gamma_block() {
        leaves.push(spec_of(1, 0, Vec::new(), alloc::vec![ParamPair::new(f.e, f.eta)])?);
    }
    for f in cs.wright_block() {
        let single = ClassSpec::new(crate::densities::ClassTag::C4, Vec::new(), Vec::new(), alloc::vec![*f])?;
        leaves.push(build_class(&single)?.spec);
    }
    let mut iter = leaves.into_iter();
    let first = match iter.next() {
        Some(s) => s,
        None => return Ok(Decomposition::leaf(FoxHSpec::empty(), LeafKind::Factor)),
    };
    let mut root = Node::Leaf {
        spec: first,
        kind: LeafKind::Factor,
    };
    for next in iter {
        let parent = product_spec(root.spec(), &next);
        let o = root.spec().derive_params().sector_width;
        let i = next.derive_params().sector_width;
        let p = parent.derive_params().sector_width;
        root = Node::Integral(Box::new(Edge {
            step: Step::Product,
            parent,
            eta: 0.0,
            sigma: 1.0,
            outer: root,
            inner: Node::Leaf {
                spec: next,
                kind: LeafKind::Factor,
            },
            budget: Budget {
                parent: p,
                outer: o,
                inner: i,
                residual: p - (o + i),
                zero_width: o.abs() <= ZERO_WIDTH || i.abs() <= ZERO_WIDTH,
            },
        }));
    }
    Ok(Decomposition { root })
}

fn product_spec(a: &FoxHSpec, b: &FoxHSpec) -> FoxHSpec {
    let merge = |x: &[ParamPair], kx: usize, y: &[ParamPair], ky: usize| {
        let mut out = x[..kx].to_vec();
        out.extend_from_slice(&y[..ky]);
        out.extend_from_slice(&x[kx..]);
        out.extend_from_slice(&y[ky..]);
        out
    };
    FoxHSpec {
        m: a.m + b.m,
        n: a.n + b.n,
        upper: merge(&a.upper, a.n, &b.upper, b.n),
        lower: merge(&a.lower, a.m, &b.lower, b.m),
        c: a.c * b.c,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    Inconclusive,
    Refuted,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Certified => "CERTIFIED",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::Refuted => "REFUTED",
        }
    }
}

/// Sign scan of one function over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SignScan {
    pub min_value: f64,
    pub argmin: f64,
    /// Largest absolute value seen.
    pub scale: f64,
    /// `1e-9 (1 + scale)`.
    pub tol: f64,
    /// `min_value < -tol`.
    pub negative: bool,
    pub points: usize,
}

/// Tolerance used when judging the sign of values of size `scale`.
pub fn eval_tol(scale: f64) -> f64 {
    1e-9 * (1.0 + scale)
}

/// Grid scan of an arbitrary function.
pub fn scan_sign_with<F>(mut f: F, grid: &[f64]) -> Result<SignScan>
where
    F: FnMut(f64) -> Result<f64>,
{
    if grid.is_empty() {
        return Err(Error::Domain("empty grid".into()));
    }
    let mut min_value = f64::INFINITY;
    let mut argmin = grid[0];
    let mut scale = 0.0f64;
    for &x in grid {
        let v = f(x)?;
        if !v.is_finite() {
            return Err(Error::Domain(format!("non-finite value {v} at x={x}")));
        }
        scale = scale.max(v.abs());
        if v < min_value {
            min_value = v;
            argmin = x;
        }
    }
    let tol = eval_tol(scale);
    Ok(SignScan {
        min_value,
        argmin,
        scale,
        tol,
        negative: min_value < -tol,
        points: grid.len(),
    })
}

/// Grid scan of `H[c x]`.
pub fn scan_sign(spec: &FoxHSpec, grid: &[f64]) -> Result<SignScan> {
    let opts = EvalOptions::default();
    scan_sign_with(|x| Ok(eval::evaluate(spec, x, &opts)?.value), grid)
}

/// `n` log-spaced points over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (math::ln(lo), math::ln(hi));
    (0..n)
        .map(|i| {
            let t = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
            math::exp(a + (b - a) * t)
        })
        .collect()
}

/// 64 log-spaced points over `[1e-3, 1e2]`.
pub fn default_grid() -> Vec<f64> {
    log_grid(1e-3, 1e2, 64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeafReport {
    pub spec: FoxHSpec,
    pub kind: LeafKind,
    pub scan: Option<SignScan>,
    pub error: Option<String>,
    /// The leading tail term at infinity is positive (`H^{m,0}_{0,m}` with
    /// positive sector width).
    pub positive_tail: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub verdict: Verdict,
    pub grid_points: usize,
    pub grid_min: f64,
    pub grid_max: f64,
    pub leaves: Vec<LeafReport>,
    pub mixed_budget: bool,
}

/// Evaluates every leaf on `grid`. REFUTED when a leaf dips below
/// `-100 tol`, INCONCLUSIVE when a leaf cannot be evaluated or dips only
/// slightly, CERTIFIED otherwise.
pub fn certify_nonnegative(d: &Decomposition, grid: &[f64]) -> Certificate {
    let mut leaves = Vec::new();
    let mut refuted = false;
    let mut unsure = false;
    for (spec, kind) in d.leaves() {
        let positive_tail = spec.n == 0
            && spec.m == spec.q()
            && spec.m > 0
            && spec.derive_params().sector_width > 0.0;
        let (scan, error) = if spec.is_empty() {
            // the point mass at 1 is a non-negative measure
            (None, None)
        } else {
            match scan_sign(spec, grid) {
                Ok(s) => {
                    if s.min_value < -100.0 * s.tol {
                        refuted = true;
                    } else if s.negative {
                        unsure = true;
                    }
                    (Some(s), None)
                }
                Err(e) => {
                    unsure = true;
                    (None, Some(e.to_string()))
                }
            }
        };
        leaves.push(LeafReport {
            spec: spec.clone(),
            kind,
            scan,
            error,
            positive_tail,
        });
    }
    let verdict = if refuted {
        Verdict::Refuted
    } else if unsure {
        Verdict::Inconclusive
    } else {
        Verdict::Certified
    };
    Certificate {
        verdict,
        grid_points: grid.len(),
        grid_min: grid.iter().cloned().fold(f64::INFINITY, f64::min),
        grid_max: grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        leaves,
        mixed_budget: d.mixed_budget(),
    }
}
