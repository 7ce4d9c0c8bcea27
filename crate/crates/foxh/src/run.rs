//! Verb dispatch.

use std::io::Read;

use foxh_core::densities::{
    build_class, check_complete_monotonicity, class_lt_params, density_of, laplace_of,
    mellin_moment, moment, ClassSpec,
};
use foxh_core::eval::{evaluate, mellin_barnes, residue_series, tail_behavior, EvalOptions};
use foxh_core::fixtures::{class_fixture, log_grid, run_battery};
use foxh_core::positivity::{
    certify_nonnegative, decompose_class, default_grid, Decomposition, LeafKind, Verdict,
};
use foxh_core::reference::reference_eval;
use foxh_core::variates::sample;
use foxh_core::FoxHSpec;
use serde_json::json;

use crate::doc::{parse_document, spec_value, Document};
use crate::{one_line, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Verb {
    /// Density (or raw function) on a grid.
    Eval,
    /// Laplace transform on a grid.
    Lt,
    /// Integer moments 0..=order.
    Moments,
    /// Random draws.
    Sample,
    /// Transform parameters, closed form and derived from the transform pairs.
    Table,
    /// Leading behavior at zero and infinity.
    Tails,
    /// Complete monotonicity of the Laplace transform.
    CheckCm,
    /// Non-negativity certificate.
    Certify,
    /// Residue series against quadrature and a named oracle.
    OracleCompare,
    /// The special-function battery.
    Fixtures,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Request {
    /// Inline JSON, a path, `-` for stdin, or a fixture name.
    pub input: Option<String>,
    pub grid: Option<Vec<f64>>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub order: Option<usize>,
    pub points: Option<usize>,
    /// Series term cap, from `FOXH_MAX_TERMS`.
    pub max_terms: Option<usize>,
}

/// What a verb produced. `failure` is set when a check ran but did not pass;
/// the body is still written.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub body: String,
    pub failure: Option<CliError>,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Self { body, failure: None }
    }
}

pub fn load_input(input: &str) -> Result<Document, CliError> {
    let text = if input == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Parse(format!("stdin: {e}")))?;
        s
    } else if input.trim_start().starts_with('{') {
        input.to_string()
    } else if std::path::Path::new(input).exists() {
        std::fs::read_to_string(input).map_err(|e| CliError::Parse(format!("{input}: {e}")))?
    } else if let Ok(class) = class_fixture(input) {
        return Ok(Document::Class {
            class,
            oracle: None,
        });
    } else {
        return Err(CliError::Parse(format!(
            "input {input:?} is not JSON, a readable file, or a fixture name"
        )));
    };
    parse_document(&text)
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

struct Table(csv::Writer<Vec<u8>>);

impl Table {
    fn new(header: &[&str]) -> Self {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).expect("in-memory write");
        Self(w)
    }

    fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.0.write_record(cells).expect("in-memory write");
    }

    fn finish(self) -> String {
        String::from_utf8(self.0.into_inner().expect("in-memory write")).expect("ascii cells")
    }
}

fn need_class(doc: &Document, verb: &str) -> Result<ClassSpec, CliError> {
    match doc {
        Document::Class { class, .. } => Ok(class.clone()),
        Document::Spec { .. } => Err(CliError::Validation(format!(
            "{verb} needs a class document (with a \"class\" key)"
        ))),
    }
}

pub fn run(verb: Verb, req: &Request) -> Result<Outcome, CliError> {
    let mut opts = EvalOptions::default();
    if let Some(n) = req.max_terms {
        opts.max_terms = n;
    }
    let doc = match (verb, &req.input) {
        (Verb::Fixtures, _) => None,
        (_, Some(input)) => Some(load_input(input)?),
        (_, None) => return Err(CliError::Parse("--input is required".into())),
    };
    let grid = |default: Vec<f64>| req.grid.clone().unwrap_or(default);
    match verb {
        Verb::Eval => {
            let doc = doc.expect("checked above");
            if let Some(tol) = req.tol {
                opts.tol = tol;
            }
            let xs = grid(log_grid(0.01, 10.0, 25));
            match &doc {
                Document::Class { class, .. } => {
                    let built = build_class(class)?;
                    let mut t = Table::new(&["x", "density"]);
                    for x in xs {
                        t.row([num(x), num(density_of(&built, x, &opts)?)]);
                    }
                    Ok(Outcome::ok(t.finish()))
                }
                Document::Spec { spec, .. } => {
                    let mut t = Table::new(&["x", "value"]);
                    for x in xs {
                        t.row([num(x), num(evaluate(spec, x, &opts)?.value)]);
                    }
                    Ok(Outcome::ok(t.finish()))
                }
            }
        }
        Verb::Lt => {
            let doc = doc.expect("checked above");
            if let Some(tol) = req.tol {
                opts.tol = tol;
            }
            let mut t = Table::new(&["s", "phi"]);
            let ss = grid(log_grid(0.1, 10.0, 25));
            match &doc {
                Document::Class { class, .. } => {
                    let built = build_class(class)?;
                    for s in ss {
                        t.row([num(s), num(laplace_of(&built, s, &opts)?.value)]);
                    }
                }
                Document::Spec { spec, .. } => {
                    let lt = spec.lt_spec()?;
                    for s in ss {
                        t.row([num(s), num(evaluate(&lt, s, &opts)?.value / spec.c)]);
                    }
                }
            }
            Ok(Outcome::ok(t.finish()))
        }
        Verb::Moments => {
            let doc = doc.expect("checked above");
            let mut t = Table::new(&["l", "value"]);
            for l in 0..=req.order.unwrap_or(4) {
                let v = match &doc {
                    Document::Class { class, .. } => moment(class, l as u32)?,
                    Document::Spec { spec, .. } => mellin_moment(spec, l as f64)?,
                };
                t.row([l.to_string(), num(v)]);
            }
            Ok(Outcome::ok(t.finish()))
        }
        Verb::Sample => {
            let class = need_class(doc.as_ref().expect("checked above"), "sample")?;
            let mut t = Table::new(&["sample"]);
            for v in sample(&class, req.points.unwrap_or(1000), req.seed.unwrap_or(0))? {
                t.row([num(v)]);
            }
            Ok(Outcome::ok(t.finish()))
        }
        Verb::Table => {
            let class = need_class(doc.as_ref().expect("checked above"), "table")?;
            let table = class_lt_params(&class);
            let direct = build_class(&class)?.spec.lt_spec().ok().map(|s| s.derive_params());
            let mut t = Table::new(&["parameter", "table", "direct"]);
            let rows = [
                ("sector_width", table.sector_width, direct.map(|d| d.sector_width)),
                ("scale_balance", table.scale_balance, direct.map(|d| d.scale_balance)),
                ("exponent_shift", table.exponent_shift, direct.map(|d| d.exponent_shift)),
                ("scale_product", table.scale_product, direct.map(|d| d.scale_product)),
            ];
            for (name, v, d) in rows {
                t.row([name.to_string(), num(v), d.map(num).unwrap_or_default()]);
            }
            Ok(Outcome::ok(t.finish()))
        }
        Verb::Tails => {
            let spec = density_spec(doc.as_ref().expect("checked above"))?;
            let tb = tail_behavior(&spec)?;
            let mut t = Table::new(&["quantity", "value"]);
            t.row(["infinity_exponent".to_string(), num(tb.infinity_exponent)]);
            t.row(["infinity_rate".to_string(), num(tb.infinity_rate)]);
            t.row(["infinity_power".to_string(), num(tb.infinity_power)]);
            t.row(["zero_exponent".to_string(), num(tb.zero_exponent)]);
            let idx: Vec<String> = tb.argmin_indices.iter().map(|i| i.to_string()).collect();
            t.row(["argmin_indices".to_string(), idx.join(";")]);
            Ok(Outcome::ok(t.finish()))
        }
        Verb::CheckCm => {
            let class = need_class(doc.as_ref().expect("checked above"), "check-cm")?;
            let ss = grid(log_grid(0.1, 10.0, 16));
            let order = req.order.unwrap_or(6);
            let rep = check_complete_monotonicity(&class, &ss, order)?;
            let violations: Vec<_> = rep
                .violations
                .iter()
                .map(|v| {
                    json!({
                        "s": v.s,
                        "order": v.order,
                        "signed_derivative": v.signed_derivative,
                        "tolerance": v.tolerance,
                    })
                })
                .collect();
            let body = json!({
                "class": class.to_string(),
                "passed": rep.passed(),
                "max_order": order,
                "grid_points": ss.len(),
                "grid_min": ss.first(),
                "grid_max": ss.last(),
                "worst_margin": finite_or_null(rep.worst_margin),
                "violations": violations,
            });
            let failure = (!rep.passed()).then(|| {
                CliError::Acceptance(format!("{} monotonicity violations", rep.violations.len()))
            });
            Ok(Outcome {
                body: pretty(&body),
                failure,
            })
        }
        Verb::Certify => certify(doc.as_ref().expect("checked above"), grid(default_grid())),
        Verb::OracleCompare => oracle_compare(
            doc.as_ref().expect("checked above"),
            &grid(log_grid(0.01, 10.0, 8)),
            req.tol.unwrap_or(1e-7),
            opts,
        ),
        Verb::Fixtures => {
            let results = run_battery();
            let mut t = Table::new(&[
                "name",
                "quantity",
                "oracle",
                "points",
                "max_rel_error",
                "rel_tol",
                "error",
                "status",
            ]);
            let mut failed = Vec::new();
            for r in &results {
                if !r.passed() {
                    failed.push(r.name);
                }
                t.row([
                    r.name.to_string(),
                    r.quantity.as_str().to_string(),
                    r.oracle.clone(),
                    r.points.len().to_string(),
                    num(r.max_rel_error),
                    num(r.rel_tol),
                    r.error.as_deref().map(one_line).unwrap_or_default(),
                    if r.passed() { "pass" } else { "fail" }.to_string(),
                ]);
            }
            let failure = (!failed.is_empty())
                .then(|| CliError::Acceptance(format!("failed fixtures: {}", failed.join(", "))));
            Ok(Outcome {
                body: t.finish(),
                failure,
            })
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn finite_or_null(v: f64) -> serde_json::Value {
    if v.is_finite() {
        v.into()
    } else {
        serde_json::Value::Null
    }
}

/// The spec whose values are the density (up to the constant K).
fn density_spec(doc: &Document) -> Result<FoxHSpec, CliError> {
    Ok(match doc {
        Document::Class { class, .. } => build_class(class)?.spec,
        Document::Spec { spec, .. } => spec.clone(),
    })
}

fn certify(doc: &Document, grid: Vec<f64>) -> Result<Outcome, CliError> {
    let d = match doc {
        Document::Class { class, .. } => decompose_class(class)?,
        Document::Spec { spec, .. } => Decomposition::leaf(spec.clone(), LeafKind::Atomic),
    };
    let cert = certify_nonnegative(&d, &grid);
    let edges: Vec<_> = d
        .edges()
        .iter()
        .map(|e| {
            json!({
                "step": e.step.as_str(),
                "eta": e.eta,
                "sigma": e.sigma,
                "budget": {
                    "parent": e.budget.parent,
                    "outer": e.budget.outer,
                    "inner": e.budget.inner,
                    "residual": e.budget.residual,
                    "zero_width": e.budget.zero_width,
                },
            })
        })
        .collect();
    let leaves: Vec<_> = cert
        .leaves
        .iter()
        .map(|l| {
            let mut v = json!({
                "spec": spec_value(&l.spec),
                "kind": l.kind.as_str(),
                "positive_tail": l.positive_tail,
            });
            if let Some(s) = &l.scan {
                v["min_value"] = s.min_value.into();
                v["argmin"] = s.argmin.into();
                v["tolerance"] = s.tol.into();
                v["negative"] = s.negative.into();
            }
            if let Some(e) = &l.error {
                v["error"] = one_line(e).into();
            }
            v
        })
        .collect();
    let body = json!({
        "verdict": cert.verdict.as_str(),
        "grid_points": cert.grid_points,
        "grid_min": cert.grid_min,
        "grid_max": cert.grid_max,
        "mixed_budget": cert.mixed_budget,
        "edges": edges,
        "leaves": leaves,
    });
    let failure = (cert.verdict != Verdict::Certified)
        .then(|| CliError::Acceptance(format!("verdict {}", cert.verdict.as_str())));
    Ok(Outcome {
        body: pretty(&body),
        failure,
    })
}

fn oracle_compare(
    doc: &Document,
    xs: &[f64],
    tol: f64,
    mut opts: EvalOptions,
) -> Result<Outcome, CliError> {
    opts.tol = opts.tol.min(1e-12);
    let (spec, k) = match doc {
        Document::Class { class, .. } => {
            let built = build_class(class)?;
            (built.spec, built.normalization.k_value)
        }
        Document::Spec { spec, .. } => (spec.clone(), 1.0),
    };
    let oracle = doc.oracle();
    let mut t = Table::new(&[
        "x",
        "residue",
        "quadrature",
        "oracle",
        "residue_vs_quadrature",
        "residue_vs_oracle",
    ]);
    let mut worst = 0.0f64;
    let cell = |v: Option<f64>| v.map(num).unwrap_or_default();
    for &x in xs {
        let r = residue_series(&spec, x, &opts).ok().map(|r| r.value / k);
        let q = match mellin_barnes(&spec, x, &opts) {
            Ok(q) => Some(q.value / k),
            Err(e) if r.is_none() => return Err(e.into()),
            Err(_) => None,
        };
        let o = oracle.map(|name| reference_eval(name, x)).transpose()?;
        let base = r.or(q).expect("one of the two succeeded");
        let delta = |other: Option<f64>| other.map(|v| (base - v) / (1.0 + v.abs()));
        let (dq, dor) = (r.and(delta(q)), delta(o));
        worst = [dq, dor].into_iter().flatten().fold(worst, |w, d| w.max(d.abs()));
        t.row([num(x), cell(r), cell(q), cell(o), cell(dq), cell(dor)]);
    }
    let failure = (worst > tol)
        .then(|| CliError::Acceptance(format!("largest delta {worst:e} exceeds {tol:e}")));
    Ok(Outcome {
        body: t.finish(),
        failure,
    })
}
