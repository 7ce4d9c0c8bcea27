//! JSON documents: a raw Fox-H spec or a density class member.
//!
//! ```json
//! {"m":1,"n":0,"p":1,"q":1,"upper":[[0.5,0.5]],"lower":[[0,1]],"c":1}
//! {"class":"C4","wright_block":[{"a":0,"alpha":1,"beta":0.5,"gamma":1}]}
//! ```
//!
//! Either form may carry an `"oracle"` name understood by
//! `foxh_core::reference::reference_eval`, used by `oracle-compare`.

use foxh_core::densities::{BetaFactor, ClassSpec, ClassTag, GammaFactor, WrightFactor};
use foxh_core::{FoxHSpec, ParamPair};
use serde::{Deserialize, Serialize};

use crate::{one_line, CliError};

#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Spec { spec: FoxHSpec, oracle: Option<String> },
    Class { class: ClassSpec, oracle: Option<String> },
}

impl Document {
    pub fn oracle(&self) -> Option<&str> {
        match self {
            Document::Spec { oracle, .. } | Document::Class { oracle, .. } => oracle.as_deref(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDoc {
    m: usize,
    n: usize,
    #[serde(default)]
    p: Option<usize>,
    #[serde(default)]
    q: Option<usize>,
    upper: Vec<[f64; 2]>,
    lower: Vec<[f64; 2]>,
    #[serde(default = "unit_scale")]
    c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    oracle: Option<String>,
}

fn unit_scale() -> f64 {
    1.0
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassDoc {
    class: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    gamma_block: Vec<GammaDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    beta_block: Vec<BetaDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    wright_block: Vec<WrightDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    oracle: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GammaDoc {
    e: f64,
    eta: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BetaDoc {
    e: f64,
    eta: f64,
    b: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WrightDoc {
    a: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
}

fn parse_err(e: serde_json::Error) -> CliError {
    CliError::Parse(one_line(&e.to_string()))
}

/// Parses and validates a document. Objects with a `"class"` key are class
/// members, everything else is read as a raw spec.
pub fn parse_document(text: &str) -> Result<Document, CliError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(parse_err)?;
    let Some(obj) = value.as_object() else {
        return Err(CliError::Parse("document must be a JSON object".into()));
    };
    if obj.contains_key("class") {
        let d: ClassDoc = serde_json::from_value(value).map_err(parse_err)?;
        let tag: ClassTag = d.class.parse()?;
        let class = ClassSpec::new(
            tag,
            d.gamma_block.iter().map(|g| GammaFactor { e: g.e, eta: g.eta }).collect(),
            d.beta_block
                .iter()
                .map(|b| BetaFactor {
                    e: b.e,
                    eta: b.eta,
                    b: b.b,
                })
                .collect(),
            d.wright_block
                .iter()
                .map(|w| WrightFactor {
                    a: w.a,
                    alpha: w.alpha,
                    beta: w.beta,
                    gamma: w.gamma,
                })
                .collect(),
        )?;
        Ok(Document::Class {
            class,
            oracle: d.oracle,
        })
    } else {
        let d: SpecDoc = serde_json::from_value(value).map_err(parse_err)?;
        if d.p.is_some_and(|p| p != d.upper.len()) || d.q.is_some_and(|q| q != d.lower.len()) {
            return Err(CliError::Validation(format!(
                "p and q must match the pair counts ({} upper, {} lower)",
                d.upper.len(),
                d.lower.len()
            )));
        }
        let pairs = |v: &[[f64; 2]]| v.iter().map(|p| ParamPair::new(p[0], p[1])).collect();
        let spec = FoxHSpec::new(d.m, d.n, pairs(&d.upper), pairs(&d.lower))?.with_scale(d.c)?;
        Ok(Document::Spec {
            spec,
            oracle: d.oracle,
        })
    }
}

pub fn spec_value(spec: &FoxHSpec) -> serde_json::Value {
    let pairs = |v: &[ParamPair]| v.iter().map(|p| [p.shift, p.scale]).collect();
    serde_json::to_value(SpecDoc {
        m: spec.m,
        n: spec.n,
        p: Some(spec.p()),
        q: Some(spec.q()),
        upper: pairs(&spec.upper),
        lower: pairs(&spec.lower),
        c: spec.c,
        oracle: None,
    })
    .expect("plain data serializes")
}

/// Pretty JSON that [`parse_document`] reads back to the same document.
pub fn to_json(doc: &Document) -> String {
    let value = match doc {
        Document::Spec { spec, oracle } => {
            let mut v = spec_value(spec);
            if let Some(o) = oracle {
                v["oracle"] = o.clone().into();
            }
            v
        }
        Document::Class { class, oracle } => serde_json::to_value(ClassDoc {
            class: class.tag().as_str().into(),
            gamma_block: class
                .gamma_block()
                .iter()
                .map(|g| GammaDoc { e: g.e, eta: g.eta })
                .collect(),
            beta_block: class
                .beta_block()
                .iter()
                .map(|b| BetaDoc {
                    e: b.e,
                    eta: b.eta,
                    b: b.b,
                })
                .collect(),
            wright_block: class
                .wright_block()
                .iter()
                .map(|w| WrightDoc {
                    a: w.a,
                    alpha: w.alpha,
                    beta: w.beta,
                    gamma: w.gamma,
                })
                .collect(),
            oracle: oracle.clone(),
        })
        .expect("plain data serializes"),
    };
    serde_json::to_string_pretty(&value).expect("plain data serializes")
}
