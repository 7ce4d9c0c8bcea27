//! Named class members and the special-function battery that checks them
//! against the independent oracles in [`crate::reference`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::densities::{
    self, build_class, BetaFactor, ClassSpec, ClassTag, GammaFactor, WrightFactor,
};
use crate::error::{Error, Result};
use crate::eval::EvalOptions;
use crate::math;
use crate::reference::reference_eval;

fn g(e: f64, eta: f64) -> GammaFactor {
    GammaFactor { e, eta }
}
fn b(e: f64, eta: f64, b: f64) -> BetaFactor {
    BetaFactor { e, eta, b }
}
fn w(a: f64, alpha: f64, beta: f64, gamma: f64) -> WrightFactor {
    WrightFactor {
        a,
        alpha,
        beta,
        gamma,
    }
}

fn class(tag: ClassTag, gs: Vec<GammaFactor>, bs: Vec<BetaFactor>, ws: Vec<WrightFactor>) -> ClassSpec {
    ClassSpec::new(tag, gs, bs, ws).expect("fixture parameters are valid")
}

/// One named class member.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassFixture {
    pub name: &'static str,
    pub description: &'static str,
    pub class: ClassSpec,
}

/// At least one member of every class.
pub fn class_fixtures() -> Vec<ClassFixture> {
    use ClassTag::*;
    vec![
        ClassFixture {
            name: "C0",
            description: "point mass at 1",
            class: ClassSpec::c0(),
        },
        ClassFixture {
            name: "C1-exponential",
            description: "unit exponential",
            class: class(C1, vec![g(0.0, 1.0)], vec![], vec![]),
        },
        ClassFixture {
            name: "C1-bessel",
            description: "4 K_{1/2}(2x) / (Gamma(1/4) Gamma(3/4))",
            class: class(C1, vec![g(-0.25, 0.5), g(0.25, 0.5)], vec![], vec![]),
        },
        ClassFixture {
            name: "C1-stretched",
            description: "stretched gamma e=0.7, eta=0.8",
            class: class(C1, vec![g(0.7, 0.8)], vec![], vec![]),
        },
        ClassFixture {
            name: "C2-beta",
            description: "beta density x^{1/2}(1-x)/B(3/2,2)",
            class: class(C2, vec![], vec![b(0.5, 1.0, 2.0)], vec![]),
        },
        ClassFixture {
            name: "C3-incomplete-gamma",
            description: "Gamma(0.3, x) / Gamma(1.3)",
            class: class(C3, vec![g(0.3, 1.0)], vec![b(0.0, 1.0, 1.0)], vec![]),
        },
        ClassFixture {
            name: "C4-m-wright",
            description: "M-Wright M_{1/2}(x) = exp(-x^2/4)/sqrt(pi)",
            class: class(C4, vec![], vec![], vec![w(0.0, 1.0, 0.5, 1.0)]),
        },
        ClassFixture {
            name: "C4-generalized",
            description: "generalized M-Wright a=0.5, alpha=1.5, beta=0.6, gamma=0.8",
            class: class(C4, vec![], vec![], vec![w(0.5, 1.5, 0.6, 0.8)]),
        },
        ClassFixture {
            name: "C5",
            description: "gamma(e=0.5) times M-Wright(1/2)",
            class: class(C5, vec![g(0.5, 1.0)], vec![], vec![w(0.0, 1.0, 0.5, 1.0)]),
        },
        ClassFixture {
            name: "C6",
            description: "beta(e=0.5, b=2) times M-Wright(1/2)",
            class: class(C6, vec![], vec![b(0.5, 1.0, 2.0)], vec![w(0.0, 1.0, 0.5, 1.0)]),
        },
        ClassFixture {
            name: "C7",
            description: "uniform times gamma(1.3) times generalized M-Wright",
            class: class(
                C7,
                vec![g(0.3, 1.0)],
                vec![b(0.0, 1.0, 1.0)],
                vec![w(0.2, 0.9, 0.4, 1.2)],
            ),
        },
    ]
}

/// Looks up a class fixture by name.
pub fn class_fixture(name: &str) -> Result<ClassSpec> {
    class_fixtures()
        .into_iter()
        .find(|f| f.name == name)
        .map(|f| f.class)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))
}

/// Which function of the class member is compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Density,
    LaplaceTransform,
}

impl Quantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::Density => "density",
            Quantity::LaplaceTransform => "laplace",
        }
    }
}

/// A special function written as a class density or its transform.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecialCase {
    pub name: &'static str,
    pub class: ClassSpec,
    pub quantity: Quantity,
    /// Oracle name understood by [`reference_eval`].
    pub oracle: String,
    /// The oracle is multiplied by this before comparison.
    pub oracle_factor: f64,
    pub grid: Vec<f64>,
    pub rel_tol: f64,
}

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (math::ln(lo), math::ln(hi));
    (0..n)
        .map(|i| math::exp(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

/// The special-function battery.
pub fn special_cases() -> Vec<SpecialCase> {
    use ClassTag::*;
    use Quantity::*;
    let tol = 1e-6;
    let dens = log_grid(0.05, 8.0, 12);
    let unit = log_grid(0.02, 0.98, 12);
    let lts = log_grid(0.05, 10.0, 10);
    let gamma = |x: f64| libm::tgamma(x);
    let case = |name, class, quantity, oracle: &str, factor, grid: &Vec<f64>| SpecialCase {
        name,
        class,
        quantity,
        oracle: oracle.to_string(),
        oracle_factor: factor,
        grid: grid.clone(),
        rel_tol: tol,
    };
    vec![
        case(
            "exponential",
            class(C1, vec![g(0.0, 1.0)], vec![], vec![]),
            Density,
            "exp",
            1.0,
            &dens,
        ),
        case(
            "stretched gamma",
            class(C1, vec![g(0.7, 0.8)], vec![], vec![]),
            Density,
            "stretched_gamma[e=0.7,eta=0.8]",
            1.0,
            &dens,
        ),
        case(
            "modified Bessel K_{1/2}",
            class(C1, vec![g(-0.25, 0.5), g(0.25, 0.5)], vec![], vec![]),
            Density,
            "bessel_k_half",
            1.0,
            &log_grid(0.05, 6.0, 12),
        ),
        case(
            "Airy",
            class(C1, vec![g(0.0, 1.0), g(1.0 / 3.0, 1.0)], vec![], vec![]),
            Density,
            "airy_density",
            1.0,
            &dens,
        ),
        case(
            "shifted power (1+s)^{-2}",
            class(C1, vec![g(1.0, 1.0)], vec![], vec![]),
            LaplaceTransform,
            "power_law[a=-1]",
            1.0,
            &lts,
        ),
        case(
            "beta density",
            class(C2, vec![], vec![b(0.5, 1.0, 2.0)], vec![]),
            Density,
            "beta_density[e=0.5,b=2]",
            1.0,
            &unit,
        ),
        case(
            "Kummer 1F1",
            class(C2, vec![], vec![b(0.5, 1.0, 2.0)], vec![]),
            LaplaceTransform,
            "kummer_1f1[a=1.5,b=3.5]",
            1.0,
            &lts,
        ),
        case(
            "log((1+sqrt(1-x))/sqrt(x))",
            class(C2, vec![], vec![b(0.0, 1.0, 0.5), b(0.0, 1.0, 1.0)], vec![]),
            Density,
            "log_sqrt_ratio",
            1.0,
            &unit,
        ),
        case(
            "arccos(sqrt(x))",
            class(C2, vec![], vec![b(0.0, 1.0, 1.0), b(0.5, 1.0, 0.5)], vec![]),
            Density,
            "arccos_sqrt",
            1.0 / (gamma(1.5) * gamma(1.5)),
            &unit,
        ),
        case(
            "exponential integral -Ei(-x)",
            class(C3, vec![g(0.0, 1.0)], vec![b(0.0, 1.0, 1.0)], vec![]),
            Density,
            "neg_ei",
            1.0,
            &dens,
        ),
        case(
            "incomplete gamma",
            class(C3, vec![g(0.3, 1.0)], vec![b(0.0, 1.0, 1.0)], vec![]),
            Density,
            "incomplete_gamma[rho=0.3]",
            1.0 / gamma(1.3),
            &dens,
        ),
        case(
            "Gauss 2F1",
            class(C3, vec![g(1.2, 1.0)], vec![b(0.4, 1.0, 2.1)], vec![]),
            LaplaceTransform,
            "gauss_2f1[a=1.4,b=2.2,c=3.5]",
            1.0,
            &lts,
        ),
        case(
            "M-Wright M_{1/2}",
            class(C4, vec![], vec![], vec![w(0.0, 1.0, 0.5, 1.0)]),
            Density,
            "m_wright[beta=0.5]",
            1.0,
            &log_grid(0.05, 5.0, 12),
        ),
        case(
            "Mittag-Leffler E_{1/2}(-s)",
            class(C4, vec![], vec![], vec![w(0.0, 1.0, 0.5, 1.0)]),
            LaplaceTransform,
            "mittag_leffler[beta=0.5]",
            1.0,
            &lts,
        ),
        case(
            "Mittag-Leffler E_1(-s)",
            ClassSpec::c0(),
            LaplaceTransform,
            "mittag_leffler[beta=1]",
            1.0,
            &lts,
        ),
        case(
            "three-parameter Mittag-Leffler",
            class(C4, vec![], vec![], vec![w(0.5, 1.5, 0.6, 1.0 / 1.5)]),
            LaplaceTransform,
            "prabhakar[alpha=0.6,beta=1.6,gamma=2]",
            gamma(1.6),
            &log_grid(0.05, 3.0, 10),
        ),
        case(
            "product of two exponentials 2K_0(2 sqrt x)",
            class(C1, vec![g(0.0, 1.0), g(0.0, 1.0)], vec![], vec![]),
            Density,
            "bessel_k0_product",
            1.0,
            &dens,
        ),
    ]
}

/// Outcome of one battery entry.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub name: &'static str,
    pub quantity: Quantity,
    pub oracle: String,
    /// `(x, fox-h value, oracle value, relative error)`.
    pub points: Vec<(f64, f64, f64, f64)>,
    pub max_rel_error: f64,
    pub rel_tol: f64,
    pub error: Option<String>,
}

impl CaseResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.max_rel_error <= self.rel_tol
    }
}

/// Evaluates one entry on its grid.
pub fn run_case(case: &SpecialCase) -> CaseResult {
    let mut out = CaseResult {
        name: case.name,
        quantity: case.quantity,
        oracle: case.oracle.clone(),
        points: Vec::new(),
        max_rel_error: 0.0,
        rel_tol: case.rel_tol,
        error: None,
    };
    let built = match build_class(&case.class) {
        Ok(b) => b,
        Err(e) => {
            out.error = Some(e.to_string());
            return out;
        }
    };
    let opts = EvalOptions::default();
    for &x in &case.grid {
        let got = match case.quantity {
            Quantity::Density => densities::density_of(&built, x, &opts),
            Quantity::LaplaceTransform => densities::laplace_of(&built, x, &opts).map(|r| r.value),
        };
        let want = reference_eval(&case.oracle, x).map(|v| v * case.oracle_factor);
        match (got, want) {
            (Ok(a), Ok(b)) => {
                let rel = (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
                out.max_rel_error = out.max_rel_error.max(rel);
                out.points.push((x, a, b, rel));
            }
            (Err(e), _) | (_, Err(e)) => {
                out.error = Some(format!("x={x}: {e}"));
                return out;
            }
        }
    }
    out
}

/// Runs the whole battery.
pub fn run_battery() -> Vec<CaseResult> {
    special_cases().iter().map(run_case).collect()
}
