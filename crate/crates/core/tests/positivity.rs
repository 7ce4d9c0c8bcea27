use foxh_core::densities::build_class;
use foxh_core::eval::{evaluate, EvalOptions};
use foxh_core::fixtures::class_fixtures;
use foxh_core::positivity::{
    certify_nonnegative, decompose_a, decompose_b, decompose_class, default_grid, log_grid,
    scan_sign, scan_sign_with, Decomposition, LeafKind, Matching, Step, StepMatching, Verdict,
};
use foxh_core::reference::reference_eval;
use foxh_core::{Error, FoxHSpec, ParamPair as P};

fn spec(m: usize, n: usize, up: &[(f64, f64)], lo: &[(f64, f64)]) -> FoxHSpec {
    FoxHSpec::new(
        m,
        n,
        up.iter().map(|&(a, b)| P::new(a, b)).collect(),
        lo.iter().map(|&(a, b)| P::new(a, b)).collect(),
    )
    .unwrap()
}

fn step(pairs: &[(f64, f64)], eta: f64, sigma: f64) -> StepMatching {
    StepMatching {
        pairs: pairs.to_vec(),
        eta,
        sigma,
    }
}

fn close(got: f64, want: f64, rel: f64) {
    assert!(
        (got - want).abs() <= rel * want.abs(),
        "got {got:e} want {want:e}"
    );
}

fn eval(s: &FoxHSpec, x: f64) -> f64 {
    evaluate(s, x, &EvalOptions::default()).unwrap().value
}

fn budgets_exact(d: &Decomposition) {
    for e in d.edges() {
        assert!(e.budget.residual.abs() <= 1e-12, "{:?}", e.budget);
    }
}

#[test]
fn procedure_a_step_one_toy() {
    // H^{1,1}_{1,1}[x|(a,1);(0,1)] = Gamma(1-a) (1+x)^{a-1}
    let a = 0.3;
    let eta = 0.5;
    let h = spec(1, 1, &[(a, 1.0)], &[(0.0, 1.0)]);
    let d = decompose_a(&h, &Matching::new(step(&[(a - eta, 1.0)], eta, 1.0))).unwrap();
    let leaves = d.leaves();
    assert_eq!(leaves.len(), 2);
    assert!(leaves.iter().all(|(_, k)| *k == LeafKind::Atomic));
    assert_eq!((leaves[0].0.m, leaves[0].0.n, leaves[0].0.p()), (1, 0, 0));
    assert_eq!((leaves[1].0.m, leaves[1].0.n, leaves[1].0.q()), (0, 1, 0));
    budgets_exact(&d);
    for x in [0.3, 1.0, 3.0] {
        let want = libm::tgamma(1.0 - a) * (1.0f64 + x).powf(a - 1.0);
        close(d.recompose(x).unwrap(), want, 1e-5);
        close(eval(&h, x), want, 1e-10);
    }
    // the factor H^{0,1}_{1,0}[t|(c,1)] is t^{c-1} e^{-1/t}
    let c = a - eta;
    close(eval(leaves[1].0, 2.0), 2f64.powf(c - 1.0) * (-0.5f64).exp(), 1e-10);
}

#[test]
fn procedure_b_toy() {
    // a = 1 - d - eta: H^{1,1}_{1,1}[x|(a,1);(0,1)] = Gamma(d+eta) (1+x)^{-(d+eta)}
    let (dd, eta) = (0.4, 0.7);
    let h = spec(1, 1, &[(1.0 - dd - eta, 1.0)], &[(0.0, 1.0)]);
    let d = decompose_b(&h, &Matching::new(step(&[(dd, 1.0)], eta, 1.0))).unwrap();
    let leaves = d.leaves();
    assert_eq!(leaves.len(), 2);
    assert_eq!(leaves[1].0.lower, vec![P::new(dd, 1.0)]);
    assert_eq!(d.edges()[0].step, Step::B1);
    budgets_exact(&d);
    for x in [0.2, 1.0, 5.0] {
        let want = libm::tgamma(dd + eta) * (1.0f64 + x).powf(-(dd + eta));
        close(d.recompose(x).unwrap(), want, 1e-5);
    }
}

#[test]
fn procedure_a_step_two_splits_lower_pairs() {
    let h = spec(2, 0, &[], &[(0.0, 1.0), (0.25, 1.0), (0.3, 0.5)]);
    let m = Matching {
        first: step(&[], 0.0, 1.0),
        lower_split: Some(step(&[(-0.5, 1.0)], 0.5, 1.0)),
        upper_split: None,
    };
    let d = decompose_a(&h, &m).unwrap();
    let kinds: Vec<_> = d.leaves().iter().map(|(_, k)| *k).collect();
    assert_eq!(kinds, vec![LeafKind::Atomic, LeafKind::Auxiliary]);
    let outer = d.leaves()[0].0.clone();
    assert_eq!((outer.m, outer.q()), (1, 2));
    budgets_exact(&d);
    for x in [0.2, 1.0, 4.0] {
        close(d.recompose(x).unwrap(), eval(&h, x), 1e-5);
    }
}

#[test]
fn procedure_a_step_three_nested() {
    let (eta1, sigma1) = (0.5, 1.0);
    let factor = [(-0.2, 1.0), (-0.1, 1.0), (0.2, 0.5)];
    let upper: Vec<(f64, f64)> = factor
        .iter()
        .map(|&(c, g)| (c + eta1 * g, sigma1 * g))
        .collect();
    let h = spec(1, 2, &upper, &[(0.0, 1.0)]);
    let m = Matching {
        first: step(&factor, eta1, sigma1),
        lower_split: None,
        upper_split: Some(step(&[(-0.7, 1.0)], 0.5, 1.0)),
    };
    let d = decompose_a(&h, &m).unwrap();
    let kinds: Vec<_> = d.leaves().iter().map(|(_, k)| *k).collect();
    assert_eq!(kinds, vec![LeafKind::Atomic, LeafKind::Atomic, LeafKind::Auxiliary]);
    budgets_exact(&d);
    // nested quadrature is slow, two points suffice
    for x in [0.5, 2.0] {
        close(d.recompose(x).unwrap(), eval(&h, x), 1e-5);
    }
}

#[test]
fn lower_only_spec_is_a_single_leaf() {
    let h = spec(1, 0, &[], &[(0.0, 1.0)]);
    let d = decompose_a(&h, &Matching::new(step(&[], 0.0, 1.0))).unwrap();
    assert_eq!(d.leaves().len(), 1);
    assert!(d.edges().is_empty());
    assert_eq!(certify_nonnegative(&d, &default_grid()).verdict, Verdict::Certified);
}

#[test]
fn budget_failures() {
    // child H^{1,0}_{0,2} with lower (0,1),(0.5,2) has sector width -1
    let h = spec(1, 1, &[(0.3, 3.0)], &[(0.0, 1.0), (0.5, 2.0)]);
    let r = decompose_a(&h, &Matching::new(step(&[(0.3 - 0.5 * 3.0, 3.0)], 0.5, 1.0)));
    assert!(matches!(r, Err(Error::Budget(_))), "{r:?}");
    let toy = spec(1, 1, &[(0.3, 1.0)], &[(0.0, 1.0)]);
    let r = decompose_a(&toy, &Matching::new(step(&[(0.3, -1.0)], 0.0, -1.0)));
    assert!(matches!(r, Err(Error::Budget(_))), "{r:?}");
    let r = decompose_b(&toy, &Matching::new(step(&[(0.7, 1.0)], 0.0, 0.0)));
    assert!(matches!(r, Err(Error::Budget(_))), "{r:?}");
}

#[test]
fn zero_width_variant_is_flagged() {
    // child H^{1,0}_{0,2}[(0,1),(-0.5,1)]: sector width 0, exponent shift -1.5
    let h = spec(1, 1, &[(0.3, 1.0)], &[(0.0, 1.0), (-0.5, 1.0)]);
    let d = decompose_a(&h, &Matching::new(step(&[(-0.2, 1.0)], 0.5, 1.0))).unwrap();
    let e = d.edges()[0];
    assert!(e.budget.zero_width);
    assert!(!d.mixed_budget());
    budgets_exact(&d);
}

#[test]
fn bad_matching() {
    let h = spec(1, 1, &[(0.3, 1.0)], &[(0.0, 1.0)]);
    let r = decompose_a(&h, &Matching::new(step(&[(-0.2 + 1e-6, 1.0)], 0.5, 1.0)));
    assert!(matches!(r, Err(Error::BadMatching(_))), "{r:?}");
    let r = decompose_b(&h, &Matching::new(step(&[(0.2, 1.0), (0.1, 1.0)], 0.5, 1.0)));
    assert!(matches!(r, Err(Error::BadMatching(_))), "{r:?}");
}

#[test]
fn shape_failures() {
    // q = m: no remainder h in 1..m-1
    let h = spec(2, 0, &[], &[(0.0, 1.0), (0.25, 1.0)]);
    let m = Matching {
        first: step(&[], 0.0, 1.0),
        lower_split: Some(step(&[(-0.5, 1.0)], 0.5, 1.0)),
        upper_split: None,
    };
    assert!(matches!(decompose_a(&h, &m), Err(Error::Shape(_))));
    // m = 1 excludes step 2 altogether
    let h = spec(1, 0, &[], &[(0.0, 1.0), (0.3, 0.5)]);
    assert!(matches!(decompose_a(&h, &m), Err(Error::Shape(_))));
}

#[test]
fn class_product_trees_recompose_and_certify() {
    let opts = EvalOptions::default();
    for f in class_fixtures() {
        let d = decompose_class(&f.class).unwrap();
        let cert = certify_nonnegative(&d, &default_grid());
        assert_eq!(cert.verdict, Verdict::Certified, "{}", f.name);
        budgets_exact(&d);
        if d.edges().is_empty() {
            continue;
        }
        let built = build_class(&f.class).unwrap();
        for x in [0.3, 0.8, 2.0] {
            let want = evaluate(&built.spec, x, &opts).unwrap().value;
            let got = d.recompose(x).unwrap();
            if want == 0.0 {
                assert!(got.abs() < 1e-12, "{}: {got}", f.name);
            } else {
                close(got, want, 1e-5);
            }
        }
    }
}

#[test]
fn mwright_leaf_certified() {
    let mw = spec(1, 0, &[(0.5, 0.5)], &[(0.0, 1.0)]);
    let d = Decomposition::leaf(mw, LeafKind::Atomic);
    let cert = certify_nonnegative(&d, &default_grid());
    assert_eq!(cert.verdict, Verdict::Certified);
    assert_eq!(cert.grid_points, 64);
    // refining the grid keeps the verdict
    let fine = certify_nonnegative(&d, &log_grid(1e-3, 1e2, 257));
    assert_eq!(fine.verdict, Verdict::Certified);
}

#[test]
fn sign_changing_leaf_refuted() {
    // E_{1.8}(-s) changes sign near s = 2.5
    let ml = spec(1, 1, &[(0.0, 1.0)], &[(0.0, 1.0), (0.0, 1.8)]);
    let oracle = reference_eval("mittag_leffler[beta=1.8]", 3.0).unwrap();
    assert!(oracle < -0.2, "{oracle}");
    close(eval(&ml, 3.0), oracle, 1e-9);
    let grid = log_grid(0.1, 10.0, 40);
    let scan = scan_sign(&ml, &grid).unwrap();
    assert!(scan.negative);
    assert!(scan.argmin > 2.0);
    let cert = certify_nonnegative(&Decomposition::leaf(ml, LeafKind::Atomic), &grid);
    assert_eq!(cert.verdict, Verdict::Refuted);
}

#[test]
fn unevaluable_leaf_is_inconclusive() {
    // zero sector width and zero balance, and x^{1/2} (1-x)^{-0.3} / Gamma(0.7)
    // is singular on the radius x = 1
    let bad = spec(1, 0, &[(1.2, 1.0)], &[(0.5, 1.0)]);
    let cert = certify_nonnegative(&Decomposition::leaf(bad, LeafKind::Atomic), &[0.5, 1.0]);
    assert_eq!(cert.verdict, Verdict::Inconclusive, "{cert:?}");
    assert!(cert.leaves[0].error.is_some());
}

#[test]
fn scans() {
    let exp = build_class(&class_fixtures()[1].class).unwrap();
    let s = scan_sign(&exp.spec, &default_grid()).unwrap();
    assert!(s.min_value > 0.0);
    let inc = build_class(
        &foxh_core::fixtures::class_fixture("C3-incomplete-gamma").unwrap(),
    )
    .unwrap();
    let s = scan_sign(&inc.spec, &default_grid()).unwrap();
    assert!(s.min_value > 0.0 && !s.negative);
    // e^{-x} with the x^2 term of its series sign-flipped and doubled
    let s = scan_sign_with(|x| Ok((-x).exp() - x * x), &log_grid(0.01, 10.0, 30)).unwrap();
    assert!(s.negative);
}
