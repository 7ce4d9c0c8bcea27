use foxh_core::reference::reference_eval;

// 30-digit values from mpmath, frozen.
const CASES: &[(&str, f64, f64)] = &[
    ("airy_density", 0.7, 0.371_068_629_081_412_26),
    ("neg_ei", 0.7, 0.373_768_843_233_509_14),
    ("neg_ei", 5.0, 0.001_148_295_591_275_325_8),
    ("neg_ei", 0.1, 1.822_923_958_419_390_6),
    ("incomplete_gamma[rho=0.3]", 0.7, 0.398_289_760_300_275_5),
    ("incomplete_gamma[ρ=0.3]", 1.0, 0.252_266_579_049_688_2),
    ("kummer_1f1[a=1.5,b=3.5]", 0.7, 0.750_622_271_610_057_4),
    ("kummer_1f1[a=1.5,b=3.5]", 8.0, 0.119_356_034_855_293_97),
    ("gauss_2f1[a=1.3,b=2.5,c=4.2]", 0.7, 0.647_328_672_979_652_8),
    ("gauss_2f1[a=1.3,b=2.5,c=4.2]", 9.0, 0.110_627_507_534_176_02),
    ("mittag_leffler[beta=0.7]", 0.7, 0.507_647_688_935_029_7),
    ("mittag_leffler[β=0.5]", 1.0, 0.427_583_576_155_807),
    ("m_wright[beta=0.5]", 0.7, 0.499_141_856_072_304_85),
    ("m_wright[beta=0.3]", 0.7, 0.487_812_795_679_454_6),
    ("prabhakar[alpha=0.6,beta=0.9,gamma=1.4]", 0.7, 0.328_035_293_563_832_8),
    ("bessel_k0_product", 0.7, 0.342_372_558_201_845_87),
    ("bessel_k0_product_cdf", 0.7, 0.636_509_535_952_646_4),
    ("bessel_k_half", 0.7, 0.235_168_293_010_177_9),
];

#[test]
fn frozen_values() {
    for &(name, x, want) in CASES {
        let got = reference_eval(name, x).unwrap();
        let rel = (got - want).abs() / want.abs();
        assert!(rel < 1e-12, "{name} at {x}: got {got:e} want {want:e} rel {rel:e}");
    }
}

#[test]
fn elementary_closed_forms() {
    let x = 0.3f64;
    let e = reference_eval("log_sqrt_ratio", x).unwrap();
    assert!((e - ((1.0 + (1.0 - x).sqrt()) / x.sqrt()).ln()).abs() < 1e-15);
    assert_eq!(reference_eval("arccos_sqrt", 1.5).unwrap(), 0.0);
    let b = reference_eval("beta_density[e=0.5,b=2]", 0.5).unwrap();
    // x^{0.5}(1-x)/B(1.5,2), B(1.5,2) = 4/15
    assert!((b - 0.5f64.sqrt() * 0.5 * 15.0 / 4.0).abs() < 1e-14);
    let s = reference_eval("stretched_gamma[e=0,eta=1]", 2.0).unwrap();
    assert!((s - (-2.0f64).exp()).abs() < 1e-16);
    let p = reference_eval("power_law[a=0.4]", 1.0).unwrap();
    assert!((p - libm::tgamma(0.6) * 2f64.powf(-0.6)).abs() < 1e-14);
}

#[test]
fn m_wright_half_matches_gaussian_form() {
    for x in [0.1, 1.0, 2.5, 4.0] {
        let got = reference_eval("m_wright[beta=0.5]", x).unwrap();
        let want = (-x * x / 4.0).exp() / std::f64::consts::PI.sqrt();
        assert!((got - want).abs() < 1e-12 * want, "{x}");
    }
}
