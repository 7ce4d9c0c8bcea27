use std::process::{Command, Output};

const EXP: &str = r#"{"class":"C1","gamma_block":[{"e":0,"eta":1}]}"#;
const MWRIGHT: &str = r#"{"m":1,"n":0,"p":1,"q":1,"upper":[[0.5,0.5]],"lower":[[0.0,1.0]],"c":1.0,"oracle":"m_wright[beta=0.5]"}"#;

fn foxh(args: &[&str]) -> Output {
    foxh_env(args, &[])
}

fn foxh_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_foxh"));
    cmd.args(args).env_remove("FOXH_MAX_TERMS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn eval_exponential() {
    let o = foxh(&["eval", "--input", EXP, "--grid", "1:2:2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().next(), Some("x,density"));
    let r = rows(&o);
    assert_eq!(r.len(), 2);
    for (row, x) in r.iter().zip([1.0f64, 2.0]) {
        assert_eq!(num(&row[0]), x);
        assert!((num(&row[1]) - (-x).exp()).abs() < 1e-15);
        // 17 significant digits
        assert_eq!(row[1].split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
    }
}

#[test]
fn table_of_point_mass() {
    let o = foxh(&["table", "--input", r#"{"class":"C0"}"#]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = rows(&o);
    let get = |name: &str| num(&r.iter().find(|row| row[0] == name).unwrap()[1]);
    assert_eq!(get("sector_width"), 1.0);
    assert_eq!(get("scale_balance"), 1.0);
    assert_eq!(get("exponent_shift"), -0.5);
    assert_eq!(get("scale_product"), 1.0);
}

#[test]
fn fixture_names_are_accepted_as_input() {
    let o = foxh(&["moments", "--input", "C1-exponential", "--order", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Vec<f64> = rows(&o).iter().map(|r| num(&r[1])).collect();
    assert_eq!(v.len(), 4);
    for (got, want) in v.iter().zip([1.0, 1.0, 2.0, 6.0]) {
        assert!((got - want).abs() < 1e-13, "{v:?}");
    }
}

#[test]
fn laplace_of_point_mass() {
    let o = foxh(&["lt", "--input", "C0", "--grid", "0:2:3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().next(), Some("s,phi"));
    for row in rows(&o) {
        assert!((num(&row[1]) - (-num(&row[0])).exp()).abs() < 1e-15);
    }
}

#[test]
fn tails_report() {
    let o = foxh(&["tails", "--input", EXP]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = rows(&o);
    let get = |name: &str| r.iter().find(|row| row[0] == name).unwrap()[1].clone();
    assert_eq!(num(&get("infinity_rate")), 1.0);
    assert_eq!(num(&get("infinity_exponent")), 0.0);
    assert_eq!(get("argmin_indices"), "0");
}

#[test]
fn parse_and_validation_exit_codes() {
    let o = foxh(&["eval", "--input", r#"{"m":1,"n":0,"upper":[]}"#]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o).lines().count(), 1);
    assert!(stderr(&o).contains("lower"), "{}", stderr(&o));

    let bad = r#"{"class":"C4","wright_block":[{"a":0,"alpha":1,"beta":1.2,"gamma":1}]}"#;
    let o = foxh(&["eval", "--input", bad]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr(&o).lines().count(), 1);
    assert!(stderr(&o).contains("β_k ∈ (0,1)"), "{}", stderr(&o));

    assert_eq!(foxh(&["eval", "--input", EXP, "--bogus"]).status.code(), Some(2));
    assert_eq!(foxh(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(foxh(&["eval", "--input", EXP, "--grid", "1:2"]).status.code(), Some(2));
    assert_eq!(foxh(&["eval", "--input", "no-such-thing"]).status.code(), Some(2));
    assert_eq!(foxh(&["sample", "--input", MWRIGHT]).status.code(), Some(3));
}

#[test]
fn term_cap_from_environment() {
    // beta with a non-integer exponent: an infinite series, no quadrature fallback
    let beta = r#"{"class":"C2","beta_block":[{"e":0.5,"eta":1,"b":1.5}]}"#;
    let ok = foxh(&["eval", "--input", beta, "--grid", "0.9:0.9:1"]);
    assert!(ok.status.success(), "{}", stderr(&ok));
    let o = foxh_env(&["eval", "--input", beta, "--grid", "0.9:0.9:1"], &[("FOXH_MAX_TERMS", "5")]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    let o = foxh_env(&["eval", "--input", beta], &[("FOXH_MAX_TERMS", "lots")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sampling_is_deterministic() {
    let run = |seed: &str| foxh(&["sample", "--input", "C4-m-wright", "--points", "50", "--seed", seed]);
    let (a, b, c) = (run("3"), run("3"), run("4"));
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(stdout(&a).lines().next(), Some("sample"));
    assert_eq!(rows(&a).len(), 50);
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let input = dir.path().join("spec.json");
    std::fs::write(&input, EXP).unwrap();
    let o = foxh(&[
        "eval",
        "--input",
        input.to_str().unwrap(),
        "--output",
        path.to_str().unwrap(),
        "--grid",
        "0.5:4:8:log",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn certify_verdicts() {
    let o = foxh(&["certify", "--input", "C4-m-wright"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "CERTIFIED");

    let ml = r#"{"m":1,"n":1,"upper":[[0,1]],"lower":[[0,1],[0,1.8]]}"#;
    let o = foxh(&["certify", "--input", ml, "--grid", "0.1:10:40:log"]);
    assert_eq!(o.status.code(), Some(5));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "REFUTED");
    assert_eq!(v["leaves"][0]["negative"], true);
}

#[test]
fn monotonicity_report() {
    let o = foxh(&["check-cm", "--input", "C4-m-wright", "--order", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["max_order"], 4);
}

#[test]
fn oracle_comparison() {
    let o = foxh(&["oracle-compare", "--input", MWRIGHT, "--grid", "0.1:4:6:log"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = rows(&o);
    assert_eq!(r.len(), 6);
    for row in r {
        assert!(num(&row[4]).abs() < 1e-7 && num(&row[5]).abs() < 1e-7, "{row:?}");
    }
}

#[test]
fn fixture_battery() {
    let o = foxh(&["fixtures"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = rows(&o);
    assert!(r.len() >= 10);
    assert!(r.iter().all(|row| row.last().unwrap() == "pass"));
}
