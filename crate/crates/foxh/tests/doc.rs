use foxh::doc::{parse_document, to_json, Document};
use foxh::{grid::parse_grid, CliError};
use foxh_core::fixtures::class_fixtures;

const MWRIGHT: &str = r#"{"m":1,"n":0,"p":1,"q":1,"upper":[[0.5,0.5]],"lower":[[0.0,1.0]],"c":1.0}"#;

#[test]
fn spec_round_trip() {
    let d = parse_document(MWRIGHT).unwrap();
    let Document::Spec { spec, .. } = &d else { panic!("{d:?}") };
    assert_eq!((spec.m, spec.n, spec.p(), spec.q()), (1, 0, 1, 1));
    let again = parse_document(&to_json(&d)).unwrap();
    assert_eq!(again, d);
    assert_eq!(to_json(&again), to_json(&d));
}

#[test]
fn class_round_trip_for_every_fixture() {
    for f in class_fixtures() {
        let d = Document::Class {
            class: f.class.clone(),
            oracle: None,
        };
        let text = to_json(&d);
        assert_eq!(parse_document(&text).unwrap(), d, "{}: {text}", f.name);
    }
}

#[test]
fn optional_fields() {
    let d = parse_document(r#"{"m":1,"n":0,"upper":[],"lower":[[0,1]]}"#).unwrap();
    let Document::Spec { spec, oracle } = d else { panic!() };
    assert_eq!(spec.c, 1.0);
    assert!(oracle.is_none());
    let d = parse_document(r#"{"class":"C1","gamma_block":[{"e":0,"eta":1}],"oracle":"exp"}"#).unwrap();
    assert!(matches!(d, Document::Class { oracle: Some(ref o), .. } if o == "exp"));
}

#[test]
fn parse_errors() {
    for bad in [
        r#"{"m":1,"n":0,"upper":[]}"#,
        r#"{"m":1,"n":0,"upper":[],"lower":[[0,1]],"extra":1}"#,
        r#"{"m":1,"n":0,"upper":[],"lower":[[0]]}"#,
        "[1, 2]",
        "{",
    ] {
        assert!(matches!(parse_document(bad), Err(CliError::Parse(_))), "{bad}");
    }
    let e = parse_document(r#"{"m":1,"n":0,"upper":[]}"#).unwrap_err();
    assert!(e.to_string().contains("lower"), "{e}");
}

#[test]
fn validation_errors() {
    let e = parse_document(
        r#"{"class":"C4","wright_block":[{"a":0,"alpha":1,"beta":1.2,"gamma":1}]}"#,
    )
    .unwrap_err();
    assert!(matches!(e, CliError::Validation(_)));
    assert!(e.to_string().contains("β_k ∈ (0,1)"), "{e}");
    for bad in [
        r#"{"m":1,"n":0,"p":2,"q":1,"upper":[[0.5,0.5]],"lower":[[0,1]]}"#,
        r#"{"m":2,"n":0,"upper":[],"lower":[[0,1]]}"#,
        r#"{"m":1,"n":0,"upper":[],"lower":[[0,-1]]}"#,
        r#"{"m":1,"n":0,"upper":[],"lower":[[0,1]],"c":0}"#,
        r#"{"class":"C9"}"#,
        r#"{"class":"C1"}"#,
    ] {
        assert!(matches!(parse_document(bad), Err(CliError::Validation(_))), "{bad}");
    }
}

#[test]
fn grids() {
    assert_eq!(parse_grid("1:2:2").unwrap(), vec![1.0, 2.0]);
    assert_eq!(parse_grid("0:1:5").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    let g = parse_grid("0.01:100:5:log").unwrap();
    for (a, b) in g.iter().zip([0.01, 0.1, 1.0, 10.0, 100.0]) {
        assert!((a / b - 1.0).abs() < 1e-14);
    }
    assert_eq!(parse_grid("3:3:1").unwrap(), vec![3.0]);
    for bad in ["1:2", "a:2:3", "1:2:0", "2:1:3", "0:1:3:log", "1:2:3:lin", "1:2:3:log:x"] {
        assert!(matches!(parse_grid(bad), Err(CliError::Parse(_))), "{bad}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(CliError::Parse(String::new()).exit_code(), 2);
    assert_eq!(CliError::Validation(String::new()).exit_code(), 3);
    assert_eq!(CliError::Eval(String::new()).exit_code(), 4);
    assert_eq!(CliError::Acceptance(String::new()).exit_code(), 5);
}
