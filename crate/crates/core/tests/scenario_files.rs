use std::path::PathBuf;

use quotient_coho::catalog::{builtin_catalog, catalog_from_dir, verify_catalog};
use quotient_coho::scenario::{load_scenario, parse_scenario};
use quotient_coho::ScenarioError;

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

#[test]
fn m3_file_loads() {
    let s = load_scenario(&data_dir().join("m3.json")).unwrap();
    assert_eq!(s.prime, 3);
    assert_eq!(s.fixed_locus.isolated_count(), 27);
    assert_eq!(s.invariant_lattice_expr.as_deref(), Some("U+U(3)^2+A2(-1)^2+(-2)"));
    assert_eq!(s.profile.degree(4).l(1), 15);
}

#[test]
fn directory_matches_builtin() {
    let from_dir = catalog_from_dir(&data_dir()).unwrap();
    let mut a: Vec<String> = from_dir.iter().map(|s| s.name.clone()).collect();
    let mut b: Vec<String> = builtin_catalog().unwrap().iter().map(|s| s.name.clone()).collect();
    a.sort();
    b.sort();
    assert_eq!(a, b);
}

#[test]
fn verification_is_deterministic() {
    let c = builtin_catalog().unwrap();
    let a = serde_json::to_string(&verify_catalog(&c, None)).unwrap();
    let b = serde_json::to_string(&verify_catalog(&c, None)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn schema_errors_carry_paths() {
    let text = r#"{"name": "x", "prime": 5, "complex_dimension": 2,
        "fixed_locus": {"isolated": [{"count": "three"}]}}"#;
    match parse_scenario(text) {
        Err(ScenarioError::SchemaError { path, .. }) => assert!(path.contains("isolated[0].count"), "{path}"),
        other => panic!("{other:?}"),
    }
    let missing = r#"{"name": "x", "complex_dimension": 2}"#;
    assert!(matches!(parse_scenario(missing), Err(ScenarioError::SchemaError { .. })));
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(load_scenario(&data_dir().join("nope.json")), Err(ScenarioError::Io(_))));
}
