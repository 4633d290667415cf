use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quotient-coho")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut a = vec!["--format", "json"];
    a.extend_from_slice(args);
    let o = run(&a);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn verify_m11_rows() {
    let v = json(&["verify-paper", "--filter", "M11"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert_eq!(r["pass"], true);
        let fujiki = r["checks"].as_array().unwrap().iter().find(|c| c["what"] == "Fujiki constant").unwrap();
        assert_eq!(fujiki["found"], "33");
    }
}

#[test]
fn weight2d_five_two() {
    let v = json(&["weight2d", "5", "2"]);
    assert_eq!(v["weight"], 1);
    assert_eq!(v["hj"], serde_json::json!([3, 2]));
    let t = stdout(&run(&["weight2d", "5", "2"]));
    assert!(t.contains("[3,2]"));
}

#[test]
fn normality_by_alias() {
    let v = json(&["normality", "k3-sympl-7"]);
    assert_eq!(v["verdict"], "normal");
    assert_eq!(v["criterion"], "first2");
}

#[test]
fn counterexample_is_not_normal() {
    let v = json(&["normality", "counterexample"]);
    assert_eq!(v["verdict"], "not_normal");
}

#[test]
fn json_is_deterministic() {
    let a = run(&["--format", "json", "verify-paper"]);
    let b = run(&["--format", "json", "verify-paper"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sigma_product_expansion() {
    let v = json(&["hilb2", "--x", "g0=1,d=1", "--y", "g1=1"]);
    assert_eq!(v["bb"], "1");
    let t = stdout(&run(&["hilb2"]));
    assert!(t.contains("determinant   32"));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(run(&["normality", "no-such-entry"]).status.code(), Some(2));
    assert_eq!(run(&["weight2d", "6", "1"]).status.code(), Some(2));
    assert_eq!(run(&["lattice", "Q7"]).status.code(), Some(2));
    assert_eq!(run(&["hilb2", "--x", "g40=1"]).status.code(), Some(2));
    assert_eq!(run(&["verify-paper", "--filter", "zzz"]).status.code(), Some(2));
}

#[test]
fn failing_check_exits_one() {
    let dir = std::env::temp_dir().join(format!("qc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let m3 = include_str!("../../core/data/m3.json");
    let broken = m3.replacen("\"fujiki_constant\": 9,", "\"fujiki_constant\": 10,", 1);
    assert_ne!(broken, m3, "fixture edit did not apply");
    std::fs::write(dir.join("m3.json"), broken).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_quotient-coho"))
        .args(["verify-paper"])
        .env("QUOTIENT_COHO_CATALOG", &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("first failing row: M3"));
    std::fs::remove_dir_all(&dir).unwrap();
}
