use std::process::{Command, Output};

use serde_json::Value;

const Z1: &str = r#"{"terms":[{"i":1,"j":0,"re":1.0,"im":0.0}]}"#;
const Z2: &str = r#"{"terms":[{"i":0,"j":1,"re":1.0,"im":0.0}]}"#;
const ONE: &str = r#"{"terms":[{"i":0,"j":0,"re":1.0,"im":0.0}]}"#;

fn bidisk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bidisk"))
        .args(args)
        .env("BIDISK_LOG", "quiet")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn kernel_check_counterexample_and_exit_code() {
    let out = bidisk(&["kernel-check", "--phi", Z1, "--psi", Z1, "--trials", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "not positive");
    assert!(v["certificate"]["value"].as_f64().unwrap() < -0.3);
    assert_eq!(v["certificate"]["coeffs"][0].as_array().unwrap().len(), 2);

    let out = bidisk(&["kernel-check", "--phi", Z1, "--psi", Z1, "--trials", "50", "--fail-on-negative"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kernel_check_positive_cases() {
    let v = json(&bidisk(&["kernel-check", "--phi", Z1, "--psi", Z2, "--trials", "100"]));
    assert_eq!(v["verdict"], "no counterexample found");
    assert!(v.get("certificate").is_none());

    let v = json(&bidisk(&["kernel-check", "--kernel", r#"{"kind":"szego"}"#, "--trials", "100", "--seed", "4"]));
    assert_eq!(v["verdict"], "no counterexample found");
    assert!(v["worst_min_eig"].as_f64().unwrap() >= -1e-10);
    assert_eq!(v["seed"], 4);
    assert_eq!(v["trials"], 100);
}

#[test]
fn comp_norm_csv_and_summary() {
    let out = bidisk(&["comp-norm", "--phi", Z1, "--psi", Z2, "--n-list", "1,2,3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let (csv, summary) = text.split_once("\n\n").unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("N,norm,bound"));
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert!((fields[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    }
    let v: Value = serde_json::from_str(summary).unwrap();
    assert_eq!(v["bound"], 1.0);
    assert!(v["stabilized"].is_boolean());
}

#[test]
fn comp_norm_diagonal_map_grows() {
    let out = bidisk(&["comp-norm", "--phi", Z1, "--psi", Z1, "--n-list", "1,2,3,4,5,6,7,8"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let (_, summary) = text.split_once("\n\n").unwrap();
    let v: Value = serde_json::from_str(summary).unwrap();
    assert_eq!(v["stabilized"], false);
    assert!((v["last_norm"].as_f64().unwrap() - 3.0).abs() < 1e-10);
}

#[test]
fn mult_norm_of_constant_one() {
    let v = json(&bidisk(&["mult-norm", "--psi", ONE, "--set-size", "5"]));
    let deltas = v["delta_by_set_size"].as_array().unwrap();
    assert_eq!(deltas.len(), 5);
    for d in deltas {
        assert!((d["delta"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn mate_check_and_decompose() {
    let phi = r#"{"terms":[{"i":1,"j":0,"re":0.5,"im":0.0},{"i":0,"j":1,"re":0.5,"im":0.0}]}"#;
    let a = r#"{"terms":[{"i":1,"j":0,"re":0.5,"im":0.0},{"i":0,"j":1,"re":-0.5,"im":0.0}]}"#;
    let v = json(&bidisk(&["mate-check", "--phi", phi, "--a", a]));
    assert_eq!(v["equal"], true);

    let f = r#"{"terms":[{"i":1,"j":1,"re":1.0,"im":0.0}]}"#;
    let v = json(&bidisk(&["decompose", "--form", "ex3", "--f", f]));
    assert_eq!(v["form"], "ex3");
    assert_eq!(v["f1"]["terms"][0]["i"], 2);
    assert_eq!(v["f3"]["terms"][0]["re"], -1.0);
}

#[test]
fn config_errors_exit_one() {
    assert_eq!(bidisk(&[]).status.code(), Some(1));
    assert_eq!(bidisk(&["comp-norm", "--phi", Z1]).status.code(), Some(1));
    assert_eq!(bidisk(&["mate-check", "--phi", "/nonexistent/phi.json", "--a", Z1]).status.code(), Some(1));
    assert_eq!(bidisk(&["decompose", "--form", "ex1", "--f", "{not json"]).status.code(), Some(1));
    let two = r#"{"terms":[{"i":1,"j":0,"re":2.0,"im":0.0}]}"#;
    let out = bidisk(&["kernel-check", "--phi", two, "--psi", Z1]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"]["kind"], "math");
}

#[test]
fn config_file_with_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("f.json"), r#"{"terms":[{"i":2,"j":1,"re":1.0,"im":0.0}]}"#).unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"command":"decompose","form":"ex2","f":"f.json","out":"report.json"}"#,
    )
    .unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = bidisk(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["form"], "ex2");
    assert_eq!(report["f3"]["terms"][0]["i"], 1);
}
