use std::process::{Command, Output};

fn ahx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ahx")).args(args).output().unwrap()
}

#[test]
fn constants_prints_json_with_value() {
    let out = ahx(&["constants", "--kind", "A", "--alpha", "0", "--p", "2", "--r", "0.5"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // |u_r| bound at α=0, p=2, r=1/2 equals sqrt(5/2)
    let a = v["value"].as_f64().unwrap();
    assert!((a - 2.5f64.sqrt()).abs() < 1e-8, "{a}");
}

#[test]
fn bad_arguments_exit_with_usage_code() {
    assert_eq!(ahx(&["constants", "--kind", "Z", "--alpha", "0"]).status.code(), Some(2));
    assert_eq!(ahx(&["constants", "--kind", "A", "--alpha", "-1.5", "--p", "2"]).status.code(), Some(2));
    assert_eq!(ahx(&["eval", "--alpha", "0", "--boundary", "exp:1", "--point", "1.5,0"]).status.code(), Some(2));
}

#[test]
fn eval_of_identity_boundary_gives_z() {
    let out = ahx(&["eval", "--alpha", "0", "--boundary", "exp:1", "--point", "0.5,0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let u: Vec<f64> = text.lines().next().unwrap().split_whitespace().skip(1).take(1).map(|s| s.parse().unwrap()).collect();
    assert!((u[0] - 0.5).abs() < 1e-10, "{text}");
}

#[test]
fn verify_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    std::fs::write(&cfg, "# small run\ntheorems=1.6,1.8\nalpha=0\np=2\nr=0.5\nboundary=exp:1\n").unwrap();
    let csv = dir.path().join("out.csv");
    let out = ahx(&["verify", "--config", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("theorem,alpha,p,r,boundary,lhs,rhs,margin,nodes,pass"));
    assert!(text.lines().count() > 2);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(csv.with_extension("json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), text.lines().count() - 1);
}

#[test]
fn verify_theorem_flag_restricts_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    std::fs::write(&cfg, "alpha=0\np=2\nr=0.5\nboundary=exp:1\n").unwrap();
    let csv = dir.path().join("out.csv");
    let out = ahx(&["verify", "--theorem", "1.6", "--config", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.lines().skip(1).all(|l| l.starts_with("1.6")), "{text}");
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    std::fs::write(&cfg, "alpah=0\n").unwrap();
    let out = ahx(&["verify", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("o.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sharpness_csv_approaches_target() {
    let out = ahx(&["sharpness", "--kind", "D", "--alpha", "0", "--rho", "0.9,0.99"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let last = text.lines().last().unwrap();
    let cols: Vec<&str> = last.split(',').collect();
    let ratio: f64 = cols[1].parse().unwrap();
    assert!((ratio - 4.0 / std::f64::consts::PI).abs() < 1e-8, "{text}");
}
