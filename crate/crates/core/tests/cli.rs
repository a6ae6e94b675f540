use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orlicz-eig")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn validate_young_reports_exponents() {
    let out = run(&["validate-young", "--young", "power:2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["result"]["exponents"]["p_minus"], 2.0);
    assert_eq!(v["result"]["exponents"]["p_plus"], 2.0);

    let out = run(&["validate-young", "--young", "powersum:2,1,4,1"]);
    assert_eq!(out.status.code(), Some(0));
    let e = &json(&out)["result"]["exponents"];
    assert!((e["p_minus"].as_f64().unwrap() - 2.0).abs() < 1e-3);
    assert!((e["p_plus"].as_f64().unwrap() - 4.0).abs() < 1e-3);

    assert_eq!(run(&["validate-young", "--young", "power:0.9"]).status.code(), Some(2));
    assert_eq!(run(&["validate-young", "--young", "cosh"]).status.code(), Some(2));
}

#[test]
fn eig_classical_limit_and_admission() {
    let out = run(&["eig", "--young", "power:2", "--s", "1", "--n", "256"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["result"]["lambda"].as_f64().unwrap() - std::f64::consts::PI).abs() < 2e-3);
    assert_eq!(v["config"]["n"], 256);
    assert_eq!(v["config"]["s"], 1.0);

    let out = run(&["eig", "--young", "power:1.5", "--s", "1", "--n", "64"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert_eq!(run(&["eig", "--young", "power:1.5", "--s", "0.5", "--n", "64"]).status.code(), Some(0));
}

#[test]
fn eig_nonconvergence_exits_one() {
    let out = run(&["eig", "--young", "power:3", "--s", "0.5", "--n", "32", "--config", "/dev/stdin"]);
    // empty config file is accepted
    assert_eq!(out.status.code(), Some(0));
    let dir = std::env::temp_dir().join(format!("oe-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("short.cfg");
    std::fs::write(&cfg, "# too few iterations\nmax_iters = 1\n").unwrap();
    let out = run(&["eig", "--young", "power:3", "--s", "0.5", "--n", "32", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["result"]["converged"], false);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn outputs_are_deterministic() {
    let args = ["eig", "--young", "powerlog:2", "--s", "0.5", "--n", "24", "--seed", "5"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let args = ["validate-young", "--young", "power:3", "--seed", "3", "--csv"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn csv_layouts() {
    let out = run(&["barg", "--young", "power:3", "--n-dim", "1", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,G,G_bar,ratio"));
    for line in lines {
        let ratio: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((ratio - 2.0 / 3.0).abs() < 1e-8);
    }

    let out = run(&["barg", "--young", "power:2", "--csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| (l.rsplit(',').next().unwrap().parse::<f64>().unwrap() - 1.0).abs() < 1e-8));

    let out = run(&["eig", "--young", "power:2", "--s", "1", "--n", "8", "--csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("x,u\n0,0\n"));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn sweep_with_single_order_has_no_gap() {
    let out = run(&["sweep", "--young", "power:2", "--s-list", "0.9", "--n", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["result"]["gap"].is_null());
    assert!(v["result"]["extrapolated_limit"].is_null());
    assert_eq!(v["result"]["points"].as_array().unwrap().len(), 1);
    assert_eq!(run(&["sweep", "--s-list", "0.9,0.5"]).status.code(), Some(2));
}

#[test]
fn bbm_and_oracle_commands() {
    let out = run(&["bbm", "--young", "power:2", "--s-list", "0.9,0.99", "--n", "64"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["result"]["gap"].as_f64().unwrap() <= 0.02);

    // n = 3: K = 3 [2 -1; -1 2], M = [4 1; 1 4] / 18
    let out = run(&["oracle-p2", "--s", "1", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    assert!((r["lambda1"].as_f64().unwrap() - 10.8f64.sqrt()).abs() < 1e-10);
    assert!((r["lambda2"].as_f64().unwrap() - 54f64.sqrt()).abs() < 1e-10);
    assert_eq!(run(&["oracle-p2", "--s", "1", "--n", "2"]).status.code(), Some(1));
    assert_eq!(run(&["oracle-p2", "--young", "power:3"]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_file_and_domain_accepts_negatives() {
    let path = std::env::temp_dir().join(format!("oe-eig-{}.json", std::process::id()));
    let out = run(&["eig", "--s", "1", "--n", "64", "--domain", "-1,1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(v["config"]["domain"], serde_json::json!([-1.0, 1.0]));
    assert!((v["result"]["lambda"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-3);
}

#[test]
fn help_documents_columns_and_exit_codes() {
    let out = run(&["--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("CSV columns") && text.contains("Exit codes"));
    assert_eq!(run(&["eig", "--bogus"]).status.code(), Some(2));
}

#[test]
fn props_suite_passes() {
    let out = run(&["props", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let checks = json(&out)["result"]["checks"].as_array().unwrap().clone();
    assert!(checks.len() > 20);
    assert!(checks.iter().all(|c| c["passed"] == true));
}
