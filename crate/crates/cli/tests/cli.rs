//! End-to-end tests of the binary: exit codes, formats, reproducibility,
//! and the budget override.

use std::path::PathBuf;
use std::process::{Command, Output};

fn netscope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netscope"))
        .args(args)
        .env_remove("NETSCOPE_BUDGET")
        .output()
        .expect("binary runs")
}

fn netscope_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netscope"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("netscope-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn gen_net(dir: &PathBuf, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let mut full = vec!["net", "gen"];
    full.extend_from_slice(args);
    full.push("--out");
    let path_str = path.to_str().unwrap().to_string();
    full.push(&path_str);
    let out = netscope(&full);
    assert!(out.status.success(), "net gen failed: {}", String::from_utf8_lossy(&out.stderr));
    path_str
}

#[test]
fn gen_check_happy_path() {
    let dir = tempdir();
    let net = gen_net(&dir, "h24.json", &["--construction", "hammersley", "--b", "2", "--n", "4"]);
    assert!(std::fs::read_to_string(&net).unwrap().contains("\"b\": 2"));

    let out = netscope(&["net", "check", "--in", &net, "--sigma", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("1,0,independence"), "{text}");

    // the order-2 certificate for the reversal pair is v = n
    let out = netscope(&["net", "check", "--in", &net, "--sigma", "2", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["v"], 4);
    assert_eq!(v["routes_agree"], true);
}

#[test]
fn points_csv_format() {
    let dir = tempdir();
    let net = gen_net(&dir, "h22.json", &["--construction", "hammersley", "--b", "2", "--n", "2"]);
    let out = netscope(&["net", "points", "--in", &net]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "nu,coord_1_num,coord_2_num,denominator");
    assert_eq!(lines.next().unwrap(), "0,0,0,4");
}

#[test]
fn usage_errors_exit_2() {
    let out = netscope(&["net", "gen", "--construction", "faure", "--b", "3", "--n", "2"]);
    assert_eq!(out.status.code(), Some(2), "missing --d must be a usage error");

    let out = netscope(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_net_file_exit_1() {
    let dir = tempdir();
    let path = dir.join("bad.json");
    std::fs::write(&path, r#"{"b":4,"s":2,"n":2,"d":1,"matrices":[[[1,0],[0,1]]]}"#).unwrap();
    let out = netscope(&["net", "check", "--in", path.to_str().unwrap(), "--sigma", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not prime"));
}

#[test]
fn budget_exceeded_exit_3() {
    let dir = tempdir();
    let net = gen_net(
        &dir,
        "ilf.json",
        &["--construction", "interlaced-faure", "--b", "3", "--n", "3", "--d", "2"],
    );
    let out = netscope(&["dual", "enum", "--in", &net, "--budget", "100"]);
    assert_eq!(out.status.code(), Some(3));

    // the environment override behaves the same
    let out = netscope_env(&["dual", "enum", "--in", &net], "NETSCOPE_BUDGET", "100");
    assert_eq!(out.status.code(), Some(3));
    // and the flag wins over the environment
    let out = netscope_env(
        &["dual", "enum", "--in", &net, "--budget", "10000000"],
        "NETSCOPE_BUDGET",
        "100",
    );
    assert!(out.status.success());
}

#[test]
fn dual_enum_deterministic_bytes() {
    let dir = tempdir();
    let net = gen_net(&dir, "f33.json", &["--construction", "faure", "--b", "3", "--n", "3", "--d", "3"]);
    let a = netscope(&["dual", "enum", "--in", &net]);
    let b = netscope(&["dual", "enum", "--in", &net]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "reruns must be byte-identical");
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("t_1,t_2,t_3,rho1,rho2,re,im\n"));
    // zero vector first, with character sum b^n
    assert!(text.lines().nth(1).unwrap().starts_with("0,0,0,0,0,2.7"));
}

#[test]
fn discrepancy_l2_oracle_pair_via_cli() {
    let dir = tempdir();
    let net = gen_net(&dir, "h25.json", &["--construction", "hammersley", "--b", "2", "--n", "5"]);
    let out = netscope(&[
        "discrepancy", "l2", "--in", &net, "--method", "both", "--jmax", "11", "--format", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let gap = v["relative_sq_gap"].as_f64().unwrap();
    assert!(gap <= 1e-3, "oracle pair disagrees: {gap}");
}

#[test]
fn discrepancy_besov_rejects_inadmissible() {
    let dir = tempdir();
    let net = gen_net(&dir, "h23.json", &["--construction", "hammersley", "--b", "2", "--n", "3"]);
    let out = netscope(&["discrepancy", "besov", "--in", &net, "--p", "1", "--q", "1", "--r", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("inadmissible"));
    // force computes the experimental form anyway
    let out = netscope(&[
        "discrepancy", "besov", "--in", &net, "--p", "1", "--q", "1", "--r", "1.5", "--force",
    ]);
    assert!(out.status.success());
}

#[test]
fn haar_coeffs_header_and_budget() {
    let dir = tempdir();
    let net = gen_net(&dir, "h22b.json", &["--construction", "hammersley", "--b", "2", "--n", "2"]);
    let out = netscope(&["haar", "coeffs", "--in", &net, "--jmax", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("j_1,j_2,m_1,m_2,l_1,l_2,re,im,abs\n"));
    // dump size is gated by the budget
    let out = netscope(&["haar", "coeffs", "--in", &net, "--jmax", "2", "--budget", "3"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_duality_on_file() {
    let dir = tempdir();
    let net = gen_net(&dir, "h24v.json", &["--construction", "hammersley", "--b", "2", "--n", "4"]);
    let out = netscope(&["verify", "duality", "--in", &net, "--format", "json"]);
    assert!(out.status.success());
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(reports.as_array().unwrap().len(), 2); // sigma 1 and 2
    for r in reports.as_array().unwrap() {
        assert_eq!(r["status"], "pass");
    }
}

#[test]
fn verify_walsh_sum_csv() {
    let dir = tempdir();
    let net = gen_net(&dir, "h23w.json", &["--construction", "hammersley", "--b", "2", "--n", "3"]);
    // single-instance runs emit the classified dual table
    let out = netscope(&["verify", "walsh-sum", "--in", &net]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t_1,t_2,rho1,rho2,re,im\n"));
    assert_eq!(text.lines().count(), 1 + 8); // header + 2^(ds-n) dual vectors
    // every dual character sum equals b^n = 8
    for line in text.lines().skip(1) {
        assert!(line.contains(",8.0000000000000000e0,"), "{line}");
    }
    // the JSON view carries the check verdict instead
    let out = netscope(&["verify", "walsh-sum", "--in", &net, "--format", "json"]);
    assert!(out.status.success());
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(reports[0]["check"], "walsh-character");
    assert_eq!(reports[0]["status"], "pass");
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempdir();
    let net = gen_net(&dir, "h22c.json", &["--construction", "hammersley", "--b", "2", "--n", "2"]);
    let cfg_path = dir.join("cfg.json");
    std::fs::write(&cfg_path, r#"{"format": "json", "budget": 1000000}"#).unwrap();
    let out = netscope(&["net", "points", "--in", &net, "--config", cfg_path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["denominator"], 4);
}

#[test]
fn pascal_supplier_accepts_base_below_dimension() {
    let dir = tempdir();
    // construct_faure refuses b < d, the ungated Pascal supplier does not
    let out = netscope(&["net", "gen", "--construction", "faure", "--b", "3", "--n", "2", "--d", "4"]);
    assert_eq!(out.status.code(), Some(1));
    let net = gen_net(&dir, "p4.json", &["--construction", "pascal", "--b", "3", "--n", "2", "--d", "4"]);
    let text = std::fs::read_to_string(&net).unwrap();
    assert!(text.contains("\"d\": 4"));
}
