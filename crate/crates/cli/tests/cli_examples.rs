use std::process::{Command, Output};

use serde_json::Value;

fn rezeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rezeta"))
        .args(args)
        .env_remove("REZETA_THREADS")
        .env_remove("REZETA_CHECKPOINT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn sigma0_hundred_digits() {
    let o = rezeta(&["sigma0", "--digits", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let first = stdout(&o).lines().next().unwrap().to_string();
    let expected = "1.19234 73371 86193 20289 75044 27425 59788 34011 19230 83799 94301 37194 92990 52458 64848 30139 24084 99863 83788 36244"
        .replace(' ', "");
    assert_eq!(first, expected);
}

#[test]
fn sigma0_json() {
    let o = rezeta(&["sigma0", "--digits", "12", "--method", "arcsin", "--strategy", "bisect", "--emit", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["value"], "1.192347337186");
    assert_eq!(v["method"], "arcsin");
    assert_eq!(v["strategy"], "bisect");
    assert!(v["evaluations"].as_u64().unwrap() > 30);
}

#[test]
fn prime_zeta_value_and_bound() {
    let o = rezeta(&["prime-zeta", "--sigma", "2", "--digits", "15"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("P(2) = 0.452247420041065\n"), "{out}");
    let bound: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("error bound  "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(bound > 0.0 && bound <= 1e-15, "{bound}");
}

#[test]
fn scan_first_window_csv() {
    let o = rezeta(&["scan", "--from", "682112.5", "--to", "682113.5", "--emit", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "t_min,re_zeta_min,t_start,t_end,length\n682112.9169,-0.0028,682112.8913,682112.9443,0.0529\n"
    );
}

#[test]
fn mc_beyond_sigma0_has_no_hits() {
    let o = rezeta(&["mc", "--sigma", "2", "--trials", "1000", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["negative_hits"], 0);
    assert_eq!(v["trials"], 1000);
    assert_eq!(v["config"]["seed"], 1);
    assert!(v["tail"]["arg_bound"].as_f64().unwrap() > 0.0);
    for key in ["mean", "mean_se", "variance", "variance_re", "mean_abs2", "mean_abs2_se", "d_hat", "ci95", "degenerate"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    // Same seed, same answer.
    let again = rezeta(&["mc", "--sigma", "2", "--trials", "1000", "--seed", "1"]);
    assert_eq!(stdout(&o), stdout(&again));
}

#[test]
fn certify_reports_both_outcomes() {
    let ok = rezeta(&["certify", "--from", "10", "--to", "100", "--emit", "json"]);
    assert_eq!(ok.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&ok)).unwrap();
    assert_eq!(v["status"], "certified");
    let fail = rezeta(&["certify", "--from", "682112", "--to", "682113"]);
    assert_eq!(fail.status.code(), Some(0));
    assert!(stdout(&fail).starts_with("not certified: headroom exhausted at t = 682112.7"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["sigma0", "--digits", "10", "--bogus"],
        vec!["frobnicate"],
        vec!["sigma0", "--method", "newton"],
        vec!["sigma0", "--emit", "csv"],
        vec!["mc", "--trials", "10"],
        vec!["mc", "--sigma", "0.5", "--trials", "10"],
        vec!["prime-zeta", "--sigma", "0.9"],
        vec!["prime-zeta", "--sigma", "two"],
        vec!["scan", "--from", "100", "--to", "99"],
        vec!["table", "--rows", "51"],
        vec!["--threads", "0", "sigma0", "--digits", "5"],
    ] {
        let o = rezeta(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!stderr(&o).is_empty(), "{args:?}");
    }
    let help = rezeta(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("sigma0"));
}

#[test]
fn computation_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    std::fs::write(&file, "not a directory").unwrap();
    let ck = file.join("scan.jsonl");
    let o = rezeta(&["scan", "--from", "100", "--to", "100.1", "--checkpoint", ck.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).starts_with("computation failed"));
}

#[test]
fn output_flag_and_thread_variable() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let o = Command::new(env!("CARGO_BIN_EXE_rezeta"))
        .args(["mc", "--sigma", "1.5", "--trials", "2000", "--cutoff", "500", "-o", path.to_str().unwrap()])
        .env("REZETA_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.ends_with('\n'));
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["config"]["prime_cutoff"], 500);
    let bad = Command::new(env!("CARGO_BIN_EXE_rezeta"))
        .args(["sigma0", "--digits", "5"])
        .env("REZETA_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn table_first_row() {
    let o = rezeta(&["table", "--rows", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "t_min,re_zeta_min,t_start,t_end,length\n682112.9169,-0.0028,682112.8913,682112.9443,0.0529\n"
    );
}
