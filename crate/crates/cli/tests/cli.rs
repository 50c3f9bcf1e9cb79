use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dperm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dperm")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_then_trace_own_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("code");
    let gen = dperm(&["gen", "--n", "4", "--xi", "0.1", "--seed", "7", "--out", s(&out)]);
    assert_eq!(code(&gen), 0);
    assert_eq!(json(&gen)["d_core"], 5903);
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["params"]["d_core"], 5903);
    assert_eq!(manifest["seed"], 7);

    let book = fs::read_to_string(out.join("codebook.txt")).unwrap();
    let row2 = book.lines().nth(3).unwrap();
    let word = dir.path().join("word.txt");
    fs::write(&word, format!("{row2}\n")).unwrap();
    let (book_path, secret_path) = (out.join("codebook.txt"), out.join("secret.json"));
    let args = ["trace", "--codebook", s(&book_path), "--secret", s(&secret_path)];
    let traced = dperm(&[&args[..], &["--word", s(&word)]].concat());
    assert_eq!(code(&traced), 0);
    assert_eq!(json(&traced)["accused"], 2);

    fs::write(&word, "0".repeat(row2.len())).unwrap();
    let zero = dperm(&[&args[..], &["--word", s(&word)]].concat());
    assert_eq!(code(&zero), 0);
    assert!(json(&zero)["accused"].is_null());

    fs::write(&word, &row2[..row2.len() - 1]).unwrap();
    assert_eq!(code(&dperm(&[&args[..], &["--word", s(&word)]].concat())), 2);
}

#[test]
fn mismatched_secret_is_an_integrity_error() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&dperm(&["gen", "--n", "3", "--d", "50", "--seed", "1", "--out", s(&a)])), 0);
    assert_eq!(code(&dperm(&["gen", "--n", "3", "--d", "50", "--seed", "2", "--out", s(&b)])), 0);
    let word = dir.path().join("w.txt");
    fs::write(&word, "1".repeat(250)).unwrap();
    let out = dperm(&[
        "trace",
        "--codebook",
        s(&a.join("codebook.txt")),
        "--secret",
        s(&b.join("secret.json")),
        "--word",
        s(&word),
    ]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("mismatch"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&dperm(&["gen", "--n", "1"])), 2);
    assert_eq!(code(&dperm(&["gen"])), 2);
    assert_eq!(code(&dperm(&["gen", "--n", "four"])), 2);
    assert_eq!(code(&dperm(&["frobnicate"])), 2);
    assert_eq!(code(&dperm(&["attack", "--n", "4", "--adversary", "bribery"])), 2);
    assert_eq!(code(&dperm(&["audit-bias", "--n", "5", "--alpha", "0.7"])), 2);
    assert_eq!(code(&dperm(&["lowerbound", "--mechanisms", "oracle"])), 2);
    assert_eq!(code(&dperm(&["gen", "--n", "4", "--config", "/nonexistent/dperm.toml"])), 2);
    assert_eq!(code(&dperm(&["--help"])), 0);
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "[run]\nseed = 3\n\n[audit_bias]\nn = 7\nd = 400\nalpha = 0.5\n").unwrap();
    let out = dperm(&["audit-bias", "--config", s(&cfg), "--trials", "3"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# dperm audit-bias config="));
    assert!(text.contains("\"alpha\":0.5"));
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(data, ["0,3,1", "1,4,1", "2,5,1"]);

    let odd = dperm(&["audit-bias", "--config", s(&cfg), "--trials", "2", "--alpha", "0"]);
    let text = String::from_utf8(odd.stdout).unwrap();
    assert!(text.lines().filter(|l| !l.starts_with('#')).skip(1).all(|l| l.ends_with(",0")));

    fs::write(&cfg, "[audit_bias]\nn = 7\nalfa = 0.1\n").unwrap();
    assert_eq!(code(&dperm(&["audit-bias", "--config", s(&cfg)])), 2);
}

#[test]
fn attack_writes_stats_and_trial_log() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("attack");
    let run = dperm(&[
        "attack",
        "--n",
        "4",
        "--d",
        "300",
        "--adversary",
        "copy_first_row",
        "--trials",
        "10",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&run), 0);
    let report = json(&run);
    assert_eq!(report["stats"]["mean_violation_fraction"], 0.0);
    let stats: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("stats.json")).unwrap()).unwrap();
    let mut keys: Vec<&String> = stats.as_object().unwrap().keys().collect();
    keys.sort();
    assert_eq!(keys, ["completeness_failures", "false_accusations", "mean_violation_fraction", "trials"]);
    let log = fs::read_to_string(out.join("trials.csv")).unwrap();
    assert_eq!(log.lines().next(), Some("trial,accused,violation_fraction,in_F_beta"));
    assert_eq!(log.lines().count(), 11);
}

#[test]
fn lowerbound_csv_is_self_describing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lb");
    let run = dperm(&[
        "lowerbound", "--n", "60", "--d", "8", "--delta", "1e-3", "--p", "2", "--mechanisms", "exact_erm",
        "--trials", "2", "--out", s(&out),
    ]);
    assert_eq!(code(&run), 0);
    let csv = fs::read_to_string(out.join("lowerbound.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# dperm lowerbound config={\"seed\":0,\"trials\":2,"));
    assert_eq!(
        lines.next().unwrap(),
        "n,d,epsilon,delta,p,mechanism,status,reason,k,n_k,data_dim,trials,mean_excess,normalized_excess,\
         q50_excess,q95_excess,mean_l2_error,G,C,curve,c0,regime"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..12], ["60", "8", "1.0", "0.001", "2", "exact_erm", "ok", "", "7", "8", "40", "2"]);
    assert_eq!(row[12], "0.0");
    assert!(dperm_cli::commands::lowerbound::load_report(&out.join("report.json")).is_ok());
}

#[test]
fn tampered_report_fails_to_load() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lb");
    let run = dperm(&[
        "lowerbound", "--n", "60", "--d", "8", "--delta", "1e-3", "--p", "1", "--mechanisms", "gaussian_mean",
        "--trials", "3", "--out", s(&out),
    ]);
    assert_eq!(code(&run), 0);
    let path = out.join("report.json");
    let mut report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    report["cells"][0]["trials"][1]["excess_loss"] = serde_json::json!(123.0);
    fs::write(&path, report.to_string()).unwrap();
    let err = dperm_cli::commands::lowerbound::load_report(&path).unwrap_err();
    assert_eq!(err.exit_code(), 3);
}
