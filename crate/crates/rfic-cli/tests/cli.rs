//! End-to-end checks of the `rfic` binary: flag handling, output routing,
//! exit codes, seeding, and thread-count independence of the output bytes.

use std::process::{Command, Output};

fn rfic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rfic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

#[test]
fn oracle_check_reports_a_tiny_error_and_succeeds() {
    let out = rfic(&["oracle-check", "--n", "10", "--trials", "20", "--seed", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let value: f64 = text
        .trim()
        .strip_prefix("max_rel_err=")
        .expect("summary line")
        .parse()
        .expect("numeric error");
    assert!(value <= 1e-10, "max_rel_err {value}");
}

#[test]
fn oracle_check_fails_when_the_bar_is_impossible() {
    let out = rfic(&[
        "oracle-check",
        "--n",
        "8",
        "--trials",
        "5",
        "--seed",
        "1",
        "--tol",
        "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn extrema_writes_the_table_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.csv");
    let out = rfic(&[
        "extrema",
        "--law",
        "gauss:1",
        "--gamma",
        "8",
        "--n",
        "10000",
        "--seed",
        "7",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty(), "data must not leak to stdout");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,kind,u,u_plus,level,t"));
    let first = lines.next().expect("at least one record");
    assert!(first.starts_with("1,"), "row {first}");
}

#[test]
fn rg_defaults_to_json_with_a_containment_field() {
    let out = rfic(&[
        "rg", "--law", "gauss:1", "--gamma", "5", "--n", "10000", "--seed", "3",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("JSON on stdout");
    assert_eq!(value["containment"], serde_json::Value::Bool(true));
    assert!(value["j_star"].as_u64().unwrap() > 0);
}

#[test]
fn unknown_flags_exit_with_usage_code_two() {
    let out = rfic(&["extrema", "--gamma", "5", "--n", "10", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = rfic(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn env_seed_matches_the_flag() {
    let flagged = rfic(&["extrema", "--gamma", "6", "--n", "3000", "--seed", "42"]);
    let env = Command::new(env!("CARGO_BIN_EXE_rfic"))
        .args(["extrema", "--gamma", "6", "--n", "3000"])
        .env("RFIC_SEED", "42")
        .output()
        .unwrap();
    assert!(flagged.status.success() && env.status.success());
    assert_eq!(stdout(&flagged), stdout(&env));

    // The explicit flag wins over the environment.
    let overridden = Command::new(env!("CARGO_BIN_EXE_rfic"))
        .args(["extrema", "--gamma", "6", "--n", "3000", "--seed", "42"])
        .env("RFIC_SEED", "9000")
        .output()
        .unwrap();
    assert_eq!(stdout(&flagged), stdout(&overridden));
}

#[test]
fn discrepancy_output_is_identical_across_thread_counts() {
    let base = [
        "discrepancy",
        "--law",
        "gauss:1",
        "--gamma",
        "5,8",
        "--replicas",
        "24",
        "--seed",
        "11",
    ];
    let one = rfic(&[&base[..], &["--threads", "1"]].concat());
    let four = rfic(&[&base[..], &["--threads", "4"]].concat());
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout, "output depends on worker count");
    let text = stdout(&one);
    assert!(text.starts_with("gamma,estimate,stderr,kept,dropped,gamma_scaled"));
}

#[test]
fn sweep_config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.json");
    std::fs::write(
        &path,
        r#"{"law": "gauss:1", "gamma": [5.0], "replicas": 8, "seed": 11}"#,
    )
    .unwrap();

    let from_config = rfic(&["discrepancy", "--config", path.to_str().unwrap()]);
    assert!(from_config.status.success());
    let from_flags = rfic(&[
        "discrepancy",
        "--law",
        "gauss:1",
        "--gamma",
        "5",
        "--replicas",
        "8",
        "--seed",
        "11",
    ]);
    assert_eq!(stdout(&from_config), stdout(&from_flags));

    // An explicit flag overrides the config value.
    let overridden = rfic(&[
        "discrepancy",
        "--config",
        path.to_str().unwrap(),
        "--replicas",
        "4",
    ]);
    let line = stdout(&overridden);
    let row = line.lines().nth(1).expect("one data row");
    let kept: u64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert_eq!(kept, 4, "row {row}");
}

#[test]
fn atomic_law_rg_warns_but_reports() {
    let out = rfic(&[
        "rg",
        "--law",
        "twopoint:2",
        "--gamma",
        "20",
        "--n",
        "4000",
        "--seed",
        "2",
    ]);
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.contains("atoms"), "stderr: {err}");
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(value.get("containment").is_some());
}

#[test]
fn json_format_mirrors_the_csv_rows() {
    let out = rfic(&[
        "scaling", "--gamma", "6", "--n", "200", "--seed", "4", "--format", "json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = value.as_array().expect("array of row objects");
    assert_eq!(rows.len(), 1);
    assert!(rows[0]["mean_gap_excess"].as_f64().unwrap() > 0.0);
}
