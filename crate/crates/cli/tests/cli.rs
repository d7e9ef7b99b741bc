//! CLI surface tests: exit codes, usage errors, emitted files.

use std::process::Command;

fn run(args: &[&str]) -> (Option<i32>, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lpslab")).args(args).output().expect("binary runs");
    (
        out.status.code(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn missing_seed_is_a_usage_error() {
    let (code, _, err) = run(&["selectors"]);
    assert_eq!(code, Some(2));
    assert!(err.contains("--seed"));
}

#[test]
fn zero_trials_is_a_usage_error() {
    let (code, _, err) = run(&["k-omega", "--seed", "1", "--trials", "0"]);
    assert_eq!(code, Some(2));
    assert!(err.contains("trials"));
}

#[test]
fn unknown_subcommand_and_flag_are_usage_errors() {
    let (code, _, _) = run(&["warp-drive", "--seed", "1"]);
    assert_eq!(code, Some(2));
    let (code, _, _) = run(&["selectors", "--seed", "1", "--warp", "9"]);
    assert_eq!(code, Some(2));
}

#[test]
fn help_prints_subcommands() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, Some(0));
    for sub in ["k-omega", "kest-scan", "entropy-scan", "reduce-demo", "decouple", "selectors", "verify-all"] {
        assert!(out.contains(sub), "usage text must mention {sub}");
    }
}

#[test]
fn corrupted_system_fails_verify_all() {
    let dir = std::env::temp_dir().join(format!("lpslab-corrupt-{}", std::process::id()));
    let (code, out, _) =
        run(&["verify-all", "--seed", "7", "--oversample", "1", "--out", dir.to_str().unwrap()]);
    assert_eq!(code, Some(1), "degraded quadrature must fail the orthogonality check");
    assert!(out.contains("[FAIL] trig_gram_offdiagonal"));
    // the summary still inventories the full suite of named checks
    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("record.json")).unwrap()).unwrap();
    let checks = record["checks"].as_array().unwrap();
    assert!(checks.len() >= 25, "verify-all lists {} named checks", checks.len());
    assert_eq!(
        checks.iter().filter(|c| c["pass"] == false).count(),
        1,
        "only the injected failure fails"
    );
}

#[test]
fn k_omega_csv_bytes_reproduce() {
    let dir = std::env::temp_dir().join(format!("lpslab-ko-rerun-{}", std::process::id()));
    let dir_s = dir.to_str().unwrap();
    let args = ["k-omega", "--seed", "5", "--n", "16", "--p", "3", "--trials", "5", "--out", dir_s];
    let (code, _, _) = run(&args);
    assert_eq!(code, Some(0));
    let draws = std::fs::read(dir.join("k_omega_draws.csv")).unwrap();
    let trend = std::fs::read(dir.join("k_omega_trend.csv")).unwrap();
    let (code, _, _) = run(&args);
    assert_eq!(code, Some(0));
    assert_eq!(draws, std::fs::read(dir.join("k_omega_draws.csv")).unwrap());
    assert_eq!(trend, std::fs::read(dir.join("k_omega_trend.csv")).unwrap());
}

#[test]
fn decouple_emits_expected_files() {
    let dir = std::env::temp_dir().join(format!("lpslab-files-{}", std::process::id()));
    let (code, _, _) = run(&[
        "decouple",
        "--seed",
        "3",
        "--families",
        "4",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code, Some(0));
    assert!(dir.join("decouple.csv").exists());
    assert!(dir.join("record.json").exists());
    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("record.json")).unwrap()).unwrap();
    assert_eq!(record["config"]["experiment"], "decouple");
    assert!(record["summary"]["max_ratio"].is_number());
    // no wall-clock fields unless --timings is passed
    assert!(record.get("started_at_unix_ms").is_none());
}

#[test]
fn per_experiment_outputs_are_byte_identical_on_rerun() {
    let dir = std::env::temp_dir().join(format!("lpslab-rerun-{}", std::process::id()));
    let dir_s = dir.to_str().unwrap();
    let args =
        ["decouple", "--seed", "11", "--families", "3", "--trials", "10000", "--out", dir_s];
    let (code, _, _) = run(&args);
    assert_eq!(code, Some(0));
    let first = std::fs::read(dir.join("decouple.csv")).unwrap();
    let first_record = std::fs::read(dir.join("record.json")).unwrap();
    let (code, _, _) = run(&args);
    assert_eq!(code, Some(0));
    assert_eq!(first, std::fs::read(dir.join("decouple.csv")).unwrap());
    assert_eq!(first_record, std::fs::read(dir.join("record.json")).unwrap());
}
