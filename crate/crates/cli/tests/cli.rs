use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn syncrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_syncrank")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = syncrank(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn simulate_prints_a_trial_record() {
    let out = ok(&["simulate", "--n", "30", "--snr-db", "10", "--seed", "4", "--certify"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["tau"], 1.0);
    assert_eq!(v["certified"], true);
    assert_eq!(v["snr_db"], 10.0);
    assert!(v["certificate"]["lambda_2"].as_f64().unwrap() > 0.0);
}

#[test]
fn simulate_writes_report_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    ok(&["simulate", "--n", "40", "--sigma", "2", "--trace", "--out", d]);
    assert_eq!(json(&dir.path().join("report.json"))["sigma"], 2.0);
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("t,step,dist_to_truth,min_modulus\n"));
    assert!(trace.lines().count() > 1);
}

#[test]
fn noise_flag_is_required_and_exclusive() {
    assert!(!syncrank(&["simulate", "--n", "10"]).status.success());
    assert!(!syncrank(&["simulate", "--n", "10", "--sigma", "1", "--c0", "1"]).status.success());
    assert!(!syncrank(&["simulate", "--n", "1", "--sigma", "1"]).status.success());
}

#[test]
fn heatmap_is_reproducible_and_honours_flags() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        ok(&[
            "heatmap", "--n", "20,30", "--snr-db", "-20,0", "--trials", "3", "--seed", "9", "--workers", "2",
            "--out", d.path().to_str().unwrap(),
        ]);
    }
    let ta = fs::read(a.path().join("trials.csv")).unwrap();
    assert_eq!(ta, fs::read(b.path().join("trials.csv")).unwrap());
    let rows: Vec<csv::StringRecord> =
        csv::Reader::from_reader(&ta[..]).records().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows.len(), 12);
    let cells = fs::read_to_string(a.path().join("cells.csv")).unwrap();
    assert_eq!(cells.lines().count(), 5);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.json");
    fs::write(&cfg, r#"{"n_values": [20], "noise_axis": {"c0": [0.3, 8.1]}, "trials_per_cell": 2, "base_seed": 1}"#)
        .unwrap();
    let out = dir.path().join("out");
    ok(&[
        "c0-sweep", "--config", cfg.to_str().unwrap(), "--trials", "1", "--format", "json",
        "--out", out.to_str().unwrap(),
    ]);
    let trials = json(&out.join("trials.json"));
    assert_eq!(trials.as_array().unwrap().len(), 2);
    assert_eq!(trials[1]["c0"], 8.1);
    assert!(out.join("cells.json").exists());

    // An SNR axis is rejected for a c0 sweep.
    assert!(!syncrank(&["c0-sweep", "--snr-db", "0", "--n", "20", "--out", out.to_str().unwrap()]).status.success());
}

#[test]
fn rank_reads_comparisons_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("games.csv");
    // Items 0..4 with ranks [2, 0, 3, 1].
    let ranks = [2i32, 0, 3, 1];
    let mut text = String::from("i,j,value\n");
    for i in 0..4 {
        for j in i + 1..4 {
            text += &format!("{i},{j},{}\n", ranks[i] - ranks[j]);
        }
    }
    fs::write(&input, text).unwrap();
    let out = dir.path().join("out");
    ok(&["rank", "--input", input.to_str().unwrap(), "--certify", "--trace", "--out", out.to_str().unwrap()]);
    let report = json(&out.join("report.json"));
    assert_eq!(report["ranks"], serde_json::json!([2, 0, 3, 1]));
    assert_eq!(report["certificate"]["certified"], true);
    assert!(report.get("trace").is_none_or(|t| t.is_null()));
    assert!(out.join("trace.csv").exists());

    let dup = dir.path().join("dup.csv");
    fs::write(&dup, "i,j,value\n0,1,1\n1,0,-1\n").unwrap();
    let res = syncrank(&["rank", "--input", dup.to_str().unwrap()]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("duplicate comparison for pair (1, 0)"));
}

#[test]
fn instance_report_has_monotone_angles() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["instance", "--seed", "2", "--out", dir.path().to_str().unwrap()]);
    let r = json(&dir.path().join("report.json"));
    assert_eq!(r["predicted_ranks"], r["true_ranks"]);
    assert_eq!(r["n"], 30);
    assert!(dir.path().join("trace.csv").exists());
}

#[test]
fn certify_campaign_counts_certified_trials() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&["certify", "--n", "40", "--c0", "0.25", "--trials", "3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "certified 3/3 trials");
    assert!(dir.path().join("trials.csv").exists());
}
