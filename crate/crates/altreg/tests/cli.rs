use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use altreg_core::adversary::{hedge_cycle_regret_oracle, oogd_iterate_oracle};
use serde_json::Value;

fn altreg(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_altreg"))
        .args(args)
        .current_dir(dir)
        .env_remove("ALTREG_OUT")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn hedge_cycle_summary_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let out = altreg(
        &["run", "--learner", "hedge", "--env", "hedge-cycle", "--eta", "1", "--horizons", "300", "--out", "o"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let s = summary(&dir.path().join("o"));
    let reg_alt = s["runs"][0]["reg_alt"].as_f64().unwrap();
    let oracle = hedge_cycle_regret_oracle(1.0, 100);
    assert!((reg_alt - oracle).abs() <= 1e-9 * oracle);
    assert_eq!(s["config"]["learner"]["eta"], 1.0);
    assert!(s["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert!(s["runs"][0]["certificates"]["hedge_identity_gap"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn constant_learner_at_best_fixed_has_zero_regret() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"learner": {"kind": "constant", "point": "best-fixed"},
            "environment": {"kind": "random-bounded", "dim": 3}, "horizons": [200], "seed": 4}"#,
    );
    let out = altreg(&["run", "--config", &cfg, "--out", "o"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(summary(&dir.path().join("o"))["runs"][0]["reg_alt"], 0.0);
}

#[test]
fn oogd_trace_matches_iterate_forms() {
    let dir = tempfile::tempdir().unwrap();
    let out = altreg(
        &["run", "--learner", "oogd", "--env", "pm-alternating", "--eta", "0.01", "--horizons", "10000", "--out", "o"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let mut reader = csv::Reader::from_path(dir.path().join("o/trace.csv")).unwrap();
    let mut checked = 0;
    for row in reader.records() {
        let row = row.unwrap();
        let t: usize = row[0].parse().unwrap();
        let x: [f64; 2] = [row[1].parse().unwrap(), row[2].parse().unwrap()];
        if let Ok(p) = oogd_iterate_oracle(0.01, t) {
            assert!((p[0] - x[0]).abs() <= 1e-12 && (p[1] - x[1]).abs() <= 1e-12, "t {t}");
            checked += 1;
        }
        // OOGD has no commutator column value
        assert_eq!(&row[7], "");
    }
    assert_eq!(checked, 10_000 - 8);
}

#[test]
fn repeated_runs_give_identical_traces() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"learner": {"kind": "ftrl", "regularizer": "ball"},
            "environments": [{"kind": "random-quadratic", "curvature": 2.0, "center": [0.1, 0.4], "spread": 0.3},
                             {"kind": "random-bounded", "dim": 2, "lo": -1.0, "hi": 1.0}],
            "horizons": [100, 700], "seed": 99}"#,
    );
    for o in ["a", "b"] {
        let out = altreg(&["run", "--config", &cfg, "--out", o], dir.path());
        assert!(out.status.success(), "{}", stderr(&out));
    }
    for name in ["trace-0.csv", "trace-1.csv"] {
        let a = fs::read(dir.path().join("a").join(name)).unwrap();
        let b = fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
        assert_eq!(String::from_utf8(a).unwrap().lines().count(), 701);
    }
    // a different seed changes the losses
    let out = altreg(&["run", "--config", &cfg, "--out", "c", "--seed", "100"], dir.path());
    assert!(out.status.success());
    assert_ne!(
        fs::read(dir.path().join("a/trace-0.csv")).unwrap(),
        fs::read(dir.path().join("c/trace-0.csv")).unwrap()
    );
}

#[test]
fn environment_variable_overrides_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_altreg"))
        .args(["run", "--learner", "prm-plus", "--env", "pm-alternating", "--horizons", "40", "--out", "flag"])
        .current_dir(dir.path())
        .env("ALTREG_OUT", dir.path().join("env"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(dir.path().join("env/trace.csv").is_file());
    assert!(!dir.path().join("flag").exists());
}

#[test]
fn validation_errors_exit_with_2_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"learner": {"kind": "hedge", "rate": 1}, "environment": {"kind": "hedge-cycle"}, "horizons": [3]}"#, "learner"),
        (r#"{"learner": {"kind": "hedge"}, "environment": {"kind": "hedge-cycle"}, "horizons": [3, 2]}"#, "horizons[1]"),
        (
            r#"{"learner": {"kind": "hedge"}, "environment": {"kind": "file", "path": "missing.json"}, "horizons": [3]}"#,
            "environment.path",
        ),
        (r#"{"learner": {"kind": "hedge"}, "environment": {"kind": "hedge-cycle"}, "horizons": [3], "sed": 1}"#, "sed"),
        (r#"{"learner": {"kind": "oogd", "eta": -1}, "environment": {"kind": "pm-alternating"}, "horizons": [3]}"#, "learner.eta"),
    ];
    for (i, (text, field)) in cases.iter().enumerate() {
        let cfg = write(dir.path(), &format!("bad{i}.json"), text);
        let out = altreg(&["run", "--config", &cfg], dir.path());
        assert_eq!(out.status.code(), Some(2), "case {i}: {}", stderr(&out));
        assert!(stderr(&out).contains(field), "case {i}: {}", stderr(&out));
    }
    let out = altreg(&["run", "--learner", "hedge", "--env", "hedge-cycle", "--horizons", "5,5"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = altreg(&["run", "--learner", "nope"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = altreg(&["run", "--config", "does-not-exist.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = altreg(&["verify", "--out", "v"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.lines().count() >= 15);
    assert!(table.lines().all(|l| l.starts_with("PASS")), "{table}");
    assert!(dir.path().join("v/verify.json").is_file());
}

#[test]
fn sweep_is_identical_in_parallel_and_serial() {
    let dir = tempfile::tempdir().unwrap();
    let args = |jobs: &'static str, o: &'static str| {
        vec![
            "sweep", "--learner", "hedge", "--env", "hedge-cycle", "--horizons", "96,192,384,768,1536", "--jobs", jobs,
            "--out", o,
        ]
    };
    for (jobs, o) in [("1", "serial"), ("4", "parallel")] {
        let out = altreg(&args(jobs, o), dir.path());
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let a = fs::read_to_string(dir.path().join("serial/rates.csv")).unwrap();
    let b = fs::read_to_string(dir.path().join("parallel/rates.csv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 6);
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("serial/sweep.json")).unwrap()).unwrap();
    let slope = report["fit"]["slope"].as_f64().unwrap();
    assert!((0.25..0.41).contains(&slope), "{slope}");

    // offline fit of the written table
    let out = altreg(&["fit", "serial/rates.csv"], dir.path());
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains(&format!("slope {slope:.4}")));
}

#[test]
fn failed_sweep_keeps_partial_results() {
    let dir = tempfile::tempdir().unwrap();
    let losses: Vec<String> = (0..100)
        .map(|t| format!(r#"{{"kind": "linear", "params": {{"ell": [{}, 0.5]}}}}"#, t % 2))
        .collect();
    write(dir.path(), "losses.json", &format!("[{}]", losses.join(",")));
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"learner": {"kind": "hedge"}, "environment": {"kind": "file", "path": "losses.json"},
            "horizons": [10, 20, 40, 80, 160]}"#,
    );
    let out = altreg(&["sweep", "--config", &cfg, "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    let rates = fs::read_to_string(dir.path().join("o/rates.csv")).unwrap();
    assert_eq!(rates.lines().count(), 5);
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("o/sweep.json")).unwrap()).unwrap();
    assert_eq!(report["failures"][0]["T"], 160);
    assert!(report.get("fit").is_none());
}

#[test]
fn fit_needs_four_points() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "r.csv", "T,value\n10,1.0\n20,2.0\n40,0.0\n80,4.0\n");
    let out = altreg(&["fit", &path], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("at least 4"));
}

#[test]
fn dynamics_on_matching_pennies() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "g.json",
        r#"{"learner": {"kind": "hedge"}, "game": {"kind": "matrix", "a": [[1, -1], [-1, 1]]}, "horizons": [1024]}"#,
    );
    let out = altreg(&["dynamics", "--config", &cfg, "--out", "o"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let s = summary(&dir.path().join("o"));
    let gap = s["gaps"]["ne_gap"].as_f64().unwrap();
    assert!(gap <= s["gaps"]["ne_bound"].as_f64().unwrap() + 1e-9);
    assert!(s["zero_sum"].as_bool().unwrap());
    for name in ["trace_x.csv", "trace_y.csv"] {
        let text = fs::read_to_string(dir.path().join("o").join(name)).unwrap();
        assert_eq!(text.lines().count(), 1025);
    }
    // games go through `dynamics`, not `run`
    let out = altreg(&["run", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
