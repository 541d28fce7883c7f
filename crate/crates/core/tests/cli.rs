//! End-to-end runs of the `consensus-lab` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use consensus_lab::output::{trace_header, RUN_FILES};

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_consensus-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_every_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let sec5 = example("sec5.json");
    let out = cli(&[
        "run",
        "--scenario",
        path(&sec5),
        "--out",
        path(dir.path()),
        "--duration",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    for f in RUN_FILES {
        assert!(dir.path().join(f).is_file(), "missing {f}");
    }
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next().unwrap(), trace_header(5, 2).join(","));
    assert_eq!(lines.count(), 51);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["agents"].as_array().unwrap().len(), 5);
    assert!(summary["aborted"].is_null());
}

#[test]
fn zero_duration_gives_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let sec5 = example("sec5.json");
    let out = cli(&[
        "run",
        "--scenario",
        path(&sec5),
        "--out",
        path(dir.path()),
        "--duration",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 2);
}

#[test]
fn identical_runs_write_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let s = example("obstacle.json");
    for d in [&a, &b] {
        let out = cli(&[
            "run",
            "--scenario",
            path(&s),
            "--out",
            path(d.path()),
            "--duration",
            "1",
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    for f in RUN_FILES {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
}

#[test]
fn malformed_json_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"schema\": 1,\n  \"order\": ,\n}\n").unwrap();
    let out = cli(&["run", "--scenario", path(&bad), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        text(&out.stderr).contains("line 3"),
        "{}",
        text(&out.stderr)
    );
}

#[test]
fn validation_errors_name_the_json_path() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(example("sec5.json")).unwrap()).unwrap();
    doc["gains"]["chi"] = serde_json::json!(-1.0);
    let f = dir.path().join("s.json");
    std::fs::write(&f, doc.to_string()).unwrap();
    let out = cli(&["check", "--scenario", path(&f)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("gains"), "{}", text(&out.stderr));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cli(&["run"]).status.code(), Some(1));
    assert_eq!(cli(&["frobnicate"]).status.code(), Some(1));
}

fn modified(name: &str, edit: impl FnOnce(&mut serde_json::Value)) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(example(name)).unwrap()).unwrap();
    edit(&mut doc);
    let f = dir.path().join(name);
    std::fs::write(&f, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    (dir, f)
}

#[test]
fn check_passes_on_bundled_example() {
    let out = cli(&["check", "--scenario", path(&example("sec5.json"))]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    for name in [
        "leader spanning tree",
        "pinned Laplacian",
        "graph Lyapunov",
        "Hurwitz",
        "P1 residual",
    ] {
        assert!(stdout.contains(&format!("{name}: pass")), "{stdout}");
    }
}

#[test]
fn check_names_missing_spanning_tree() {
    let (_d, f) = modified("sec5.json", |doc| {
        doc["topology"]["leader_weights"] = serde_json::json!([0, 0, 0, 0, 0]);
    });
    let out = cli(&["check", "--scenario", path(&f)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        text(&out.stderr).contains("fail: leader spanning tree"),
        "{}",
        text(&out.stderr)
    );
}

#[test]
fn check_names_non_hurwitz_coefficients() {
    let (_d, f) = modified("sec5.json", |doc| {
        let gains = doc["gains"].as_object_mut().unwrap();
        gains.remove("lambda_roots");
        gains.insert("lambda".into(), serde_json::json!([-1.0]));
    });
    let out = cli(&["check", "--scenario", path(&f)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        text(&out.stderr).contains("fail: Hurwitz"),
        "{}",
        text(&out.stderr)
    );
}

#[test]
fn diagnose_passes_with_dominant_bounds() {
    let out = cli(&[
        "diagnose",
        "--scenario",
        path(&example("obstacle.json")),
        "--bounds",
        path(&example("bounds_pass.json")),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    assert!(stdout.contains("B_d"), "{stdout}");
    assert!(stdout.contains("K positive definite: yes"), "{stdout}");
}

#[test]
fn diagnose_fails_on_fifth_minor() {
    let out = cli(&[
        "diagnose",
        "--scenario",
        path(&example("obstacle.json")),
        "--bounds",
        path(&example("bounds_fail.json")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        text(&out.stderr).contains("minor 5"),
        "{}",
        text(&out.stderr)
    );
}

#[test]
fn diagnose_zero_bounds_uses_lambda_only() {
    let dir = tempfile::tempdir().unwrap();
    let b = dir.path().join("zero.json");
    std::fs::write(&b, r#"{"beta": 2.0, "t_m": 0.5, "t_n": 0.5}"#).unwrap();
    let out = cli(&[
        "diagnose",
        "--scenario",
        path(&example("obstacle.json")),
        "--bounds",
        path(&b),
        "--json",
    ]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let omega: Vec<f64> = report["omega"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(&omega[..4], &[0.0; 4]);
    assert!(omega[4] > 0.0);
    assert_eq!(report["omega_l1"].as_f64().unwrap(), omega[4]);
    let b_d = report["b_d"].as_f64().unwrap();
    let sigma = report["sigma_min_k"].as_f64().unwrap();
    assert!((b_d - omega[4] / sigma).abs() <= 1e-12 * b_d.max(1.0));
}

fn sweep_rows(out_dir: &std::path::Path) -> Vec<Vec<String>> {
    let body = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    let mut lines = body.lines();
    assert_eq!(
        lines.next().unwrap(),
        "value,settling_time,ultimate_bound,min_pair_distance"
    );
    lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn sweep_writes_one_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&[
        "sweep",
        "--scenario",
        path(&example("avoidance_pair.json")),
        "--param",
        "kappa",
        "--values",
        "0.01,0.05,0.1",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let rows = sweep_rows(dir.path());
    assert_eq!(rows.len(), 3);
    let values: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(values, vec![0.01, 0.05, 0.1]);
}

#[test]
fn sweep_rejects_empty_and_unknown() {
    let dir = tempfile::tempdir().unwrap();
    let s = example("avoidance_pair.json");
    let empty = cli(&[
        "sweep",
        "--scenario",
        path(&s),
        "--param",
        "kappa",
        "--values",
        "",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(empty.status.code(), Some(1));
    let unknown = cli(&[
        "sweep",
        "--scenario",
        path(&s),
        "--param",
        "warp",
        "--values",
        "1",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(unknown.status.code(), Some(1));
}

#[test]
fn sweep_shows_avoidance_is_causal() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&[
        "sweep",
        "--scenario",
        path(&example("avoidance_pair.json")),
        "--param",
        "gamma1",
        "--values",
        "0,default",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let rows = sweep_rows(dir.path());
    let off: f64 = rows[0][3].parse().unwrap();
    let on: f64 = rows[1][3].parse().unwrap();
    assert!(off < on, "gamma1 = 0 gives {off}, default gives {on}");
}
