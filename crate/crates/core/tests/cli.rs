//! End-to-end runs of the command-line binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use cvlearn::numerics::Cn;
use cvlearn::states::{make_three_peak, PeakState};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvlearn")).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn state_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.json");
    run_ok(&["state", "save", "--three-peak", "nu=0.6", "eps0=0.2", "gamma=1+0.5i,-0.3i", "--out", s(&path)]);
    let loaded: PeakState = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let direct = make_three_peak(2, 0.6, 0.2, &Cn::from_parts(&[(1.0, 0.5), (0.0, -0.3)])).unwrap();
    let probe = Cn::from_parts(&[(0.4, -0.2), (1.1, 0.3)]);
    assert_eq!(loaded.char_fn(&probe), direct.char_fn(&probe));
    assert_eq!(loaded.wigner(&probe), direct.wigner(&probe));

    // Evaluations from the file and from the inline description are identical.
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    run_ok(&["state", "eval", "--state", s(&path), "--quantity", "wigner", "--grid", "9", "--out", s(&a)]);
    run_ok(&[
        "state", "eval", "--three-peak", "nu=0.6", "eps0=0.2", "gamma=1+0.5i,-0.3i", "--quantity", "wigner", "--grid", "9",
        "--out", s(&b),
    ]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn state_eval_writes_grid_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("chi.csv");
    run_ok(&["state", "eval", "--three-peak", "nu=0.6", "eps0=0.2", "gamma=1+0.5i", "--grid", "16", "--out", s(&csv_path)]);
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,re,im"));
    assert_eq!(lines.count(), 256);
    let summary = read_json(&dir.path().join("chi.csv.json"));
    assert_eq!(summary["command"], "state eval");
    assert!(summary["result"]["s_max"].as_f64().unwrap() > 0.0);
    assert!(summary["result"]["tail_bound_margin"].as_f64().unwrap() >= -1e-12);
    assert!(summary["constants_version"].is_string());
}

#[test]
fn classicality_matches_library() {
    let out = run_ok(&["state", "classicality", "--three-peak", "nu=0.8", "eps0=0.1", "gamma=2"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let lib = make_three_peak(1, 0.8, 0.1, &Cn::from_parts(&[(2.0, 0.0)])).unwrap().classicality().unwrap();
    assert_eq!(v["result"]["s_max"].as_f64().unwrap(), lib.s_max);
}

#[test]
fn estimate_reports_every_point() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("r.jsonl");
    let pts = dir.path().join("p.json");
    run_ok(&[
        "sample", "--three-peak", "nu=0.6", "eps0=0.2", "gamma=0.8-0.2i", "--scheme", "bell", "--count", "2000", "--seed",
        "4", "--out", s(&rec),
    ]);
    std::fs::write(&pts, r#"[["0.3+0.1i"], [[0.5, -0.2]], [{"re": 0.0, "im": 0.9}]]"#).unwrap();
    let out = run_ok(&["estimate", "--record", s(&rec), "--points", s(&pts), "--scheme", "bell-chi"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let reports = v["result"].as_array().unwrap();
    assert_eq!(reports.len(), 3);
    for r in reports {
        assert_eq!(r["scheme"], "bell-chi");
        assert_eq!(r["samples_used"], 2000);
    }
    // A heterodyne scheme on a Bell record is a validation error.
    let bad = run(&["estimate", "--record", s(&rec), "--points", s(&pts), "--scheme", "heterodyne"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn sampling_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for p in [&a, &b] {
        run_ok(&[
            "sample", "--thermal", "n=2", "nu=0.5", "--scheme", "heterodyne", "--count", "500", "--seed", "9", "--stream", "3",
            "--out", s(p),
        ]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn game_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("game.json");
    std::fs::write(
        &cfg,
        r#"{"family": "three_peak", "n": 1, "nu": 0.6, "eps0": 0.25, "kappa": 2.0, "copies": 40,
            "trials": 200, "strategy": "ef_heterodyne", "seed": 17, "tvd_draws": 50}"#,
    )
    .unwrap();
    let a = dir.path().join("a.json");
    let log = dir.path().join("log.jsonl");
    let args = ["game", "run", "--config", s(&cfg), "--out", s(&a), "--log", s(&log)];
    run_ok(&args);
    let (first, first_log) = (std::fs::read(&a).unwrap(), std::fs::read(&log).unwrap());
    assert_eq!(first_log.iter().filter(|&&c| c == b'\n').count(), 200);
    run_ok(&args);
    assert_eq!(std::fs::read(&a).unwrap(), first);
    assert_eq!(std::fs::read(&log).unwrap(), first_log);

    // Without the log the decisions are the same; only the recorded config differs.
    let c = dir.path().join("c.json");
    run_ok(&["game", "run", "--config", s(&cfg), "--out", s(&c)]);
    let (va, vc) = (read_json(&a), read_json(&c));
    assert_eq!(va["result"]["successes"], vc["result"]["successes"]);
    assert_eq!(va["result"]["empirical_tvd"], vc["result"]["empirical_tvd"]);
}

#[test]
fn bounds_curve_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig.csv");
    run_ok(&[
        "bounds", "curve", "--axis", "kappa", "--families", "lb_ef,ub_hd,ub_bm", "--n", "50", "--epsilon", "0.09", "--delta",
        "0.3333", "--points", "12", "--out", s(&out),
    ]);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,log10_lb_ef,log10_ub_hd,log10_ub_bm"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 12);
    // The Bell column is flat in κ while both heterodyne and lower-bound columns grow.
    assert!(rows.iter().all(|r| r[3] == rows[0][3]));
    assert!(rows.windows(2).all(|w| w[1][1] > w[0][1] && w[1][2] > w[0][2]));
    let meta = read_json(&dir.path().join("fig.csv.json"));
    assert_eq!(meta["base_inputs"]["n"], 50);
    assert!(meta["constants_version"].is_string());
}

#[test]
fn bounds_eval_names_violated_hypothesis() {
    let out = run_ok(&["bounds", "eval", "--families", "lb_ef", "--n", "4"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let msg = v["result"]["lb_ef"]["error"].as_str().unwrap();
    assert!(msg.contains("lb_ef") && msg.contains("n = 4"), "{msg}");
}

#[test]
fn channel_and_oracle_commands() {
    let out = run_ok(&["channel", "check", "--fock1", "--r", "0.3", "--seed", "1", "--sets", "50", "--spread", "1.5"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["validity"], "violated");

    let out = run_ok(&["oracle", "--three-peak", "nu=0.6", "eps0=0.2", "gamma=1", "--point", "0.7+0.3i"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let row = &v["result"]["points"][0]["char_fn"];
    let closed = row["closed_form"].as_array().unwrap();
    let oracle = row["oracle"].as_array().unwrap();
    for k in 0..2 {
        assert!((closed[k].as_f64().unwrap() - oracle[k].as_f64().unwrap()).abs() < 1e-6);
    }
}

#[test]
fn exit_codes() {
    // Usage error.
    assert_eq!(run(&["bounds", "curve"]).status.code(), Some(2));
    // Validation error: ε₀ above the positivity limit.
    assert_eq!(run(&["state", "save", "--three-peak", "nu=0.6", "eps0=0.3", "gamma=1", "--out", "/dev/null"]).status.code(), Some(2));
    // Numeric failure: a Fock cutoff far too small for the thermal tail.
    let out = run(&["oracle", "--thermal", "n=1", "nu=0.9", "--cutoff", "3", "--point", "0+0i"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cutoff"));
}
