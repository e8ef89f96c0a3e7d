use std::fs;
use std::path::Path;
use std::process::Command;

use normgrad::bench::{
    cmd_ratefit, cmd_run, fit_rate, read_summaries, run_sweep, write_sweep_csv, ExitStatus, ExperimentConfig,
    SweepGrid,
};
use normgrad::learners::LearnerKind;

const BIN: &str = env!("CARGO_BIN_EXE_normgrad");

fn config(problem: &str, learner: &str, horizons: &str) -> String {
    format!(r#"{{"problem": {problem}, "learner": {learner}, "horizons": {horizons}}}"#)
}

const QUADRATIC_1D: &str = r#"{"family": "quadratic", "dimension": 1, "minimizer": [0.0]}"#;

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn ogd_on_quadratic_stops_after_two_steps() {
    let dir = tempfile::tempdir().unwrap();
    let text = config(QUADRATIC_1D, r#"{"kind": "ogd_const", "step_scale": 1.0, "start": [1.0]}"#, "[4]");
    let cfg = ExperimentConfig::from_json(&text).unwrap();
    let out = cmd_run(&cfg, dir.path()).unwrap();
    assert_eq!(out.status(), ExitStatus::Pass);
    let csv = fs::read_to_string(dir.path().join("trajectory_T4.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,f_gap,grad_norm,weight,local_L");
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1], "1,0.5,1.0,1.0,1.0");
    assert_eq!(lines[2], "2,0.125,0.5,2.0,1.0");
    let s: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary_T4.json")).unwrap()).unwrap();
    assert_eq!(s["terminated_early"], true);
    assert_eq!(s["steps_taken"], 2);
    assert_eq!(s["f_gap_avg"], 0.0);
    for key in ["config", "psi_at_xstar", "bound_gm", "bound_am", "bound_closed_form"] {
        assert!(s.get(key).is_some(), "{key}");
    }
}

#[test]
fn kt_on_quadratic_stays_below_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let problem = r#"{"family": "quadratic", "dimension": 3, "seed": 2}"#;
    let text = config(problem, r#"{"kind": "kt", "wealth_init": 1.0, "start": [4.0, -2.0, 1.0]}"#, "[16, 256]");
    let out = cmd_run(&ExperimentConfig::from_json(&text).unwrap(), dir.path()).unwrap();
    assert_eq!(out.summaries.len(), 2);
    for s in &out.summaries {
        assert!(s.f_gap_avg <= s.bound_closed_form, "{s:?}");
    }
    assert!(out.violations.is_empty());
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let problem = r#"{"family": "power_norm", "parameters": {"nu": 0.5}, "dimension": 4, "seed": 1}"#;
    let text = config(problem, r#"{"kind": "da_sqrt", "step_scale": 0.7, "start": [1.0, 2.0, 0.0, -1.0]}"#, "[8, 64, 512]");
    let cfg = ExperimentConfig::from_json(&text).unwrap();
    let wa = cmd_run(&cfg, a.path()).unwrap().written;
    cmd_run(&cfg, b.path()).unwrap();
    assert_eq!(wa.len(), 6);
    for path in wa {
        let name = path.file_name().unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name:?}");
    }

    let grid = SweepGrid {
        horizons: vec![16, 64],
        seeds: vec![0, 1],
        dimension: 3,
        ..SweepGrid::default()
    };
    let mut x = Vec::new();
    let mut y = Vec::new();
    write_sweep_csv(&run_sweep(&grid).unwrap(), &mut x).unwrap();
    write_sweep_csv(&run_sweep(&grid).unwrap(), &mut y).unwrap();
    assert_eq!(x, y);
}

#[test]
fn ratefit_recovers_exact_power_laws() {
    for (slope, scale) in [(-1.0, 1.0), (-0.5, 3.0), (-0.75, 0.02), (-1.37, 11.0)] {
        let points: Vec<(usize, f64)> = (2..9).map(|k| {
            let t = 1usize << k;
            (t, scale * (t as f64).powf(slope))
        }).collect();
        let fit = fit_rate(&points, 0.5).unwrap();
        assert!((fit.slope - slope).abs() < 1e-12, "{}", fit.slope);
        assert!((fit.intercept - scale.ln()).abs() < 1e-11);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }
}

#[test]
fn ratefit_reads_run_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let problem = r#"{"family": "l2_norm", "parameters": {"scale": 1.0}, "dimension": 2, "minimizer": [0.0, 0.0]}"#;
    let text = config(problem, r#"{"kind": "ogd_const", "step_scale": 1.0, "start": [3.0, 2.0]}"#, "[64, 256, 1024, 4096]");
    let out = cmd_run(&ExperimentConfig::from_json(&text).unwrap(), dir.path()).unwrap();
    let paths: Vec<_> = out.written.into_iter().filter(|p| p.extension().unwrap() == "json").collect();
    let fit = cmd_ratefit(&read_summaries(&paths).unwrap()).unwrap();
    assert_eq!(fit.predicted_slope, -0.5);
    assert_eq!(fit.points_used, 4);
    assert_eq!(out.summaries.last().unwrap().rate_fit.as_ref(), Some(&fit));
}

#[test]
fn default_grid_cardinality_and_bounds() {
    let grid = SweepGrid {
        learners: vec![LearnerKind::OgdConst, LearnerKind::DaSqrt, LearnerKind::Kt],
        seeds: vec![4],
        ..SweepGrid::default()
    };
    let rows = run_sweep(&grid).unwrap();
    assert_eq!(rows.len(), 3 * 3 * 7);
    for r in &rows {
        assert!(r.f_gap_avg <= r.bound_closed_form * (1.0 + 1e-9) + 1e-9, "{r:?}");
        if let (Some(gm), Some(am)) = (r.bound_gm, r.bound_am) {
            assert!(gm <= am * (1.0 + 1e-9) + 1e-9);
        }
    }
}

/// KT's closed form is `c·(ψ/T)^{1+ν}`, so moving the start from distance 1 to
/// 10 scales it by `(ψ(10)/ψ(1))^{1+ν}` with `ψ(D) = D√(T ln(24T²D²+1)) + 1`.
#[test]
fn kt_bound_ratio_follows_the_distance() {
    let psi = |d: f64, t: f64| d * (t * (24.0 * t * t * d * d + 1.0).ln()).sqrt() + 1.0;
    for nu in [0.0, 0.5, 1.0] {
        let rows = |distance: f64| {
            run_sweep(&SweepGrid {
                nus: vec![nu],
                learners: vec![LearnerKind::Kt],
                seeds: vec![0],
                horizons: vec![256, 4096],
                distance,
                ..SweepGrid::default()
            })
            .unwrap()
        };
        for (near, far) in rows(1.0).iter().zip(rows(10.0).iter()) {
            let t = near.horizon as f64;
            let want = (psi(10.0, t) / psi(1.0, t)).powf(1.0 + nu);
            let got = far.bound_closed_form / near.bound_closed_form;
            assert!((got / want - 1.0).abs() < 1e-9, "nu={nu} T={t}: {got} vs {want}");
        }
    }
}

fn normgrad(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let learner = r#"{"kind": "ogd_const", "step_scale": 1.0, "start": [1.0]}"#;
    let good = write_config(dir.path(), "good.json", &config(QUADRATIC_1D, learner, "[4]"));
    let empty = write_config(dir.path(), "empty.json", &config(QUADRATIC_1D, learner, "[]"));
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    assert_eq!(normgrad(&["run", "--config", good.to_str().unwrap(), "--out", out]).0, 0);
    let (code, _, err) = normgrad(&["run", "--config", empty.to_str().unwrap(), "--out", out]);
    assert_eq!(code, 2);
    assert!(err.contains("horizon"), "{err}");
    assert_eq!(normgrad(&["run", "--config", "/nonexistent.json", "--out", out]).0, 2);
    assert_eq!(normgrad(&["frobnicate"]).0, 2);
    assert_eq!(normgrad(&["check", "--suite", "nope"]).0, 2);

    let summary = format!("{out}/summary_T4.json");
    let (code, _, err) = normgrad(&["ratefit", "--in", &summary]);
    assert_eq!(code, 1);
    assert!(err.contains("insufficient data"), "{err}");

    let (code, stdout, _) = normgrad(&["check", "--suite", "means", "--samples", "500"]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["suites"][0]["samples"], 500);

    let (code, _, err) = normgrad(&["check", "--suite", "descent", "--samples", "300", "--scale-l-nu", "0.5"]);
    assert_eq!(code, 1);
    assert!(err.contains("descent"), "{err}");

    let (code, stdout, _) = normgrad(&[
        "sweep", "--nu", "0.5", "--learner", "kt", "--horizons", "16,32", "--seeds", "0", "--dim", "2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().count(), 3);
    assert!(stdout.starts_with("nu,learner,T,seed,"));
}
