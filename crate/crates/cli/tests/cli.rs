use std::path::{Path, PathBuf};
use std::process::Command;

use photonsim_cli::config::linspace;
use photonsim_cli::experiments::quench::{free_boson_correlator, quench_series, side_masses};
use photonsim_cli::output::fmt_f64;
use photonsim_cli::{run, Experiment, ExperimentConfig, RunError};
use photonsim_core::lattice::{build_bose_hubbard, Boundary};
use proptest::prelude::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_photonsim"))
}

fn scratch(name: &str) -> PathBuf {
    let d = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn cfg(e: Experiment, overrides: &[&str]) -> Result<ExperimentConfig, RunError> {
    let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    ExperimentConfig::resolve(e, None, &o)
}

#[test]
fn defaults_validate_for_every_experiment() {
    for e in Experiment::ALL {
        let c = cfg(e, &[]).unwrap();
        assert_eq!(c.experiment, e);
        assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
    }
}

#[test]
fn quench_defaults_span_four_over_j() {
    let c = cfg(Experiment::Quench, &[]).unwrap();
    assert_eq!((c.nx, c.n_steps), (8, 20));
    assert!((c.delta_t - 0.2).abs() < 1e-15);
    let c = cfg(Experiment::Quench, &["delta_t=0.1"]).unwrap();
    assert_eq!(c.n_steps, 40);
    let c = cfg(Experiment::Quench, &["delta_t=0.1", "n_steps=3"]).unwrap();
    assert_eq!(c.n_steps, 3);
}

#[test]
fn file_then_overrides() {
    let text = "u = 3.5\nomega_grid = [-2.8, -2.7]\nsolver = \"power\"\n";
    let c = ExperimentConfig::resolve(Experiment::SteadyState, Some(text), &["u=4".into()]).unwrap();
    assert_eq!(c.u, 4.0);
    assert_eq!(c.omega_grid, vec![-2.8, -2.7]);
    let c = ExperimentConfig::resolve(Experiment::Subtraction, None, &["pulse=[\"bump\"]".into()]).unwrap();
    assert_eq!(c.pulse, vec!["bump".to_string()]);
    let c = ExperimentConfig::resolve(Experiment::Compile, None, &["variant=general".into()]).unwrap();
    assert_eq!(c.variant, photonsim_cli::config::VariantKind::General);
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(matches!(cfg(Experiment::SteadyState, &["omega_grid=[]"]), Err(RunError::Config(_))));
    assert!(matches!(cfg(Experiment::Quench, &["no_such_key=1"]), Err(RunError::Config(_))));
    assert!(matches!(cfg(Experiment::Quench, &["u=nan"]), Err(RunError::Config(_))));
    assert!(matches!(cfg(Experiment::Quench, &["u=inf"]), Err(RunError::Config(_))));
    assert!(matches!(cfg(Experiment::Quench, &["delta_t=0"]), Err(RunError::Config(_))));
    assert!(matches!(cfg(Experiment::Subtraction, &["k_list=[0]"]), Err(RunError::Config(_))));
    assert!(matches!(cfg(Experiment::Subtraction, &["pulse=[\"gauss\"]"]), Err(RunError::Config(_))));
    assert!(matches!(cfg(Experiment::Quench, &["lattice=hexagonal"]), Err(RunError::Config(_))));
    let wrong = ExperimentConfig::resolve(Experiment::Quench, Some("experiment = \"spectrum\""), &[]);
    assert!(matches!(wrong, Err(RunError::Config(_))));
    assert!(matches!("bogus".parse::<Experiment>(), Err(RunError::Usage(_))));
}

#[test]
fn linspace_endpoints() {
    let g = linspace(-2.85, -2.5, 30);
    assert_eq!(g.len(), 30);
    assert_eq!(g[0], -2.85);
    assert!((g[29] + 2.5).abs() < 1e-15);
    assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
}

#[test]
fn quench_correlator_sum_rule_and_symmetry() {
    let m = build_bose_hubbard(8, 1.0, 10.0, Boundary::Periodic).unwrap();
    for c in quench_series(&m, 0.2, 20).unwrap() {
        assert!((c.sum() - 2.0).abs() < 1e-12);
        for i in 0..8 {
            for j in 0..8 {
                assert!((c[(i, j)] - c[(j, i)]).abs() < 1e-12);
                assert!(c[(i, j)] >= -1e-15);
            }
        }
    }
}

#[test]
fn free_boson_oracle_matches_every_step() {
    for (n, b) in [(8, Boundary::Periodic), (6, Boundary::Open), (10, Boundary::Periodic)] {
        let m = build_bose_hubbard(n, 1.0, 0.0, b).unwrap();
        let series = quench_series(&m, 0.2, 20).unwrap();
        for (s, c) in series.iter().enumerate() {
            let fb = free_boson_correlator(&m, 0.2, s);
            let dev = (c - &fb).iter().map(|d| d.abs()).fold(0.0, f64::max);
            assert!(dev < 1e-8, "n={n} step {s}: {dev}");
        }
    }
}

#[test]
fn quench_starts_on_opposite_halves() {
    let m = build_bose_hubbard(8, 1.0, 0.0, Boundary::Periodic).unwrap();
    let c0 = &quench_series(&m, 0.2, 0).unwrap()[0];
    let (same, opp) = side_masses(c0);
    assert!(same.abs() < 1e-15 && (opp - 2.0).abs() < 1e-15);
}

#[test]
fn fermionization_on_a_long_ring() {
    // the pair has not yet wrapped around a 16-site ring at T = 4/J
    for (u, bunched) in [(0.0, true), (10.0, false)] {
        let m = build_bose_hubbard(16, 1.0, u, Boundary::Periodic).unwrap();
        let (same, opp) = side_masses(quench_series(&m, 0.2, 20).unwrap().last().unwrap());
        assert_eq!(same > opp, bunched, "U={u}: same {same} opposite {opp}");
    }
}

#[test]
fn spectrum_summary() {
    let out = run(&cfg(Experiment::Spectrum, &[]).unwrap(), 1).unwrap();
    let gap = out.summary["gap"].as_f64().unwrap();
    assert!((gap - 0.2753).abs() < 1e-3);
    assert!(out.summary["overlap"].as_f64().unwrap() > 0.94);
    let t = out.table("spectrum").unwrap();
    assert_eq!(t.rows.len(), 16 + 136);
    let free = run(&cfg(Experiment::Spectrum, &["u=0"]).unwrap(), 1).unwrap();
    assert_eq!(free.summary["sector2_distinct"].as_u64(), Some(5));
}

#[test]
fn subtraction_reference_rows() {
    let c = cfg(Experiment::Subtraction, &["gamma_grid=[4000.0]", "pulse=[\"square\"]"]).unwrap();
    let out = run(&c, 1).unwrap();
    let t = out.table("subtraction").unwrap();
    let inf = t.reals("inf_single");
    let closed = t.reals("inf_single_closed_form");
    assert!((inf[0] - 2.5e-4).abs() / 2.5e-4 < 0.02);
    assert!((inf[1] - 5.0e-4).abs() / 5.0e-4 < 0.02);
    for k in 0..2 {
        assert!((inf[k] - closed[k]).abs() / closed[k] < 1e-6);
    }
    assert!(t.reals("p_fail")[2].is_nan(), "no p_fail for k = 3");
}

#[test]
fn compile_certifies_default_chain_and_square() {
    let out = run(&cfg(Experiment::Compile, &[]).unwrap(), 1).unwrap();
    assert!(out.failure.is_none());
    assert_eq!(out.summary["certified"], true);
    let sq = cfg(Experiment::Compile, &["lattice=square", "nx=4", "ny=4", "u=10", "delta_t=0.25", "l_y=3"]).unwrap();
    assert!(run(&sq, 1).unwrap().failure.is_none());
}

#[test]
fn incoherent_runs_small_and_rejects_large() {
    let small = cfg(Experiment::Incoherent, &["lattice=chain", "nx=2", "ny=1", "n_steps=20", "record_every=5"]).unwrap();
    let out = run(&small, 1).unwrap();
    let t = out.table("incoherent").unwrap();
    assert_eq!(t.rows.len(), 2 * 5);
    for p in t.reals("p0").iter().zip(t.reals("p2")) {
        assert!(p.0.is_finite() && p.1.is_finite());
    }
    assert!(matches!(run(&cfg(Experiment::Incoherent, &[]).unwrap(), 1), Err(RunError::Core(_))));
}

#[test]
fn steady_state_small_scan() {
    let c = cfg(
        Experiment::SteadyState,
        &["lattice=chain", "nx=4", "ny=1", "u=5", "k_dt=[0.1]", "omega_grid=[-1.5, -1.0, -0.5]"],
    )
    .unwrap();
    let serial = run(&c, 1).unwrap();
    let parallel = run(&c, 3).unwrap();
    let t = serial.table("steady_state").unwrap();
    assert_eq!(t.rows.len(), 3);
    assert_eq!(t, parallel.table("steady_state").unwrap());
    assert!(t.reals("converged").iter().all(|&v| v == 1.0));
}

#[test]
fn binary_exit_codes() {
    assert_eq!(bin().arg("bogus").status().unwrap().code(), Some(1));
    let d = scratch("exit_empty_grid");
    let s = bin().args(["steady_state", "--set", "omega_grid=[]", "--out"]).arg(&d).status().unwrap();
    assert_eq!(s.code(), Some(1));
    let d = scratch("exit_nonconverged");
    let s = bin()
        .args(["steady_state", "--set", "lattice=chain", "--set", "nx=4", "--set", "ny=1", "--set", "k_dt=[0.1]"])
        .args(["--set", "omega_grid=[-1.0]", "--set", "solver=power", "--set", "max_iter=2", "--out"])
        .arg(&d)
        .status()
        .unwrap();
    assert_eq!(s.code(), Some(2));
    assert!(d.join("summary.json").exists(), "partial results are still written");
}

#[test]
fn config_file_and_manifest() {
    let d = scratch("config_file");
    std::fs::create_dir_all(&d).unwrap();
    let path = d.join("run.toml");
    std::fs::write(&path, "experiment = \"quench\"\nu = 0.0\nformat = \"json\"\n").unwrap();
    let out = d.join("out");
    let s = bin().args(["quench", "--config"]).arg(&path).arg("--out").arg(&out).status().unwrap();
    assert_eq!(s.code(), Some(0));
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["u"], 0.0);
    assert_eq!(manifest["experiment"], "quench");
    assert!(manifest["versions"]["photonsim-core"].is_string());
    let rows: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("correlator.json")).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 21 * 64);
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert!(summary["free_boson_max_deviation"].as_f64().unwrap() < 1e-8);
}

#[test]
fn identical_configs_give_identical_files() {
    for args in [&["quench"][..], &["compile"], &["subtraction", "--set", "gamma_grid=[10.0, 4000.0]"]] {
        let (a, b) = (scratch(&format!("det_a_{}", args[0])), scratch(&format!("det_b_{}", args[0])));
        for d in [&a, &b] {
            assert_eq!(bin().args(args).arg("--out").arg(d).status().unwrap().code(), Some(0));
        }
        let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        assert!(names.len() >= 3);
        for n in names {
            assert_eq!(std::fs::read(a.join(&n)).unwrap(), std::fs::read(b.join(&n)).unwrap(), "{n:?}");
        }
    }
}

#[test]
fn csv_layout() {
    let out = run(&cfg(Experiment::Quench, &["n_steps=1"]).unwrap(), 1).unwrap();
    let csv = out.table("correlator").unwrap().to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("step,time,i,j,c"));
    assert_eq!(csv.lines().count(), 1 + 2 * 64);
    assert!(lines.all(|l| l.split(',').count() == 5));
}

proptest! {
    #[test]
    fn numbers_round_trip(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        let s = fmt_f64(v);
        let back: f64 = s.parse().unwrap();
        prop_assert_eq!(back, v + 0.0);
    }
}
