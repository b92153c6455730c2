//! Steady states of the driven-dissipative lattice over a grid of drive
//! detunings, one curve per Kδt.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use num_complex::Complex64 as C64;
use photonsim_core::lattice::LatticeModel;
use photonsim_core::spectral::{sector_spectrum, GroundSpace};
use photonsim_core::FockBasis;
use photonsim_dynamics::steady::{driven_steady_state, FixedPointMethod, SteadyStateReport};
use photonsim_dynamics::DriveDissParams;
use serde_json::json;

use super::build_model;
use crate::config::{ExperimentConfig, SolverKind};
use crate::output::{RunOutput, Table};
use crate::{Result, RunError};

/// Scalar observables of one scan point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub k_dt: f64,
    pub omega: f64,
    pub n_photon: f64,
    pub n_squared: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub ratio: Option<f64>,
    pub overlap: Option<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

impl ScanPoint {
    fn new(k_dt: f64, omega: f64, r: &SteadyStateReport) -> Self {
        Self {
            k_dt,
            omega,
            n_photon: r.n_photon,
            n_squared: r.n_squared,
            p1: r.p1,
            p2: r.p2,
            p3: r.p3,
            ratio: r.ratio,
            overlap: r.postselected_overlap,
            iterations: r.iterations,
            residual: r.residual,
            converged: r.converged,
        }
    }
}

/// Inputs shared by every point of a scan.
pub struct ScanSetup {
    pub model: LatticeModel,
    pub basis: Arc<FockBasis>,
    pub ground: GroundSpace,
    pub alpha_ratio: f64,
    pub delta_t: f64,
    pub ancilla_cut: usize,
    pub method: FixedPointMethod,
    pub tol: f64,
    pub max_iter: usize,
}

impl ScanSetup {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        let model = build_model(cfg)?;
        if cfg.n_max < 2 {
            return Err(RunError::Config("steady_state needs n_max >= 2".into()));
        }
        let basis = Arc::new(FockBasis::up_to(model.n_sites, cfg.n_max)?);
        let (b2, spec) = sector_spectrum(&model, cfg.delta_t, 2)?;
        let ground = GroundSpace::from_spectrum(b2, &spec)?;
        let method = match cfg.solver {
            SolverKind::Power => FixedPointMethod::Power,
            SolverKind::Krylov => FixedPointMethod::Krylov,
        };
        Ok(Self {
            model,
            basis,
            ground,
            alpha_ratio: cfg.alpha_ratio,
            delta_t: cfg.delta_t,
            ancilla_cut: cfg.ancilla_cut,
            method,
            tol: cfg.tol,
            max_iter: cfg.max_iter,
        })
    }

    pub fn point(&self, k_dt: f64, omega: f64) -> Result<ScanPoint> {
        let params = DriveDissParams::from_ratio(k_dt, C64::new(self.alpha_ratio, 0.0), omega, self.delta_t)?;
        let r = driven_steady_state(
            &self.model,
            &self.basis,
            params,
            self.ancilla_cut,
            Some(&self.ground),
            self.method,
            self.tol,
            self.max_iter,
        )?;
        Ok(ScanPoint::new(k_dt, omega, &r))
    }

    /// All points of the product grid, in grid order, spread over `threads`
    /// workers.
    pub fn scan(&self, k_dts: &[f64], omegas: &[f64], threads: usize) -> Result<Vec<ScanPoint>> {
        let jobs: Vec<(f64, f64)> = k_dts.iter().flat_map(|&k| omegas.iter().map(move |&w| (k, w))).collect();
        let results: Mutex<Vec<Option<Result<ScanPoint>>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
        let next = AtomicUsize::new(0);
        std::thread::scope(|s| {
            for _ in 0..threads.min(jobs.len()).max(1) {
                s.spawn(|| loop {
                    let k = next.fetch_add(1, Ordering::Relaxed);
                    let Some(&(kdt, w)) = jobs.get(k) else { break };
                    let r = self.point(kdt, w);
                    results.lock().expect("no worker panicked")[k] = Some(r);
                });
            }
        });
        results.into_inner().expect("no worker panicked").into_iter().map(|r| r.expect("every job ran")).collect()
    }
}

/// Vertex of the parabola through three equally spaced samples around
/// index `i`; falls back to the sample itself at the grid ends.
pub fn refine_peak(x: &[f64], y: &[f64], i: usize) -> (f64, f64) {
    if i == 0 || i + 1 >= x.len() {
        return (x[i], y[i]);
    }
    let (a, b, c) = (y[i - 1], y[i], y[i + 1]);
    let curv = a - 2.0 * b + c;
    if curv >= 0.0 {
        return (x[i], y[i]);
    }
    let h = 0.5 * (x[i + 1] - x[i - 1]);
    (x[i] + h * (a - c) / (2.0 * curv), b - (a - c) * (a - c) / (8.0 * curv))
}

/// Global maximum, refined.
pub fn global_peak(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let i = (0..y.len()).filter(|&i| y[i].is_finite()).max_by(|&a, &b| y[a].total_cmp(&y[b]))?;
    Some(refine_peak(x, y, i))
}

/// Strict interior local maxima, refined, in grid order.
pub fn local_maxima(x: &[f64], y: &[f64]) -> Vec<(f64, f64)> {
    (1..y.len().saturating_sub(1))
        .filter(|&i| y[i] > y[i - 1] && y[i] > y[i + 1])
        .map(|i| refine_peak(x, y, i))
        .collect()
}

/// Peak analysis of one Kδt curve.
pub fn curve_summary(points: &[ScanPoint]) -> serde_json::Value {
    let w: Vec<f64> = points.iter().map(|p| p.omega).collect();
    let n: Vec<f64> = points.iter().map(|p| p.n_photon).collect();
    let ratio: Vec<f64> = points.iter().map(|p| p.ratio.unwrap_or(f64::NAN)).collect();
    let ov: Vec<f64> = points.iter().map(|p| p.overlap.unwrap_or(f64::NAN)).collect();
    let pair = |p: Option<(f64, f64)>| p.map(|(x, y)| json!({"omega": x, "value": y}));
    let maxima: Vec<_> = local_maxima(&w, &ratio).into_iter().map(|(x, y)| json!({"omega": x, "value": y})).collect();
    json!({
        "k_dt": points.first().map(|p| p.k_dt),
        "overlap_peak": pair(global_peak(&w, &ov)),
        "n_photon_peak": pair(global_peak(&w, &n)),
        "ratio_local_maxima": maxima,
        "all_converged": points.iter().all(|p| p.converged),
    })
}

pub fn run(cfg: &ExperimentConfig, threads: usize) -> Result<RunOutput> {
    let setup = ScanSetup::from_config(cfg)?;
    let points = setup.scan(&cfg.k_dt, &cfg.omega_grid, threads)?;
    let mut table = Table::new(
        "steady_state",
        &["k_dt", "omega", "n_photon", "n_squared", "p1", "p2", "p3", "p2_over_p1", "overlap", "iterations", "residual", "converged"],
    );
    for p in &points {
        table.push(vec![
            p.k_dt.into(),
            p.omega.into(),
            p.n_photon.into(),
            p.n_squared.into(),
            p.p1.into(),
            p.p2.into(),
            p.p3.into(),
            p.ratio.into(),
            p.overlap.into(),
            p.iterations.into(),
            p.residual.into(),
            (p.converged as usize).into(),
        ]);
    }
    let mut out = RunOutput { tables: vec![table], ..Default::default() };
    out.set("gap", setup.ground.gap);
    out.set("ground_mean_energy", setup.ground.mean_energy());
    let curves: Vec<_> = points.chunks(cfg.omega_grid.len()).map(curve_summary).collect();
    out.set("curves", curves);
    let bad = points.iter().filter(|p| !p.converged).count();
    if bad > 0 {
        out.failure = Some(format!("{bad} of {} steady states did not converge", points.len()));
    }
    Ok(out)
}
