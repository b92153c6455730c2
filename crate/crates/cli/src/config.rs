//! Run configuration: per-experiment defaults, overlaid by a flat TOML file
//! and then by `key=value` overrides.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Quench,
    Spectrum,
    SteadyState,
    Incoherent,
    Subtraction,
    Compile,
}

impl Experiment {
    pub const ALL: [Experiment; 6] =
        [Self::Quench, Self::Spectrum, Self::SteadyState, Self::Incoherent, Self::Subtraction, Self::Compile];

    pub fn name(self) -> &'static str {
        match self {
            Self::Quench => "quench",
            Self::Spectrum => "spectrum",
            Self::SteadyState => "steady_state",
            Self::Incoherent => "incoherent",
            Self::Subtraction => "subtraction",
            Self::Compile => "compile",
        }
    }
}

impl FromStr for Experiment {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| RunError::Usage(format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    Chain,
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Periodic,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Power,
    Krylov,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phi2Kind {
    Stated,
    Resonant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantKind {
    EvenSimple,
    General,
    Both,
}

/// Every key a run understands. Keys irrelevant to the chosen experiment
/// are ignored but still echoed in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,

    pub lattice: LatticeKind,
    pub nx: usize,
    pub ny: usize,
    pub j: f64,
    pub u: f64,
    pub phi_plaq: f64,
    pub boundary: BoundaryKind,

    pub delta_t: f64,
    pub n_steps: usize,
    /// Photon-number cap of the system basis.
    pub n_max: usize,

    pub k_dt: Vec<f64>,
    pub alpha_ratio: f64,
    pub omega_grid: Vec<f64>,
    pub ancilla_cut: usize,
    pub solver: SolverKind,
    pub tol: f64,
    pub max_iter: usize,

    pub chi: f64,
    pub p_ref: f64,
    pub ancilla_levels: usize,
    pub record_every: usize,
    pub phi2_convention: Phi2Kind,

    pub pulse: Vec<String>,
    pub gamma_grid: Vec<f64>,
    pub k_list: Vec<u32>,

    pub variant: VariantKind,
    pub l_x: f64,
    pub l_y: f64,

    pub format: OutputFormat,
    pub seed: u64,
}

/// `n` evenly spaced points on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

impl ExperimentConfig {
    /// Defaults reproducing the reference setting of each experiment.
    pub fn defaults(experiment: Experiment) -> Self {
        let mut c = Self {
            experiment,
            lattice: LatticeKind::Square,
            nx: 4,
            ny: 4,
            j: 1.0,
            u: 10.0,
            phi_plaq: 0.25,
            boundary: BoundaryKind::Periodic,
            delta_t: 0.25,
            n_steps: 1,
            n_max: 2,
            k_dt: vec![0.05, 0.1, 0.15],
            alpha_ratio: 0.1,
            omega_grid: linspace(-2.85, -2.5, 30),
            ancilla_cut: 3,
            solver: SolverKind::Krylov,
            tol: 1e-9,
            max_iter: 400,
            chi: 0.048,
            p_ref: 0.01,
            ancilla_levels: 3,
            record_every: 10,
            phi2_convention: Phi2Kind::Stated,
            pulse: vec!["square".into(), "bump".into()],
            gamma_grid: vec![10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0, 2000.0, 4000.0, 5000.0, 10000.0],
            k_list: vec![1, 2, 3, 4],
            variant: VariantKind::Both,
            l_x: 1.0,
            l_y: 3.0,
            format: OutputFormat::Csv,
            seed: 0,
        };
        match experiment {
            Experiment::Quench => {
                c.lattice = LatticeKind::Chain;
                c.nx = 8;
                c.ny = 1;
                c.delta_t = 0.2;
                c.n_steps = 20;
            }
            Experiment::Incoherent => {
                c.n_max = 3;
                c.n_steps = 3000;
            }
            Experiment::Compile => {
                c.lattice = LatticeKind::Chain;
                c.nx = 8;
                c.ny = 1;
                c.delta_t = 0.2;
            }
            _ => {}
        }
        c
    }

    /// Defaults for `experiment`, overlaid by `file` (TOML text) and then by
    /// each `key=value` override in order.
    pub fn resolve(experiment: Experiment, file: Option<&str>, overrides: &[String]) -> Result<Self, RunError> {
        let base = Self::defaults(experiment);
        let mut table = match toml::Value::try_from(&base).map_err(|e| RunError::Config(e.to_string()))? {
            toml::Value::Table(t) => t,
            _ => unreachable!("config serializes to a table"),
        };
        let mut apply = |src: toml::Table| -> Result<(), RunError> {
            for (k, v) in src {
                if k == "experiment" {
                    let named: Experiment = v.as_str().unwrap_or_default().parse()?;
                    if named != experiment {
                        return Err(RunError::Config(format!("config is for {}, not {}", named.name(), experiment.name())));
                    }
                }
                if !table.contains_key(&k) {
                    return Err(RunError::Config(format!("unknown key {k:?}")));
                }
                table.insert(k, v);
            }
            Ok(())
        };
        if let Some(text) = file {
            apply(text.parse::<toml::Table>().map_err(|e| RunError::Config(e.to_string()))?)?;
        }
        for o in overrides {
            let (k, v) = o.split_once('=').ok_or_else(|| RunError::Config(format!("override {o:?} is not key=value")))?;
            let v = v.trim();
            let parsed = format!("v = {v}")
                .parse::<toml::Table>()
                .or_else(|_| format!("v = \"{v}\"").parse::<toml::Table>())
                .map_err(|e| RunError::Config(e.to_string()))?;
            let mut t = toml::Table::new();
            t.insert(k.trim().to_string(), parsed["v"].clone());
            apply(t)?;
        }
        let mut cfg: Self = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| RunError::Config(e.to_string()))?;
        // an explicit quench step leaves the total time at 4/J
        if experiment == Experiment::Quench && !overrides_or_file_has(file, overrides, "n_steps") {
            cfg.n_steps = (4.0 / (cfg.j.abs() * cfg.delta_t)).round() as usize;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |m: String| Err(RunError::Config(m));
        let reals = [
            ("j", self.j),
            ("u", self.u),
            ("phi_plaq", self.phi_plaq),
            ("delta_t", self.delta_t),
            ("alpha_ratio", self.alpha_ratio),
            ("tol", self.tol),
            ("chi", self.chi),
            ("p_ref", self.p_ref),
            ("l_x", self.l_x),
            ("l_y", self.l_y),
        ];
        for (k, v) in reals {
            if !v.is_finite() {
                return bad(format!("{k} must be finite"));
            }
        }
        if self.k_dt.iter().chain(&self.omega_grid).chain(&self.gamma_grid).any(|v| !v.is_finite()) {
            return bad("grids must be finite".into());
        }
        if !(self.delta_t > 0.0) {
            return bad("delta_t must be positive".into());
        }
        match self.experiment {
            Experiment::SteadyState => {
                if self.omega_grid.is_empty() {
                    return bad("omega_grid is empty".into());
                }
                if self.k_dt.is_empty() {
                    return bad("k_dt is empty".into());
                }
            }
            Experiment::Subtraction => {
                if self.gamma_grid.is_empty() || self.gamma_grid.iter().any(|g| *g <= 0.0) {
                    return bad("gamma_grid must be nonempty and positive".into());
                }
                if self.k_list.is_empty() || self.k_list.contains(&0) {
                    return bad("k_list must be nonempty with k >= 1".into());
                }
                if let Some(p) = self.pulse.iter().find(|p| !matches!(p.as_str(), "square" | "bump")) {
                    return bad(format!("unknown pulse {p:?}"));
                }
            }
            Experiment::Incoherent => {
                if !(0.0..=1.0).contains(&self.p_ref) {
                    return bad("p_ref must lie in [0, 1]".into());
                }
            }
            _ => {}
        }
        Ok(())
    }
}

fn overrides_or_file_has(file: Option<&str>, overrides: &[String], key: &str) -> bool {
    let in_file = file.and_then(|t| t.parse::<toml::Table>().ok()).is_some_and(|t| t.contains_key(key));
    in_file || overrides.iter().any(|o| o.split_once('=').is_some_and(|(k, _)| k.trim() == key))
}
