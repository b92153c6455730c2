//! Runner binding the simulation crates into reproducible experiments.
//!
//! A run resolves an [`ExperimentConfig`], computes its tables, and writes
//! them together with `summary.json` and `manifest.json` into an output
//! directory. Nothing time- or RNG-dependent reaches the files, so equal
//! configs give byte-identical outputs.

pub mod config;
pub mod experiments;
pub mod output;

use std::path::Path;

pub use config::{Experiment, ExperimentConfig};
pub use output::{RunOutput, Table};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid config: {0}")]
    Config(String),
    /// A solver missed its tolerance or a certificate failed.
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Core(#[from] photonsim_core::Error),
    #[error(transparent)]
    Schedule(#[from] photonsim_schedule::Error),
    #[error(transparent)]
    Subtraction(#[from] photonsim_subtraction::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// 1 for usage and validation problems, 2 for numerical ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Numerical(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, RunError>;

/// Computes an experiment without touching the filesystem.
pub fn run(cfg: &ExperimentConfig, threads: usize) -> Result<RunOutput> {
    use experiments::*;
    match cfg.experiment {
        Experiment::Quench => quench::run(cfg),
        Experiment::Spectrum => spectrum::run(cfg),
        Experiment::SteadyState => steady_state::run(cfg, threads.max(1)),
        Experiment::Incoherent => incoherent::run(cfg),
        Experiment::Subtraction => subtraction::run(cfg, threads.max(1)),
        Experiment::Compile => compile::run(cfg),
    }
}

/// Runs and writes all files into `dir`. A numerical failure is reported
/// after the files are written so partial results stay inspectable.
pub fn run_to_dir(cfg: &ExperimentConfig, dir: &Path, threads: usize) -> Result<RunOutput> {
    let out = run(cfg, threads)?;
    out.write(cfg, dir)?;
    if let Some(msg) = &out.failure {
        return Err(RunError::Numerical(msg.clone()));
    }
    Ok(out)
}
