//! Time-bin waveguide schedules for Trotterized lattice models.
//!
//! Lattice sites live in time bins travelling along a few parallel
//! waveguides. A schedule is an ordered list of optical elements: fiber
//! delays shift whole waveguides in time, beamsplitters couple any two bins
//! that reach them at the same instant, and phase elements act on every bin
//! of one waveguide. [`simulate_schedule`] replays a schedule bin by bin and
//! [`certify_equivalence`] compares the result with the abstract Trotter step.

pub mod certify;
pub mod compile;
pub mod layout;
pub mod simulate;
pub mod text;

pub use certify::{certify_equivalence, Certificate};
pub use compile::{compile_1d, compile_2d, Variant};
pub use layout::{Bin, Schedule, ScheduleEvent, TimeBinLayout, Window};
pub use simulate::{coverage_audit, simulate_schedule, Firing, Simulation};
pub use text::{parse_schedule, write_schedule};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("waveguide {wg}: bins of sites {a} and {b} coincide at t = {time} in element {element}")]
    SelfCollision { element: usize, wg: usize, a: usize, b: usize, time: f64 },
    #[error("malformed schedule: {0}")]
    Malformed(String),
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Core(#[from] photonsim_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
