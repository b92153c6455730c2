//! Fock-space building blocks for simulating bosonic lattice models with
//! time-bin photonic circuits: bases, sparse operators, gates, lattice
//! models and Trotter-step spectra.

pub mod error;
pub mod fock;
pub mod gates;
pub mod lattice;
pub mod linalg;
pub mod sparse;
pub mod spectral;
pub mod theta;

pub use error::{Error, Result};
pub use fock::{
    ladder_operator, product_fock_state, total_number_operator, DensityMatrix, FockBasis, LadderKind, SectorOperator,
    StateVector,
};
pub use num_complex::Complex64 as C64;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
