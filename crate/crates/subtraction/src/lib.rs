//! Photon-subtraction error model for number-selective phase gates built from
//! a three-level atom coupled to a waveguide.
//!
//! Time is measured in units of the bin length, γ in units of its inverse.

pub mod derived;
pub mod fidelity;
pub mod pulse;
pub mod quadrature;

pub use derived::{DerivedCache, Grid, GridSpec, SubtractionDerived};
pub use fidelity::{
    f_sub_double, f_sub_single, gamma_threshold, gate_fidelity_two_layer, gate_infidelity, gate_infidelity_two_layer,
    p_fail_k1, p_fail_k2, pulse_gamma_threshold, square_infidelity_k1, square_infidelity_k2,
};
pub use pulse::PulseShape;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum Error {
    #[error("invalid pulse: {0}")]
    InvalidPulse(String),
    #[error("coupling must be positive and finite, got {0}")]
    InvalidGamma(f64),
    #[error("photon number {k} below the minimum {min}")]
    PhotonNumber { k: u32, min: u32 },
    #[error("invalid probabilities: {0}")]
    Probability(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Derived quantities at the default resolution.
pub fn derive_quantities(pulse: &PulseShape, gamma: f64) -> Result<SubtractionDerived> {
    SubtractionDerived::new(pulse, gamma, GridSpec::default())
}

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
