//! Open-system dynamics on photonic lattices: drive and loss channels built
//! from ancilla modes, the per-circulation channel, its steady state, and an
//! ancilla-assisted preparation protocol.

pub mod channel;
pub mod incoherent;
pub mod krylov;
pub mod lindblad;
pub mod params;
pub mod steady;

pub use channel::{drive_diss_channel, full_circulation_channel, FullCirculation, SiteChannel};
pub use params::DriveDissParams;
pub use steady::{fixed_point, fixed_point_krylov, Channel, EigenPreconditioner, FixedPoint, SteadyStateReport};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
