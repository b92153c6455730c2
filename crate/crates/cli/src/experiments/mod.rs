pub mod compile;
pub mod incoherent;
pub mod quench;
pub mod spectrum;
pub mod steady_state;
pub mod subtraction;

use photonsim_core::lattice::{build_bose_hubbard, build_fqh, Boundary, LatticeModel};

use crate::config::{BoundaryKind, ExperimentConfig, LatticeKind};
use crate::Result;

pub fn boundary(cfg: &ExperimentConfig) -> Boundary {
    match cfg.boundary {
        BoundaryKind::Periodic => Boundary::Periodic,
        BoundaryKind::Open => Boundary::Open,
    }
}

/// Lattice described by the model keys of `cfg`.
pub fn build_model(cfg: &ExperimentConfig) -> Result<LatticeModel> {
    Ok(match cfg.lattice {
        LatticeKind::Chain => build_bose_hubbard(cfg.nx, cfg.j, cfg.u, boundary(cfg))?,
        LatticeKind::Square => build_fqh(cfg.nx, cfg.ny, cfg.j, cfg.u, cfg.phi_plaq, boundary(cfg))?,
    })
}
