//! Equivalence of a schedule unitary with the abstract Trotter step.

use photonsim_core::{SectorOperator, C64};

use crate::{Error, Result};

/// Distances below this count as equal.
pub const EQUIVALENCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub equal: bool,
    /// max |U_sched − c·U_abs| elementwise.
    pub distance: f64,
    pub global_phase: C64,
}

/// Compares two unitaries up to a global phase. The phase is taken from
/// their Hilbert–Schmidt overlap, which is exact whenever the operators
/// agree up to a phase and an upper bound on the optimum otherwise.
pub fn certify_equivalence(schedule: &SectorOperator, abstract_step: &SectorOperator) -> Result<Certificate> {
    if schedule.dim() != abstract_step.dim() {
        return Err(Error::Dimension(schedule.dim(), abstract_step.dim()));
    }
    let a = schedule.to_dense();
    let b = abstract_step.to_dense();
    let overlap: C64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let c = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
    let distance = a.iter().zip(b.iter()).map(|(x, y)| (x - c * y).norm()).fold(0.0, f64::max);
    Ok(Certificate { equal: distance < EQUIVALENCE_TOL, distance, global_phase: c })
}
