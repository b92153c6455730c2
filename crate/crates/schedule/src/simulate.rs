//! Event-driven replay of a schedule on the encoded modes.

use std::sync::Arc;

use photonsim_core::gates::{sequence_unitary, Gate, GateDescriptor};
use photonsim_core::lattice::LatticeModel;
use photonsim_core::sparse::CsrMatrix;
use photonsim_core::{FockBasis, SectorOperator};

use crate::layout::{Schedule, ScheduleEvent};
use crate::{Error, Result};

/// One beamsplitter coupling between two bins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Firing {
    pub element: usize,
    pub site_a: usize,
    pub site_b: usize,
    pub time: f64,
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub operator: SectorOperator,
    pub gates: Vec<GateDescriptor>,
    pub log: Vec<Firing>,
}

/// Gate list in firing order, with the firing log.
pub fn schedule_gates(schedule: &Schedule) -> Result<(Vec<GateDescriptor>, Vec<Firing>)> {
    schedule.validate()?;
    let layout = &schedule.layout;
    let tol = layout.tolerance();
    let mut delays = vec![0.0; layout.n_waveguides];
    let arrival = |delays: &[f64], wg: usize| -> Vec<(f64, usize)> {
        let mut v: Vec<(f64, usize)> =
            layout.bins_in(wg).map(|b| (layout.wrap(b.time + delays[wg]), b.site)).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    };
    let mut gates = Vec::new();
    let mut log = Vec::new();
    for (k, ev) in schedule.events.iter().enumerate() {
        match ev {
            ScheduleEvent::Delay { waveguide, length } => delays[*waveguide] += length,
            ScheduleEvent::Phase { waveguide, table } => {
                for (_, site) in arrival(&delays, *waveguide) {
                    gates.push(GateDescriptor::NumberPhase { mode: site, table: table.clone() });
                }
            }
            ScheduleEvent::StaticBeamsplitter { wg_a, wg_b, theta, phi }
            | ScheduleEvent::GatedBeamsplitter { wg_a, wg_b, theta, phi, .. } => {
                let windows = match ev {
                    ScheduleEvent::GatedBeamsplitter { windows, .. } => Some(windows),
                    _ => None,
                };
                let ta = arrival(&delays, *wg_a);
                let tb = arrival(&delays, *wg_b);
                for (wg, t) in [(*wg_a, &ta), (*wg_b, &tb)] {
                    if let Some(w) = t.windows(2).find(|w| (w[1].0 - w[0].0).abs() < tol) {
                        return Err(Error::SelfCollision { element: k, wg, a: w[0].1, b: w[1].1, time: w[0].0 });
                    }
                }
                let same = |x: f64, y: f64| {
                    let d = (x - y).abs();
                    d < tol || layout.period.is_some_and(|p| (d - p).abs() < tol)
                };
                for &(t, a) in &ta {
                    let Some(&(_, b)) = tb.iter().find(|(u, _)| same(t, *u)) else {
                        continue;
                    };
                    let extra = match windows {
                        None => Some(0.0),
                        Some(ws) => ws.iter().find(|w| w.contains(t)).map(|w| w.phase),
                    };
                    if let Some(extra) = extra {
                        let phi = phi + extra;
                        gates.push(GateDescriptor::BeamSplitter { i: a, j: b, theta: *theta, phi });
                        log.push(Firing { element: k, site_a: a, site_b: b, time: t, theta: *theta, phi });
                    }
                }
            }
        }
    }
    Ok((gates, log))
}

/// Replay `schedule` and accumulate its unitary on `basis`.
pub fn simulate_schedule(schedule: &Schedule, basis: &Arc<FockBasis>) -> Result<Simulation> {
    if basis.n_modes() != schedule.layout.n_sites() {
        return Err(Error::Dimension(basis.n_modes(), schedule.layout.n_sites()));
    }
    let (gates, log) = schedule_gates(schedule)?;
    let operator = descriptors_operator(&gates, basis)?;
    Ok(Simulation { operator, gates, log })
}

/// Ordered product of abstract gates as a sector operator.
pub fn descriptors_operator(gates: &[GateDescriptor], basis: &Arc<FockBasis>) -> Result<SectorOperator> {
    let compiled: Vec<Gate> = gates.iter().map(|g| g.compile(basis)).collect::<photonsim_core::Result<_>>()?;
    let dense = sequence_unitary(&compiled, basis.dim());
    Ok(SectorOperator::new(basis.clone(), CsrMatrix::from_dense(dense.view(), 0.0))?)
}

/// Checks that every edge of `model` fired exactly once and nothing else did.
pub fn coverage_audit(model: &LatticeModel, log: &[Firing]) -> Result<()> {
    let mut count = vec![0usize; model.edges.len()];
    for f in log {
        let k = model
            .edges
            .iter()
            .position(|e| (e.i, e.j) == (f.site_a, f.site_b) || (e.j, e.i) == (f.site_a, f.site_b))
            .ok_or_else(|| Error::Malformed(format!("sites {} and {} are not linked", f.site_a, f.site_b)))?;
        count[k] += 1;
    }
    match count.iter().position(|&c| c != 1) {
        Some(k) => Err(Error::Malformed(format!(
            "edge {}-{} fired {} times",
            model.edges[k].i, model.edges[k].j, count[k]
        ))),
        None => Ok(()),
    }
}
