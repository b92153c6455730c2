//! Ancilla-assisted preparation of the two-photon ground state, run from
//! vacuum and from the target state.

use ndarray::Array2;
use photonsim_core::spectral::{sector_spectrum, GroundSpace};
use photonsim_core::C64;
use photonsim_dynamics::incoherent::{IncoherentParams, IncoherentProtocol, IncoherentRecord, Phi2Convention};
use serde_json::json;

use super::build_model;
use crate::config::{ExperimentConfig, Phi2Kind};
use crate::output::{RunOutput, Table};
use crate::Result;

/// Named starting state of the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Start {
    Vacuum,
    Ground,
}

impl Start {
    pub fn name(self) -> &'static str {
        match self {
            Self::Vacuum => "vacuum",
            Self::Ground => "ground",
        }
    }
}

/// System density matrix of `start` on the protocol's capped basis.
pub fn start_state(protocol: &IncoherentProtocol, ground: &GroundSpace, start: Start) -> Result<Array2<C64>> {
    let sys = &protocol.system;
    let mut rho = Array2::zeros((sys.dim(), sys.dim()));
    match start {
        Start::Vacuum => {
            let v = sys.index_of(&vec![0; sys.n_modes()]).expect("vacuum is in every capped basis");
            rho[(v, v)] = C64::new(1.0, 0.0);
        }
        Start::Ground => {
            let psi = ground.states.column(0);
            let idx: Vec<usize> = ground
                .basis
                .states()
                .iter()
                .map(|s| sys.index_of(s).ok_or_else(|| photonsim_core::Error::NotInBasis(s.clone())))
                .collect::<std::result::Result<_, _>>()?;
            for (a, &ia) in idx.iter().enumerate() {
                for (b, &ib) in idx.iter().enumerate() {
                    rho[(ia, ib)] = psi[a] * psi[b].conj();
                }
            }
        }
    }
    Ok(rho)
}

/// Records of one run.
pub fn trace(cfg: &ExperimentConfig, start: Start) -> Result<Vec<IncoherentRecord>> {
    let (protocol, ground) = setup(cfg)?;
    let rho0 = protocol.initial_state(&start_state(&protocol, &ground, start)?)?;
    Ok(protocol.run(rho0, cfg.n_steps, cfg.record_every, Some(&ground))?.1)
}

fn setup(cfg: &ExperimentConfig) -> Result<(IncoherentProtocol, GroundSpace)> {
    let model = build_model(cfg)?;
    let conv = match cfg.phi2_convention {
        Phi2Kind::Stated => Phi2Convention::Stated,
        Phi2Kind::Resonant => Phi2Convention::Resonant,
    };
    let params = IncoherentParams::from_model(&model, cfg.chi, cfg.p_ref, cfg.delta_t, conv)?;
    let protocol = IncoherentProtocol::new(&model, params, cfg.n_max, cfg.ancilla_levels)?;
    let (b2, spec) = sector_spectrum(&model, cfg.delta_t, 2)?;
    Ok((protocol, GroundSpace::from_spectrum(b2, &spec)?))
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let (protocol, ground) = setup(cfg)?;
    let mut table =
        Table::new("incoherent", &["start", "step", "p0", "p1", "p2", "p3", "ground", "n_mean", "n_variance"]);
    let mut out = RunOutput::default();
    out.set("joint_dim", protocol.dim());
    out.set("phi1", protocol.params.phi1);
    out.set("phi2", protocol.params.phi2);
    for start in [Start::Vacuum, Start::Ground] {
        let rho0 = protocol.initial_state(&start_state(&protocol, &ground, start)?)?;
        let (_, rec) = protocol.run(rho0, cfg.n_steps, cfg.record_every, Some(&ground))?;
        for r in &rec {
            let p = r.populations;
            table.push(vec![
                start.name().into(),
                r.step.into(),
                p[0].into(),
                p[1].into(),
                p[2].into(),
                p[3].into(),
                r.ground.into(),
                r.n_mean.into(),
                r.n_variance.into(),
            ]);
        }
        let last = rec.last().expect("run records the initial state");
        out.set(start.name(), json!({"p2": last.populations[2], "ground": last.ground, "n_mean": last.n_mean}));
    }
    out.tables.push(table);
    Ok(out)
}
