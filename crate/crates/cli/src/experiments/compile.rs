//! Time-bin schedule of one Trotter step, with its equivalence certificate
//! against the abstract gate sequence.

use std::sync::Arc;

use photonsim_core::lattice::{trotter_step_sequence, Geometry};
use photonsim_core::FockBasis;
use photonsim_schedule::simulate::descriptors_operator;
use photonsim_schedule::{
    certify_equivalence, compile_1d, compile_2d, coverage_audit, simulate_schedule, write_schedule, Variant,
};
use serde_json::{json, Value};

use super::build_model;
use crate::config::{ExperimentConfig, VariantKind};
use crate::output::RunOutput;
use crate::Result;

/// Sectors the certificate is checked on.
const CERT_SECTORS: [usize; 2] = [1, 2];

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let model = build_model(cfg)?;
    let n_max = *CERT_SECTORS.last().expect("nonempty");
    let basis = Arc::new(FockBasis::new(model.n_sites, &CERT_SECTORS)?);
    let reference = descriptors_operator(&trotter_step_sequence(&model, cfg.delta_t, n_max), &basis)?;
    let schedules = match model.geometry {
        Geometry::Chain { .. } => {
            let variants: &[(Variant, &str)] = match cfg.variant {
                VariantKind::EvenSimple => &[(Variant::EvenSimple, "even_simple")],
                VariantKind::General => &[(Variant::General, "general")],
                VariantKind::Both => &[(Variant::EvenSimple, "even_simple"), (Variant::General, "general")],
            };
            variants
                .iter()
                .map(|&(v, name)| Ok((name, compile_1d(&model, cfg.delta_t, n_max, cfg.l_x, v)?)))
                .collect::<Result<Vec<_>>>()?
        }
        Geometry::Square { .. } => vec![("square", compile_2d(&model, cfg.delta_t, n_max, cfg.l_x, cfg.l_y)?)],
    };
    let mut out = RunOutput::default();
    let mut certs = serde_json::Map::new();
    let mut failed = Vec::new();
    for (name, s) in &schedules {
        let sim = simulate_schedule(s, &basis)?;
        let audit = coverage_audit(&model, &sim.log);
        let c = certify_equivalence(&sim.operator, &reference)?;
        if !c.equal || audit.is_err() {
            failed.push(*name);
        }
        certs.insert(
            name.to_string(),
            json!({
                "equal": c.equal,
                "distance": c.distance,
                "global_phase": [c.global_phase.re, c.global_phase.im],
                "coverage": audit.as_ref().map_or_else(|e| Value::from(e.to_string()), |_| Value::from("complete")),
                "beamsplitters": s.beamsplitter_count(),
                "delays": s.delay_count(),
            }),
        );
        out.files.push((format!("schedule_{name}.txt"), write_schedule(s)));
    }
    let cert = json!({"sectors": CERT_SECTORS, "tolerance": photonsim_schedule::certify::EQUIVALENCE_TOL, "schedules": certs});
    let mut text = serde_json::to_string_pretty(&cert).expect("json serializes");
    text.push('\n');
    out.files.push(("certificate.json".into(), text));
    out.set("certified", failed.is_empty());
    if !failed.is_empty() {
        out.failure = Some(format!("certificate failed for {}", failed.join(", ")));
    }
    Ok(out)
}
