//! Photon-subtraction error sweep over pulse shapes, couplings and photon
//! numbers.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use photonsim_subtraction::{
    derive_quantities, f_sub_double, f_sub_single, gate_infidelity, p_fail_k1, p_fail_k2, square_infidelity_k1,
    square_infidelity_k2, PulseShape, SubtractionDerived,
};
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::output::{Cell, RunOutput, Table};
use crate::{Result, RunError};

fn pulse(name: &str) -> Result<PulseShape> {
    match name {
        "square" => Ok(PulseShape::square()),
        "bump" => Ok(PulseShape::bump()),
        other => Err(RunError::Config(format!("unknown pulse {other:?}"))),
    }
}

/// One sweep row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub pulse: String,
    pub k: u32,
    pub gamma: f64,
    /// Known for k = 1 and 2.
    pub p_fail: Option<f64>,
    pub inf_single: f64,
    /// Needs k ≥ 2.
    pub inf_double: Option<f64>,
    /// 1 − F_gate at δφ = π.
    pub inf_gate_worstcase: Option<f64>,
}

fn rows_for(d: &SubtractionDerived, name: &str, ks: &[u32]) -> Result<Vec<SweepRow>> {
    ks.iter()
        .map(|&k| {
            let p_fail = match k {
                1 => Some(p_fail_k1(d)),
                2 => Some(p_fail_k2(d)),
                _ => None,
            };
            let inf_double = if k >= 2 { Some(1.0 - f_sub_double(d, k)?) } else { None };
            Ok(SweepRow {
                pulse: name.into(),
                k,
                gamma: d.gamma,
                p_fail,
                inf_single: 1.0 - f_sub_single(d, k)?,
                inf_double,
                inf_gate_worstcase: p_fail.map(|p| gate_infidelity(p, std::f64::consts::PI)).transpose()?,
            })
        })
        .collect()
}

/// All rows, ordered by pulse, then γ, then k.
pub fn sweep(pulses: &[String], gammas: &[f64], ks: &[u32], threads: usize) -> Result<Vec<SweepRow>> {
    let jobs: Vec<(&str, f64)> = pulses.iter().flat_map(|p| gammas.iter().map(move |&g| (p.as_str(), g))).collect();
    let results: Mutex<Vec<Option<Result<Vec<SweepRow>>>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..threads.min(jobs.len()).max(1) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(name, g)) = jobs.get(i) else { break };
                let r = pulse(name).and_then(|p| Ok(derive_quantities(&p, g)?)).and_then(|d| rows_for(&d, name, ks));
                results.lock().expect("no worker panicked")[i] = Some(r);
            });
        }
    });
    let mut rows = Vec::new();
    for r in results.into_inner().expect("no worker panicked") {
        rows.extend(r.expect("every job ran")?);
    }
    Ok(rows)
}

pub fn run(cfg: &ExperimentConfig, threads: usize) -> Result<RunOutput> {
    let rows = sweep(&cfg.pulse, &cfg.gamma_grid, &cfg.k_list, threads)?;
    let mut table = Table::new(
        "subtraction",
        &["pulse", "k", "gamma", "p_fail", "inf_single", "inf_double", "inf_gate_worstcase", "inf_single_closed_form"],
    );
    for r in &rows {
        let closed = match (r.pulse.as_str(), r.k) {
            ("square", 1) => Cell::from(square_infidelity_k1(r.gamma)),
            ("square", 2) => Cell::from(square_infidelity_k2(r.gamma)),
            _ => Cell::Missing,
        };
        table.push(vec![
            r.pulse.as_str().into(),
            r.k.into(),
            r.gamma.into(),
            r.p_fail.into(),
            r.inf_single.into(),
            r.inf_double.into(),
            r.inf_gate_worstcase.into(),
            closed,
        ]);
    }
    let mut out = RunOutput { tables: vec![table], ..Default::default() };
    let reference: Vec<_> = rows
        .iter()
        .filter(|r| r.pulse == "square" && r.gamma == 4000.0 && r.k <= 2)
        .map(|r| json!({"k": r.k, "p_fail": r.p_fail, "inf_single": r.inf_single}))
        .collect();
    out.set("square_gamma_4000", reference);
    out.set("rows", rows.len());
    Ok(out)
}
