//! Ground-state preparation with single-photon ancillas and probabilistic
//! refresh, simulated exactly on the joint system/ancilla density matrix.
//!
//! Joint index = `a · S + s`, where `s` runs over the system basis (all
//! sectors up to the cap) and `a` is the base-`L` number whose digit `i` is
//! the occupation of ancilla `i` (`L` ancilla levels). The joint dimension
//! grows as `S · L^M`, so only small lattices fit.

use std::collections::HashMap;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64 as C64;

use photonsim_core::gates::sequence_unitary;
use photonsim_core::lattice::{compile_step, LatticeModel};
use photonsim_core::linalg::expm;
use photonsim_core::sparse::CsrMatrix;
use photonsim_core::spectral::{sector_spectrum, GroundSpace};
use photonsim_core::{Error, FockBasis, Result};

/// Largest joint dimension accepted by [`IncoherentProtocol::new`].
pub const MAX_JOINT_DIM: usize = 6000;

/// Sign of the ground-phase difference entering φ₂.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phi2Convention {
    /// φ₂ = φ_g⁽²⁾ − φ_g⁽³⁾ + φ₁
    Stated,
    /// φ₂ = φ_g⁽³⁾ − φ_g⁽²⁾ + φ₁, which makes 3 → 2 emission into an occupied
    /// ancilla phase matched.
    Resonant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncoherentParams {
    pub chi: f64,
    pub p_ref: f64,
    pub delta_t: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl IncoherentParams {
    pub fn new(chi: f64, p_ref: f64, delta_t: f64, phi1: f64, phi2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_ref) {
            return Err(Error::InvalidArgument(format!("refresh probability {p_ref} outside [0, 1]")));
        }
        if !(delta_t > 0.0) || !chi.is_finite() || !phi1.is_finite() || !phi2.is_finite() {
            return Err(Error::InvalidArgument("bad incoherent protocol parameters".into()));
        }
        Ok(Self { chi, p_ref, delta_t, phi1, phi2 })
    }

    /// Phases from the ground eigenphases of the one-, two- and three-photon
    /// step unitaries.
    pub fn from_model(model: &LatticeModel, chi: f64, p_ref: f64, delta_t: f64, convention: Phi2Convention) -> Result<Self> {
        let g = ground_phases(model, delta_t)?;
        let phi1 = g[1] - g[0];
        let phi2 = match convention {
            Phi2Convention::Stated => g[1] - g[2] + phi1,
            Phi2Convention::Resonant => g[2] - g[1] + phi1,
        };
        Self::new(chi, p_ref, delta_t, phi1, phi2)
    }

    /// Number-selective phase table applied to each ancilla.
    pub fn ancilla_table(&self) -> [f64; 3] {
        [0.0, self.phi1, self.phi2]
    }
}

/// arg of the lowest-energy eigenvalue of the step unitary in sectors 1, 2, 3.
pub fn ground_phases(model: &LatticeModel, delta_t: f64) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let (_, spec) = sector_spectrum(model, delta_t, k + 1)?;
        *o = spec.eigenphases[0].arg();
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct IncoherentProtocol {
    pub system: Arc<FockBasis>,
    pub params: IncoherentParams,
    n_modes: usize,
    levels: usize,
    exchange: Vec<CsrMatrix>,
    unitary: Array2<C64>,
    ancilla_phase: Vec<C64>,
}

/// Observables of one joint state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncoherentRecord {
    pub step: usize,
    /// System photon-number populations P₀..P₃.
    pub populations: [f64; 4],
    /// Weight on the two-photon ground doublet (unnormalized by P₂).
    pub ground: f64,
    pub n_mean: f64,
    pub n_variance: f64,
}

impl IncoherentProtocol {
    /// `ancilla_levels` is the ancilla cut (3 keeps up to two photons); the
    /// system holds up to `system_cap` photons.
    pub fn new(model: &LatticeModel, params: IncoherentParams, system_cap: usize, ancilla_levels: usize) -> Result<Self> {
        if ancilla_levels < 2 {
            return Err(Error::InvalidArgument("ancillas need at least two levels".into()));
        }
        let m = model.n_sites;
        let system = Arc::new(FockBasis::up_to(m, system_cap)?);
        let n_anc = (ancilla_levels as u64).checked_pow(m as u32).unwrap_or(u64::MAX);
        let joint = (system.dim() as u64).saturating_mul(n_anc);
        if joint > MAX_JOINT_DIM as u64 {
            return Err(Error::InvalidArgument(format!(
                "joint system/ancilla dimension {joint} exceeds the exact-simulation limit {MAX_JOINT_DIM}"
            )));
        }
        let n_anc = n_anc as usize;
        let gates = compile_step(model, &system, params.delta_t)?;
        let unitary = sequence_unitary(&gates, system.dim());
        let table = params.ancilla_table();
        let phase = |n: usize| photonsim_core::gates::table_phase(&table[..ancilla_levels.min(3)], n);
        let ancilla_phase = (0..n_anc)
            .map(|a| C64::from_polar(1.0, (0..m).map(|i| phase(digit(a, i, ancilla_levels))).sum()))
            .collect();
        let mut me = Self { system, params, n_modes: m, levels: ancilla_levels, exchange: Vec::new(), unitary, ancilla_phase };
        me.exchange = (0..m).map(|i| me.exchange_matrix(i)).collect::<Result<_>>()?;
        Ok(me)
    }

    pub fn dim(&self) -> usize {
        self.system.dim() * self.n_ancilla_configs()
    }

    fn n_ancilla_configs(&self) -> usize {
        self.levels.pow(self.n_modes as u32)
    }

    /// Beamsplitter between system mode `i` and ancilla `i` with reflection
    /// cos(χδt) and transmission i·sin(χδt), generated by the exchange term
    /// restricted to the truncated space so that it stays unitary there.
    fn exchange_matrix(&self, i: usize) -> Result<CsrMatrix> {
        let theta = self.params.chi * self.params.delta_t;
        let cap = self.system.max_photons();
        let s_dim = self.system.dim();
        let mut cache: HashMap<(usize, usize, usize), Array2<C64>> = HashMap::new();
        let mut trip = Vec::new();
        let pow = self.levels.pow(i as u32);
        for a in 0..self.n_ancilla_configs() {
            let nc = digit(a, i, self.levels);
            for s in 0..s_dim {
                let occ = self.system.state(s);
                let nb = occ[i] as usize;
                let rest = self.system.total(s) - nb;
                let total = nb + nc;
                let nb_max = (cap - rest).min(total);
                let nb_min = total.saturating_sub(self.levels - 1);
                let key = (total, nb_min, nb_max);
                let block = match cache.get(&key) {
                    Some(b) => b.clone(),
                    None => {
                        let b = exchange_block(total, nb_min, nb_max, theta);
                        cache.insert(key, b.clone());
                        b
                    }
                };
                let col = nb - nb_min;
                let mut target = occ.to_vec();
                for (row, nb2) in (nb_min..=nb_max).enumerate() {
                    let amp = block[(row, col)];
                    if amp == C64::default() {
                        continue;
                    }
                    target[i] = nb2 as u8;
                    let s2 = self.system.index_of(&target).ok_or_else(|| Error::InvalidArgument("exchange left the basis".into()))?;
                    let nc2 = total - nb2;
                    let a2 = a + nc2 * pow - nc * pow;
                    trip.push((a2 * s_dim + s2, a * s_dim + s, amp));
                }
            }
        }
        Ok(CsrMatrix::from_triplets(self.dim(), self.dim(), trip))
    }

    /// ρ_S ⊗ |1…1⟩⟨1…1|.
    pub fn initial_state(&self, system_rho: &Array2<C64>) -> Result<Array2<C64>> {
        let s_dim = self.system.dim();
        if system_rho.nrows() != s_dim || system_rho.ncols() != s_dim {
            return Err(Error::DimensionMismatch { expected: s_dim, got: system_rho.nrows() });
        }
        let ones: usize = (0..self.n_modes).map(|i| self.levels.pow(i as u32)).sum();
        let mut rho = Array2::zeros((self.dim(), self.dim()));
        let off = ones * s_dim;
        rho.slice_mut(ndarray::s![off..off + s_dim, off..off + s_dim]).assign(system_rho);
        Ok(rho)
    }

    /// Exchange layer, Hamiltonian step with ancilla phases, then refresh.
    pub fn step(&self, rho: &Array2<C64>) -> Array2<C64> {
        let mut r = rho.to_owned();
        for v in &self.exchange {
            r = conjugate_sparse(v, &r);
        }
        self.apply_local_unitaries(&mut r);
        for i in 0..self.n_modes {
            r = self.refresh(&r, i);
        }
        r
    }

    fn apply_local_unitaries(&self, r: &mut Array2<C64>) {
        let s_dim = self.system.dim();
        let n_a = self.n_ancilla_configs();
        let u = &self.unitary;
        let ud = u.t().mapv(|z| z.conj());
        for a in 0..n_a {
            for b in 0..n_a {
                let mut blk = r.slice_mut(ndarray::s![a * s_dim..(a + 1) * s_dim, b * s_dim..(b + 1) * s_dim]);
                let ph = self.ancilla_phase[a] * self.ancilla_phase[b].conj();
                let new = u.dot(&blk).dot(&ud).mapv(|z| z * ph);
                blk.assign(&new);
            }
        }
    }

    /// ρ → (1 − p)ρ + p·Tr_i(ρ) ⊗ |1⟩⟨1|_i
    fn refresh(&self, r: &Array2<C64>, i: usize) -> Array2<C64> {
        let p = self.params.p_ref;
        if p == 0.0 {
            return r.clone();
        }
        let s_dim = self.system.dim();
        let pow = self.levels.pow(i as u32);
        let mut out = r.mapv(|z| z * (1.0 - p));
        for a in 0..self.n_ancilla_configs() {
            if digit(a, i, self.levels) != 1 {
                continue;
            }
            let base_a = a - pow;
            for b in 0..self.n_ancilla_configs() {
                if digit(b, i, self.levels) != 1 {
                    continue;
                }
                let base_b = b - pow;
                for n in 0..self.levels {
                    let (sa, sb) = (base_a + n * pow, base_b + n * pow);
                    for x in 0..s_dim {
                        for y in 0..s_dim {
                            out[(a * s_dim + x, b * s_dim + y)] += p * r[(sa * s_dim + x, sb * s_dim + y)];
                        }
                    }
                }
            }
        }
        out
    }

    /// Reduced system density matrix.
    pub fn system_state(&self, rho: &Array2<C64>) -> Array2<C64> {
        let s_dim = self.system.dim();
        let mut out = Array2::zeros((s_dim, s_dim));
        for a in 0..self.n_ancilla_configs() {
            out += &rho.slice(ndarray::s![a * s_dim..(a + 1) * s_dim, a * s_dim..(a + 1) * s_dim]);
        }
        out
    }

    /// Occupation distribution of ancilla `i`.
    pub fn ancilla_distribution(&self, rho: &Array2<C64>, i: usize) -> Vec<f64> {
        let s_dim = self.system.dim();
        let mut out = vec![0.0; self.levels];
        for a in 0..self.n_ancilla_configs() {
            let n = digit(a, i, self.levels);
            out[n] += (0..s_dim).map(|x| rho[(a * s_dim + x, a * s_dim + x)].re).sum::<f64>();
        }
        out
    }

    pub fn observe(&self, rho: &Array2<C64>, step: usize, ground: Option<&GroundSpace>) -> Result<IncoherentRecord> {
        let sys = self.system_state(rho);
        system_record(&self.system, &sys, step, ground)
    }

    /// Runs `steps` steps from `rho`, recording every `every` steps (and the
    /// initial state).
    pub fn run(&self, mut rho: Array2<C64>, steps: usize, every: usize, ground: Option<&GroundSpace>) -> Result<(Array2<C64>, Vec<IncoherentRecord>)> {
        let every = every.max(1);
        let mut rec = vec![self.observe(&rho, 0, ground)?];
        for k in 1..=steps {
            rho = self.step(&rho);
            if k % every == 0 || k == steps {
                rec.push(self.observe(&rho, k, ground)?);
            }
        }
        Ok((rho, rec))
    }
}

/// Observables of a system density matrix on a capped basis.
pub fn system_record(basis: &FockBasis, sys: &Array2<C64>, step: usize, ground: Option<&GroundSpace>) -> Result<IncoherentRecord> {
    let mut populations = [0.0; 4];
    let (mut n1, mut n2) = (0.0, 0.0);
    for x in 0..basis.dim() {
        let k = basis.total(x);
        let p = sys[(x, x)].re;
        if k < 4 {
            populations[k] += p;
        }
        n1 += k as f64 * p;
        n2 += (k * k) as f64 * p;
    }
    let ground = match (ground, basis.sector_range(2)) {
        (Some(g), Some(r)) => {
            if g.states.nrows() != r.len() {
                return Err(Error::DimensionMismatch { expected: r.len(), got: g.states.nrows() });
            }
            let blk = sys.slice(ndarray::s![r.clone(), r]);
            let q = &g.states;
            q.t().mapv(|z| z.conj()).dot(&blk).dot(q).diag().iter().map(|z| z.re).sum()
        }
        _ => 0.0,
    };
    Ok(IncoherentRecord { step, populations, ground, n_mean: n1, n_variance: n2 - n1 * n1 })
}

fn digit(a: usize, i: usize, levels: usize) -> usize {
    (a / levels.pow(i as u32)) % levels
}

/// exp(iθ(b†c + c†b)) on states |n_b, total − n_b⟩ with n_b in [lo, hi].
fn exchange_block(total: usize, lo: usize, hi: usize, theta: f64) -> Array2<C64> {
    let d = hi + 1 - lo;
    let mut g = Array2::zeros((d, d));
    for k in 0..d.saturating_sub(1) {
        let nb = lo + k;
        // ⟨nb+1, nc−1| b†c |nb, nc⟩
        let amp = ((nb + 1) as f64).sqrt() * ((total - nb) as f64).sqrt();
        g[(k + 1, k)] = C64::new(0.0, theta * amp);
        g[(k, k + 1)] = C64::new(0.0, theta * amp);
    }
    expm(&g)
}

fn conjugate_sparse(v: &CsrMatrix, r: &Array2<C64>) -> Array2<C64> {
    let left = v.mul_dense(r.view());
    let right = v.mul_dense(left.t().mapv(|z| z.conj()).view());
    right.t().mapv(|z| z.conj())
}

