//! Site-local channels on a photon-number-truncated lattice and the full
//! per-circulation map.
//!
//! A channel acting on one site only sees the site occupation `n`; the rest
//! of the lattice enters through its total photon number `R`, which fixes
//! how many local levels (`N_max − R + 1`) are representable. Kraus
//! operators are therefore given per local dimension and applied blockwise
//! over pairs of rest configurations.

use std::collections::HashMap;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64 as C64;

use photonsim_core::gates::{beamsplitter_gate, conjugate_sequence, Gate};
use photonsim_core::lattice::{compile_step, LatticeModel};
use photonsim_core::linalg::hermitian_function;
use photonsim_core::{DensityMatrix, Error, FockBasis, Result};

use crate::params::DriveDissParams;

/// Kraus family for one local dimension. Position in the list is the
/// outcome label; families for different dimensions are paired label by
/// label, so a missing label simply means a zero operator.
pub type KrausFamily = Vec<Array2<C64>>;

#[derive(Debug, Clone)]
pub struct SiteChannel {
    dim: usize,
    /// Basis indices of each rest configuration, ordered by local occupation.
    blocks: Vec<Vec<usize>>,
    /// Superoperators indexed by the local dimensions of the two blocks.
    supers: HashMap<(usize, usize), Array2<C64>>,
}

impl SiteChannel {
    /// `kraus(d)` must return the operators for local dimension `d`.
    pub fn from_kraus(basis: &FockBasis, site: usize, kraus: impl Fn(usize) -> Result<KrausFamily>) -> Result<Self> {
        let n_max = basis.max_photons();
        if basis.sectors() != (0..=n_max).collect::<Vec<_>>().as_slice() {
            return Err(Error::InvalidArgument("site channels need a basis with every sector 0..=N_max".into()));
        }
        if site >= basis.n_modes() {
            return Err(Error::ModeOutOfRange { mode: site, n_modes: basis.n_modes() });
        }
        let mut ids: HashMap<Vec<u8>, usize> = HashMap::new();
        let mut blocks: Vec<Vec<(u8, usize)>> = Vec::new();
        for (idx, s) in basis.states().iter().enumerate() {
            let mut key = s.clone();
            key[site] = 0;
            let id = *ids.entry(key).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[id].push((s[site], idx));
        }
        let blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.into_iter().map(|(_, i)| i).collect()
            })
            .collect();
        let families: Vec<KrausFamily> = (1..=n_max + 1).map(&kraus).collect::<Result<_>>()?;
        let mut supers = HashMap::new();
        for d1 in 1..=n_max + 1 {
            for d2 in 1..=n_max + 1 {
                supers.insert((d1, d2), pair_superoperator(&families[d1 - 1], &families[d2 - 1]));
            }
        }
        Ok(Self { dim: basis.dim(), blocks, supers })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, rho: &Array2<C64>) -> Array2<C64> {
        let n = self.dim;
        let src = rho.as_standard_layout();
        let src = src.as_slice().expect("standard layout");
        let mut out = vec![C64::default(); n * n];
        let mut x = Vec::with_capacity(64);
        for b1 in &self.blocks {
            for b2 in &self.blocks {
                let s = &self.supers[&(b1.len(), b2.len())];
                if b1.len() == 1 && b2.len() == 1 {
                    out[b1[0] * n + b2[0]] = s[(0, 0)] * src[b1[0] * n + b2[0]];
                    continue;
                }
                x.clear();
                for &r in b1 {
                    for &c in b2 {
                        x.push(src[r * n + c]);
                    }
                }
                let mut k = 0;
                for &r in b1 {
                    for &c in b2 {
                        let row = s.row(k);
                        out[r * n + c] = row.iter().zip(&x).map(|(a, b)| a * b).sum();
                        k += 1;
                    }
                }
            }
        }
        Array2::from_shape_vec((n, n), out).expect("square")
    }
}

/// Σ_m K_m ⊗ conj(K'_m) acting on row-major vectorized blocks.
fn pair_superoperator(k1: &KrausFamily, k2: &KrausFamily) -> Array2<C64> {
    let d1 = k1.first().map_or(0, |k| k.nrows());
    let d2 = k2.first().map_or(0, |k| k.nrows());
    let mut s = Array2::zeros((d1 * d2, d1 * d2));
    for (a, b) in k1.iter().zip(k2.iter()) {
        for a1 in 0..d1 {
            for a2 in 0..d2 {
                for b1 in 0..d1 {
                    let x = a[(a1, b1)];
                    if x == C64::default() {
                        continue;
                    }
                    for b2 in 0..d2 {
                        s[(a1 * d2 + a2, b1 * d2 + b2)] += x * b[(a2, b2)].conj();
                    }
                }
            }
        }
    }
    s
}

/// Truncated coherent-state amplitudes, renormalized. Fails when the cut
/// loses more than 1e−10 of the norm.
pub fn coherent_amplitudes(alpha: C64, cut: usize) -> Result<Vec<C64>> {
    if cut < 2 {
        return Err(Error::InvalidArgument("ancilla cut must be at least 2".into()));
    }
    let pref = (-0.5 * alpha.norm_sqr()).exp();
    let mut amps = Vec::with_capacity(cut);
    let mut term = C64::new(pref, 0.0);
    for k in 0..cut {
        if k > 0 {
            term *= alpha / (k as f64).sqrt();
        }
        amps.push(term);
    }
    let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if 1.0 - norm2 > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "coherent state |alpha|={} loses {:.3e} of its norm at cut {cut}; raise the ancilla cut",
            alpha.norm(),
            1.0 - norm2
        )));
    }
    let s = norm2.sqrt();
    Ok(amps.into_iter().map(|a| a / s).collect())
}

/// Kraus operators of the drive/dissipation channel on a site with `d` local
/// levels. Label 0 is the completion term that restores trace preservation
/// after outputs above the cap are dropped; label `m + 1` is ancilla outcome `m`.
pub fn drive_kraus(d: usize, params: &DriveDissParams, ancilla_cut: usize) -> Result<KrausFamily> {
    let amps = coherent_amplitudes(params.alpha, ancilla_cut)?;
    let top = d - 1 + ancilla_cut - 1;
    let pair = Arc::new(FockBasis::up_to(2, top)?);
    // generator Kδt (b†c + c†b) with the system on mode 0 and the ancilla on mode 1
    let u = beamsplitter_gate(&pair, 1, 0, params.k_dt(), 0.0)?.to_dense();
    let phase = params.phase();
    let mut family: KrausFamily = vec![Array2::zeros((d, d)); top + 2];
    for n in 0..d {
        for (k, &c) in amps.iter().enumerate() {
            let src = pair.index_of(&[n as u8, k as u8]).expect("in pair basis");
            for np in 0..d.min(n + k + 1) {
                let m = n + k - np;
                let dst = pair.index_of(&[np as u8, m as u8]).expect("in pair basis");
                family[m + 1][(np, n)] += C64::from_polar(1.0, phase * np as f64) * u[(dst, src)] * c;
            }
        }
    }
    let mut deficit = Array2::<C64>::eye(d);
    for k in &family[1..] {
        let kd: Array2<C64> = k.t().mapv(|z| z.conj());
        deficit -= &kd.dot(k);
    }
    let root = hermitian_function(&deficit, |x| C64::new(x.max(0.0).sqrt(), 0.0))?;
    let phases = Array2::from_diag(&ndarray::Array1::from_shape_fn(d, |n| C64::from_polar(1.0, phase * n as f64)));
    family[0] = phases.dot(&root);
    Ok(family)
}

/// Drive/dissipation channel on `site`.
pub fn drive_diss_site(basis: &FockBasis, site: usize, params: &DriveDissParams, ancilla_cut: usize) -> Result<SiteChannel> {
    SiteChannel::from_kraus(basis, site, |d| drive_kraus(d, params, ancilla_cut))
}

/// Applies the drive/dissipation channel to a density matrix.
pub fn drive_diss_channel(rho: &DensityMatrix, site: usize, params: &DriveDissParams, ancilla_cut: usize) -> Result<DensityMatrix> {
    let ch = drive_diss_site(&rho.basis, site, params, ancilla_cut)?;
    DensityMatrix::new(rho.basis.clone(), ch.apply(&rho.matrix))
}

/// One circulation: the Trotter step ρ → UρU† followed by drive and
/// dissipation on every site.
#[derive(Debug, Clone)]
pub struct FullCirculation {
    pub basis: Arc<FockBasis>,
    pub params: DriveDissParams,
    gates: Vec<Gate>,
    sites: Vec<SiteChannel>,
}

impl FullCirculation {
    pub fn new(model: &LatticeModel, basis: Arc<FockBasis>, params: DriveDissParams, ancilla_cut: usize) -> Result<Self> {
        let gates = compile_step(model, &basis, params.delta_t)?;
        let family: Vec<KrausFamily> = (1..=basis.max_photons() + 1).map(|d| drive_kraus(d, &params, ancilla_cut)).collect::<Result<_>>()?;
        let sites = (0..model.n_sites)
            .map(|s| SiteChannel::from_kraus(&basis, s, |d| Ok(family[d - 1].clone())))
            .collect::<Result<_>>()?;
        Ok(Self { basis, params, gates, sites })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn apply(&self, rho: &Array2<C64>) -> Array2<C64> {
        let mut m = rho.to_owned();
        conjugate_sequence(&self.gates, &mut m);
        for s in &self.sites {
            m = s.apply(&m);
        }
        m
    }

    pub fn apply_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.basis.clone(), self.apply(&rho.matrix))
    }
}

pub fn full_circulation_channel(
    rho: &DensityMatrix,
    model: &LatticeModel,
    params: &DriveDissParams,
    ancilla_cut: usize,
) -> Result<DensityMatrix> {
    FullCirculation::new(model, rho.basis.clone(), *params, ancilla_cut)?.apply_density(rho)
}
