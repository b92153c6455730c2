//! Sector spectra of the Trotter step, the two-photon ground doublet, and the
//! analytic torus Laughlin states it is compared against.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayView1, Axis};
use ndarray_linalg::Eig;
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::fock::{FockBasis, StateVector};
use crate::gates::sequence_unitary;
use crate::lattice::{compile_step, Boundary, Geometry, LatticeModel};
use crate::theta::jacobi_theta;

/// Eigenphases closer than this to ±π are reported as possibly aliased.
pub const BRANCH_CUT_TOL: f64 = 1e-6;
/// Default absolute tolerance when counting distinct energies.
pub const CLUSTER_TOL: f64 = 1e-6;

/// Dense step unitary restricted to the `sector`-photon subspace.
pub fn step_unitary(model: &LatticeModel, delta_t: f64, sector: usize) -> Result<(Arc<FockBasis>, Array2<C64>)> {
    let basis = Arc::new(FockBasis::new(model.n_sites, &[sector])?);
    let gates = compile_step(model, &basis, delta_t)?;
    let u = sequence_unitary(&gates, basis.dim());
    Ok((basis, u))
}

#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub sector: usize,
    pub delta_t: f64,
    /// Sorted by ascending energy.
    pub eigenphases: Vec<C64>,
    pub energies: Vec<f64>,
    /// Orthonormal eigenvectors as columns, same order as `energies`.
    pub eigenvectors: Array2<C64>,
    /// Indices whose eigenphase sits within `BRANCH_CUT_TOL` of the branch cut.
    pub aliased: Vec<usize>,
}

impl SpectralResult {
    pub fn distinct_energies(&self, tol: f64) -> Vec<f64> {
        cluster_values(&self.energies, tol)
    }

    pub fn eigenvector(&self, k: usize) -> ArrayView1<'_, C64> {
        self.eigenvectors.column(k)
    }
}

/// Representatives of runs of sorted values whose neighbours differ by at
/// most `tol`.
pub fn cluster_values(sorted: &[f64], tol: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for &v in sorted {
        if v - last > tol {
            out.push(v);
        }
        last = v;
    }
    out
}

/// Energies ε = −arg(u)/δt of a unitary, so that `exp(−iHδt)` returns the
/// eigenvalues of `H`.
pub fn effective_energies(u: &Array2<C64>, delta_t: f64, sector: usize) -> Result<SpectralResult> {
    if delta_t <= 0.0 {
        return invalid("effective energies need delta_t > 0");
    }
    if u.nrows() != u.ncols() {
        return Err(Error::DimensionMismatch { expected: u.nrows(), got: u.ncols() });
    }
    let (w, v) = u.eig().map_err(|e| Error::Linalg(e.to_string()))?;
    let phases: Vec<f64> = w.iter().map(|z| z.arg()).collect();
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| (-phases[a]).total_cmp(&-phases[b]));
    let energies: Vec<f64> = order.iter().map(|&k| -phases[k] / delta_t).collect();
    let eigenphases: Vec<C64> = order.iter().map(|&k| w[k] / w[k].norm()).collect();
    let aliased = order
        .iter()
        .enumerate()
        .filter(|(_, &k)| PI - phases[k].abs() < BRANCH_CUT_TOL)
        .map(|(pos, _)| pos)
        .collect();
    let mut vecs = v.select(Axis(1), &order);
    // degenerate clusters come back as an arbitrary, possibly skewed basis
    let mut start = 0;
    while start < energies.len() {
        let mut end = start + 1;
        while end < energies.len() && energies[end] - energies[end - 1] <= CLUSTER_TOL {
            end += 1;
        }
        orthonormalize_columns(&mut vecs, start, end);
        start = end;
    }
    Ok(SpectralResult { sector, delta_t, eigenphases, energies, eigenvectors: vecs, aliased })
}

/// Spectrum of the step unitary in one sector.
pub fn sector_spectrum(model: &LatticeModel, delta_t: f64, sector: usize) -> Result<(Arc<FockBasis>, SpectralResult)> {
    let (basis, u) = step_unitary(model, delta_t, sector)?;
    let spec = effective_energies(&u, delta_t, sector)?;
    Ok((basis, spec))
}

fn orthonormalize_columns(m: &mut Array2<C64>, start: usize, end: usize) {
    for k in start..end {
        for _ in 0..2 {
            for p in start..k {
                let (prev, mut cur) = m.multi_slice_mut((ndarray::s![.., p], ndarray::s![.., k]));
                let c: C64 = prev.iter().zip(cur.iter()).map(|(a, b)| a.conj() * b).sum();
                cur.scaled_add(-c, &prev);
            }
        }
        let n = m.column(k).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        m.column_mut(k).mapv_inplace(|z| z / n);
    }
}

/// Lowest two-photon doublet and its separation from the rest.
#[derive(Debug, Clone)]
pub struct GroundSpace {
    pub basis: Arc<FockBasis>,
    /// Two orthonormal columns.
    pub states: Array2<C64>,
    pub energies: [f64; 3],
    /// ε₃ − ε₂
    pub gap: f64,
    /// ε₂ − ε₁
    pub degeneracy_split: f64,
}

impl GroundSpace {
    pub fn from_spectrum(basis: Arc<FockBasis>, spec: &SpectralResult) -> Result<Self> {
        if spec.energies.len() < 3 {
            return invalid("ground doublet needs at least three levels");
        }
        let e = [spec.energies[0], spec.energies[1], spec.energies[2]];
        let states = spec.eigenvectors.slice(ndarray::s![.., 0..2]).to_owned();
        Ok(Self { basis, states, energies: e, gap: e[2] - e[1], degeneracy_split: e[1] - e[0] })
    }

    pub fn mean_energy(&self) -> f64 {
        0.5 * (self.energies[0] + self.energies[1])
    }

    /// ⟨ψ|P|ψ⟩ with P the projector onto the doublet.
    pub fn projection(&self, psi: ArrayView1<C64>) -> f64 {
        span_overlap(psi, &self.states)
    }
}

/// ‖Q†ψ‖² for orthonormal columns Q.
pub fn span_overlap(psi: ArrayView1<C64>, q: &Array2<C64>) -> f64 {
    q.columns().into_iter().map(|c| c.iter().zip(psi.iter()).map(|(a, b)| a.conj() * b).sum::<C64>().norm_sqr()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapResult {
    pub alpha: C64,
    pub beta: C64,
    pub value: f64,
}

fn dot(a: ArrayView1<C64>, b: ArrayView1<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Maximizes |⟨ψ_ana| α ψ₂ + β ψ₁⟩|² over |α|² + |β|² = 1.
pub fn overlap_optimize(psi_ana: ArrayView1<C64>, act1: ArrayView1<C64>, act2: ArrayView1<C64>) -> Result<OverlapResult> {
    let tol = 1e-8;
    for (name, v) in [("psi_ana", psi_ana), ("act1", act1), ("act2", act2)] {
        if (dot(v, v).re - 1.0).abs() > tol {
            return invalid(format!("{name} is not normalized"));
        }
    }
    if dot(act1, act2).norm() > tol {
        return invalid("act pair is not orthogonal");
    }
    let c1 = dot(psi_ana, act1);
    let c2 = dot(psi_ana, act2);
    let value = c1.norm_sqr() + c2.norm_sqr();
    let n = value.sqrt();
    let (alpha, beta) = if n > 0.0 { (c2.conj() / n, c1.conj() / n) } else { (C64::new(1.0, 0.0), C64::default()) };
    Ok(OverlapResult { alpha, beta, value })
}

/// Theta characteristics of the centre-of-mass factor: the `l`-th state uses
/// ϑ[l/2 + a_offset, b].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmCharacteristics {
    pub a_offset: f64,
    pub b: f64,
}

impl CmCharacteristics {
    /// Haldane–Rezayi choice for total flux `n_phi`: a = l/2 + (N_φ−2)/4,
    /// b = (N_φ−2)/2.
    pub fn haldane_rezayi(n_phi: f64) -> Self {
        Self { a_offset: (n_phi - 2.0) / 4.0, b: (n_phi - 2.0) / 2.0 }
    }
}

/// Two-photon ν = 1/2 Laughlin state on the lattice torus, in the gauge of
/// `build_fqh`.
pub fn analytic_ground_state(model: &LatticeModel, l: usize, cm: CmCharacteristics) -> Result<StateVector> {
    let Geometry::Square { nx, ny } = model.geometry else {
        return invalid("analytic ground state needs a square lattice");
    };
    if model.boundary != Boundary::Periodic {
        return invalid("analytic ground state needs periodic boundaries");
    }
    let n_phi = model.flux * (nx * ny) as f64;
    if (n_phi - 4.0).abs() > 1e-9 {
        return invalid(format!("two-photon Laughlin state needs total flux 4, got {n_phi}"));
    }
    if l != 1 && l != 2 {
        return invalid("l must be 1 or 2");
    }
    let basis = Arc::new(FockBasis::new(model.n_sites, &[2])?);
    let (lx, ly) = (nx as f64, ny as f64);
    let tau_rel = C64::new(0.0, ly / lx);
    let tau_cm = C64::new(0.0, 2.0 * ly / lx);
    let a = l as f64 / 2.0 + cm.a_offset;
    let alpha = model.flux;
    let z_of = |site: usize| {
        let (x, y) = model.coords(site);
        C64::new(x as f64, y as f64)
    };
    let mut amps = Array1::zeros(basis.dim());
    for (k, s) in basis.states().iter().enumerate() {
        let sites: Vec<usize> = s.iter().enumerate().flat_map(|(i, &n)| std::iter::repeat(i).take(n as usize)).collect();
        let (z1, z2) = (z_of(sites[0]), z_of(sites[1]));
        let rel = jacobi_theta(0.5, 0.5, (z1 - z2) / lx, tau_rel)?;
        let fcm = jacobi_theta(a, cm.b, 2.0 * (z1 + z2) / lx, tau_cm)?;
        let gauss = (-PI * alpha * (z1.im * z1.im + z2.im * z2.im)).exp();
        let gauge = C64::from_polar(1.0, 2.0 * PI * alpha * (z1.re * z1.im + z2.re * z2.im));
        amps[k] = fcm * rel * rel * gauss * gauge;
    }
    let psi = StateVector::new(basis, amps)?;
    if psi.norm() < 1e-300 {
        return invalid("analytic state vanishes identically for these characteristics");
    }
    Ok(psi.normalized())
}

/// Both analytic states, Gram–Schmidt orthonormalized, as columns.
pub fn analytic_ground_space(model: &LatticeModel, cm: CmCharacteristics) -> Result<(Arc<FockBasis>, Array2<C64>)> {
    let p1 = analytic_ground_state(model, 1, cm)?;
    let p2 = analytic_ground_state(model, 2, cm)?;
    let basis = p1.basis.clone();
    let mut m = Array2::zeros((basis.dim(), 2));
    m.column_mut(0).assign(&p1.amplitudes);
    m.column_mut(1).assign(&p2.amplitudes);
    orthonormalize_columns(&mut m, 0, 2);
    Ok((basis, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_bose_hubbard, build_fqh, exact_hamiltonian};
    use crate::linalg::eigh;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fqh(u: f64) -> LatticeModel {
        build_fqh(4, 4, 1.0, u, 0.25, Boundary::Periodic).unwrap()
    }

    #[test]
    fn zero_step_is_identity() {
        let (b, u) = step_unitary(&fqh(10.0), 0.0, 2).unwrap();
        assert_eq!(b.dim(), 136);
        for ((r, c), v) in u.indexed_iter() {
            let e = if r == c { 1.0 } else { 0.0 };
            assert!((v - e).norm() < 1e-14);
        }
        let spec = effective_energies(&Array2::eye(5).mapv(|x: f64| C64::new(x, 0.0)), 0.25, 0).unwrap();
        assert!(spec.energies.iter().all(|e| e.abs() < 1e-15));
        assert!(effective_energies(&u, 0.0, 2).is_err());
    }

    #[test]
    fn exponential_of_hamiltonian_gives_its_spectrum() {
        let m = build_bose_hubbard(5, 1.0, 3.0, Boundary::Periodic).unwrap();
        let b = Arc::new(FockBasis::new(5, &[2]).unwrap());
        let h = exact_hamiltonian(&m, &b).unwrap().to_dense();
        let (w, v) = eigh(&h).unwrap();
        let dt = 0.3;
        let phase = Array2::from_diag(&w.mapv(|e| C64::from_polar(1.0, -e * dt)));
        let u = v.dot(&phase).dot(&v.t().mapv(|z| z.conj()));
        let spec = effective_energies(&u, dt, 2).unwrap();
        for (a, b) in spec.energies.iter().zip(w.iter()) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        assert!(spec.aliased.is_empty());
        let g = spec.eigenvectors.t().mapv(|z| z.conj()).dot(&spec.eigenvectors);
        for ((r, c), z) in g.indexed_iter() {
            assert!((z - if r == c { 1.0 } else { 0.0 }).norm() < 1e-9);
        }
    }

    #[test]
    fn branch_cut_is_flagged() {
        let u = Array2::from_diag(&ndarray::arr1(&[C64::new(-1.0, 0.0), C64::new(1.0, 0.0)]));
        let spec = effective_energies(&u, 1.0, 0).unwrap();
        assert_eq!(spec.aliased, vec![0]);
    }

    #[test]
    fn free_sector_two_is_pairwise_sums() {
        let m = fqh(0.0);
        let (_, s1) = sector_spectrum(&m, 0.25, 1).unwrap();
        let (_, s2) = sector_spectrum(&m, 0.25, 2).unwrap();
        let mut sums = Vec::new();
        for a in 0..s1.energies.len() {
            for b in a..s1.energies.len() {
                sums.push(s1.energies[a] + s1.energies[b]);
            }
        }
        sums.sort_by(f64::total_cmp);
        for (x, y) in sums.iter().zip(&s2.energies) {
            assert!((x - y).abs() < 1e-8);
        }
        assert_eq!(s2.distinct_energies(CLUSTER_TOL).len(), 5);
    }

    #[test]
    fn interacting_doublet() {
        let m = fqh(10.0);
        let (b, s2) = sector_spectrum(&m, 0.25, 2).unwrap();
        let gs = GroundSpace::from_spectrum(b, &s2).unwrap();
        assert!((gs.gap - 0.28).abs() < 0.02, "gap {}", gs.gap);
        assert!(gs.degeneracy_split < 0.1 * gs.gap);
    }

    #[test]
    fn gauge_invariant_spectrum() {
        let m = fqh(10.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let thetas: Vec<f64> = (0..16).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        let g = m.gauge_transformed(&thetas);
        let b = Arc::new(FockBasis::new(16, &[2]).unwrap());
        let e1 = eigh(&exact_hamiltonian(&m, &b).unwrap().to_dense()).unwrap().0;
        let e2 = eigh(&exact_hamiltonian(&g, &b).unwrap().to_dense()).unwrap().0;
        for (a, c) in e1.iter().zip(e2.iter()) {
            assert!((a - c).abs() < 1e-9);
        }
    }

    #[test]
    fn overlap_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rand_vec = |n: usize| {
            let v = Array1::from_shape_fn(n, |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v / C64::new(nrm, 0.0)
        };
        let mut q = Array2::zeros((6, 3));
        for k in 0..3 {
            q.column_mut(k).assign(&rand_vec(6));
        }
        orthonormalize_columns(&mut q, 0, 3);
        let (a1, a2, o) = (q.column(0), q.column(1), q.column(2));

        let r = overlap_optimize(a1, a1, a2).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(r.alpha.norm() < 1e-12 && (r.beta.norm() - 1.0).abs() < 1e-12);
        assert!(overlap_optimize(o, a1, a2).unwrap().value < 1e-24);

        let psi = rand_vec(6);
        let best = overlap_optimize(psi.view(), a1, a2).unwrap();
        let objective = |al: C64, be: C64| dot(psi.view(), (&a2.mapv(|z| z * al) + &a1.mapv(|z| z * be)).view()).norm_sqr();
        assert!((objective(best.alpha, best.beta) - best.value).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let (x, y) = (C64::new(rng.gen(), rng.gen()), C64::new(rng.gen(), rng.gen()));
            let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
            assert!(objective(x / n, y / n) <= best.value + 1e-12);
        }
        assert!(overlap_optimize(psi.view(), a1, a1).is_err());
    }

    #[test]
    fn analytic_state_properties() {
        let m = fqh(10.0);
        let cm = CmCharacteristics::haldane_rezayi(4.0);
        let p1 = analytic_ground_state(&m, 1, cm).unwrap();
        let p2 = analytic_ground_state(&m, 2, cm).unwrap();
        assert!((p1.norm() - 1.0).abs() < 1e-12);
        let b = p1.basis.clone();
        for (k, s) in b.states().iter().enumerate() {
            if s.iter().any(|&n| n == 2) {
                assert!(p1.amplitudes[k].norm() < 1e-12);
            }
        }
        assert!(p1.inner(&p2).unwrap().norm() < 0.99);
        assert!(analytic_ground_state(&build_fqh(4, 4, 1.0, 0.0, 0.25, Boundary::Open).unwrap(), 1, cm).is_err());
    }

    #[test]
    fn analytic_overlap_with_doublet() {
        let m = fqh(10.0);
        let (b, s2) = sector_spectrum(&m, 0.25, 2).unwrap();
        let gs = GroundSpace::from_spectrum(b, &s2).unwrap();
        let psi = analytic_ground_state(&m, 1, CmCharacteristics::haldane_rezayi(4.0)).unwrap();
        let r = overlap_optimize(psi.amplitudes.view(), gs.states.column(0), gs.states.column(1)).unwrap();
        assert!(r.value >= 0.90, "overlap {}", r.value);
        assert!((r.value - gs.projection(psi.amplitudes.view())).abs() < 1e-12);
    }
}
