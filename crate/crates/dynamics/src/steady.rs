//! Fixed points of trace-preserving channels and the observables reported
//! for them.

use std::sync::Arc;

use ndarray::{s, Array1, Array2};
use num_complex::Complex64 as C64;

use photonsim_core::lattice::LatticeModel;
use photonsim_core::spectral::{sector_spectrum, GroundSpace};
use photonsim_core::fock::trace_norm_hermitian;
use photonsim_core::{DensityMatrix, Error, FockBasis, Result};

use crate::channel::{FullCirculation, SiteChannel};
use crate::krylov::gmres;

/// A linear map on operators of a fixed dimension.
pub trait Channel {
    fn dim(&self) -> usize;
    fn apply(&self, rho: &Array2<C64>) -> Array2<C64>;
}

impl Channel for FullCirculation {
    fn dim(&self) -> usize {
        FullCirculation::dim(self)
    }
    fn apply(&self, rho: &Array2<C64>) -> Array2<C64> {
        FullCirculation::apply(self, rho)
    }
}

impl Channel for SiteChannel {
    fn dim(&self) -> usize {
        SiteChannel::dim(self)
    }
    fn apply(&self, rho: &Array2<C64>) -> Array2<C64> {
        SiteChannel::apply(self, rho)
    }
}

/// Wraps a closure as a channel.
pub struct FnChannel<F> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(&Array2<C64>) -> Array2<C64>> Channel for FnChannel<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, rho: &Array2<C64>) -> Array2<C64> {
        (self.f)(rho)
    }
}

#[derive(Debug, Clone)]
pub struct FixedPoint {
    pub rho: DensityMatrix,
    pub iterations: usize,
    /// Trace-norm distance between the last two iterates (power iteration)
    /// or ‖ε[ρ] − ρ‖₁ of the returned state (Krylov).
    pub residual: f64,
    pub converged: bool,
}

fn frobenius(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn hermitize(m: &mut Array2<C64>) {
    let h = (&*m + &m.t().mapv(|z| z.conj())) * C64::new(0.5, 0.0);
    *m = h;
}

/// Trace-norm distance, skipping the eigendecomposition whenever the
/// Frobenius norm already decides the comparison with `tol`
/// (‖X‖_F ≤ ‖X‖₁ ≤ √d ‖X‖_F).
fn distance_below(diff: &Array2<C64>, tol: f64) -> Result<(f64, bool)> {
    let f = frobenius(diff);
    if f >= tol {
        return Ok((f, false));
    }
    if f * (diff.nrows() as f64).sqrt() < tol {
        return Ok((f * (diff.nrows() as f64).sqrt(), true));
    }
    let mut h = diff.clone();
    hermitize(&mut h);
    let t = trace_norm_hermitian(&h)?;
    Ok((t, t < tol))
}

/// Power iteration ρ ← ε[ρ] until successive iterates are closer than `tol`
/// in trace norm. On failure the last iterate is returned with
/// `converged = false`; the reported residual is then the Frobenius lower
/// bound unless the trace norm was computed.
pub fn fixed_point<C: Channel>(channel: &C, initial: &DensityMatrix, tol: f64, max_iter: usize) -> Result<FixedPoint> {
    if initial.dim() != channel.dim() {
        return Err(Error::DimensionMismatch { expected: channel.dim(), got: initial.dim() });
    }
    let mut rho = initial.matrix.clone();
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let next = channel.apply(&rho);
        let (d, done) = distance_below(&(&next - &rho), tol)?;
        residual = d;
        rho = next;
        if done {
            return Ok(FixedPoint { rho: DensityMatrix::new(initial.basis.clone(), rho)?, iterations: it, residual, converged: true });
        }
    }
    Ok(FixedPoint { rho: DensityMatrix::new(initial.basis.clone(), rho)?, iterations: max_iter, residual, converged: false })
}

/// Approximate inverse of (1 − ε) built from the eigenbasis of the
/// Hamiltonian step: in that basis ε acts on |a⟩⟨b| roughly as multiplication
/// by e^{i(θ_a − θ_b)}(1 − κ_ab), where θ includes the drive phase Φ·N and
/// κ is the loss per step.
#[derive(Debug, Clone)]
pub struct EigenPreconditioner {
    /// Per sector: basis offset, eigenvectors (columns), phases θ.
    blocks: Vec<(usize, Array2<C64>, Array1<f64>)>,
    sector_of: Vec<usize>,
    photons: Vec<usize>,
    loss: f64,
}

impl EigenPreconditioner {
    pub fn new(model: &LatticeModel, basis: &FockBasis, delta_t: f64, drive_phase: f64, k_dt: f64) -> Result<Self> {
        let mut blocks = Vec::new();
        let mut sector_of = Vec::new();
        let mut photons = Vec::new();
        for (si, &k) in basis.sectors().iter().enumerate() {
            let range = basis.sector_range(k).expect("listed sector");
            let (_, spec) = sector_spectrum(model, delta_t, k)?;
            let theta = Array1::from_iter(spec.eigenphases.iter().map(|u| u.arg() + drive_phase * k as f64));
            let mut v = spec.eigenvectors.clone();
            for mut c in v.columns_mut() {
                let n = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                c.mapv_inplace(|z| z / n);
            }
            blocks.push((range.start, v, theta));
            sector_of.extend(std::iter::repeat(si).take(range.len()));
            photons.push(k);
        }
        Ok(Self { blocks, sector_of, photons, loss: 0.5 * k_dt * k_dt })
    }

    pub fn dim(&self) -> usize {
        self.sector_of.len()
    }

    /// X ↦ V[(V†XV) ⊘ (1 − Λ)]V†
    pub fn apply_inverse(&self, x: &Array2<C64>) -> Array2<C64> {
        let mut out = Array2::zeros(x.raw_dim());
        let floor = self.loss.max(1e-8);
        for (a, (oa, va, ta)) in self.blocks.iter().enumerate() {
            let ra = *oa..*oa + va.nrows();
            for (b, (ob, vb, tb)) in self.blocks.iter().enumerate() {
                let rb = *ob..*ob + vb.nrows();
                let xb = x.slice(s![ra.clone(), rb.clone()]);
                let mut y = va.t().mapv(|z| z.conj()).dot(&xb).dot(vb);
                let kappa = (self.loss * (self.photons[a] + self.photons[b]) as f64).max(floor);
                for ((i, j), z) in y.indexed_iter_mut() {
                    let lam = C64::from_polar(1.0 - kappa, ta[i] - tb[j]);
                    *z /= C64::new(1.0, 0.0) - lam;
                }
                let back = va.dot(&y).dot(&vb.t().mapv(|z| z.conj()));
                out.slice_mut(s![ra.clone(), rb]).assign(&back);
            }
        }
        out
    }
}

fn flatten(m: &Array2<C64>) -> Vec<C64> {
    m.iter().copied().collect()
}

fn unflatten(v: &[C64], d: usize) -> Array2<C64> {
    Array2::from_shape_vec((d, d), v.to_vec()).expect("square")
}

/// Settings for the preconditioned Krylov solve of ε[ρ] = ρ.
#[derive(Debug, Clone, Copy)]
pub struct KrylovSettings {
    pub tol: f64,
    pub restart: usize,
    pub max_matvecs: usize,
}

impl Default for KrylovSettings {
    fn default() -> Self {
        Self { tol: 1e-9, restart: 40, max_matvecs: 400 }
    }
}

/// Solves (1 − ε)P⁻¹y = ε[ρ₀] − ρ₀ with GMRES and returns ρ₀ + P⁻¹y,
/// hermitized and trace-normalized. The reported residual is ‖ε[ρ] − ρ‖₁.
pub fn fixed_point_krylov<C: Channel>(
    channel: &C,
    precond: &EigenPreconditioner,
    initial: &DensityMatrix,
    settings: KrylovSettings,
) -> Result<FixedPoint> {
    let d = channel.dim();
    if initial.dim() != d || precond.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: initial.dim().max(precond.dim()) });
    }
    let x0 = initial.matrix.clone();
    let e0 = channel.apply(&x0);
    let rhs = flatten(&(&e0 - &x0));
    let out = gmres(
        |v| {
            let z = precond.apply_inverse(&unflatten(v, d));
            let ez = channel.apply(&z);
            flatten(&(&z - &ez))
        },
        &rhs,
        settings.restart,
        settings.tol * 1e-2,
        settings.max_matvecs,
    );
    let mut x = &x0 + &precond.apply_inverse(&unflatten(&out.x, d));
    hermitize(&mut x);
    let tr: C64 = x.diag().sum();
    x.mapv_inplace(|z| z / tr);
    let ex = channel.apply(&x);
    let mut diff = &ex - &x;
    hermitize(&mut diff);
    let residual = trace_norm_hermitian(&diff)?;
    Ok(FixedPoint {
        rho: DensityMatrix::new(initial.basis.clone(), x)?,
        iterations: out.matvecs + 2,
        residual,
        converged: residual < 2.0 * settings.tol,
    })
}

/// Steady-state summary.
#[derive(Debug, Clone)]
pub struct SteadyStateReport {
    pub rho_fix: DensityMatrix,
    pub n_photon: f64,
    pub n_squared: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    /// P2/P1, missing when P1 vanishes.
    pub ratio: Option<f64>,
    /// Ground-space weight of Π₂ρΠ₂/Tr, missing when P2 < 1e−14.
    pub postselected_overlap: Option<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Ground-doublet weight of the normalized two-photon block of `rho`.
pub fn postselected_overlap(rho: &DensityMatrix, ground: &GroundSpace) -> Result<Option<f64>> {
    let Some(block) = rho.sector_block(2) else {
        return Err(Error::InvalidArgument("density matrix has no two-photon sector".into()));
    };
    if block.nrows() != ground.states.nrows() {
        return Err(Error::DimensionMismatch { expected: ground.states.nrows(), got: block.nrows() });
    }
    let p2: f64 = block.diag().iter().map(|z| z.re).sum();
    if p2 < 1e-14 {
        return Ok(None);
    }
    let q = &ground.states;
    let proj = q.t().mapv(|z| z.conj()).dot(&block).dot(q);
    Ok(Some(proj.diag().iter().map(|z| z.re).sum::<f64>() / p2))
}

pub fn steady_state_observables(fp: FixedPoint, ground: Option<&GroundSpace>) -> Result<SteadyStateReport> {
    let rho = fp.rho;
    let (n_photon, n_squared) = rho.number_moments();
    let pop = |k| if rho.basis.contains_sector(k) { rho.sector_population(k) } else { 0.0 };
    let (p1, p2, p3) = (pop(1), pop(2), pop(3));
    let ratio = (p1 > 1e-300).then(|| p2 / p1);
    let postselected_overlap = match ground {
        Some(g) => postselected_overlap(&rho, g)?,
        None => None,
    };
    Ok(SteadyStateReport {
        rho_fix: rho,
        n_photon,
        n_squared,
        p1,
        p2,
        p3,
        ratio,
        postselected_overlap,
        iterations: fp.iterations,
        residual: fp.residual,
        converged: fp.converged,
    })
}

/// Which fixed-point solver a scan uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointMethod {
    Power,
    Krylov,
}

/// One steady-state point of the driven lattice starting from vacuum.
pub fn driven_steady_state(
    model: &LatticeModel,
    basis: &Arc<FockBasis>,
    params: crate::params::DriveDissParams,
    ancilla_cut: usize,
    ground: Option<&GroundSpace>,
    method: FixedPointMethod,
    tol: f64,
    max_iter: usize,
) -> Result<SteadyStateReport> {
    let channel = FullCirculation::new(model, basis.clone(), params, ancilla_cut)?;
    let vacuum = DensityMatrix::vacuum(basis)?;
    let fp = match method {
        FixedPointMethod::Power => fixed_point(&channel, &vacuum, tol, max_iter)?,
        FixedPointMethod::Krylov => {
            let pre = EigenPreconditioner::new(model, basis, params.delta_t, params.phase(), params.k_dt())?;
            fixed_point_krylov(&channel, &pre, &vacuum, KrylovSettings { tol, max_matvecs: max_iter, ..Default::default() })?
        }
    };
    steady_state_observables(fp, ground)
}
