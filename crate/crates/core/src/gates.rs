//! Trotter-step gates: two-mode beamsplitters and photon-number phase gates.
//!
//! Beamsplitter convention: generator `θ(e^{iφ} b_i b_j† + e^{−iφ} b_j b_i†)`,
//! gate `exp(−i·generator)`. With θ = π/2, φ = 0 a photon in mode `i` ends up
//! in mode `j` with amplitude `−i`.

use std::sync::Arc;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::fock::{same_basis, DensityMatrix, FockBasis, SectorOperator, StateVector};
use crate::linalg::hermitian_function;
use crate::sparse::CsrMatrix;

/// Abstract gate of a Trotter step.
#[derive(Debug, Clone, PartialEq)]
pub enum GateDescriptor {
    BeamSplitter { i: usize, j: usize, theta: f64, phi: f64 },
    NumberPhase { mode: usize, table: Vec<f64> },
    LinearPhase { mode: usize, phi: f64 },
}

impl GateDescriptor {
    pub fn modes(&self) -> Vec<usize> {
        match self {
            Self::BeamSplitter { i, j, .. } => vec![*i, *j],
            Self::NumberPhase { mode, .. } | Self::LinearPhase { mode, .. } => vec![*mode],
        }
    }

    pub fn validate(&self, n_modes: usize) -> Result<()> {
        for m in self.modes() {
            if m >= n_modes {
                return Err(Error::ModeOutOfRange { mode: m, n_modes });
            }
        }
        match self {
            Self::BeamSplitter { i, j, .. } if i == j => invalid("beamsplitter modes must differ"),
            Self::NumberPhase { table, .. } => check_table(table),
            _ => Ok(()),
        }
    }

    /// Builds the fast-path gate on `basis`.
    pub fn compile(&self, basis: &Arc<FockBasis>) -> Result<Gate> {
        self.validate(basis.n_modes())?;
        Ok(match self {
            Self::BeamSplitter { i, j, theta, phi } => {
                Gate::TwoMode(TwoModeGate::beamsplitter(basis, *i, *j, *theta, *phi)?)
            }
            Self::NumberPhase { mode, table } => Gate::Diagonal(DiagonalGate::number_phase(basis, *mode, table)?),
            Self::LinearPhase { mode, phi } => Gate::Diagonal(DiagonalGate::linear_phase(basis, *mode, *phi)?),
        })
    }
}

fn check_table(table: &[f64]) -> Result<()> {
    match table.first() {
        None => invalid("phase table must not be empty"),
        Some(&p0) if p0 != 0.0 => invalid("phase table must start with phi(0) = 0"),
        _ => Ok(()),
    }
}

/// φ(n) with linear extrapolation by the last increment beyond the table.
pub fn table_phase(table: &[f64], n: usize) -> f64 {
    let last = table.len() - 1;
    if n <= last {
        return table[n];
    }
    let slope = if last == 0 { 0.0 } else { table[last] - table[last - 1] };
    table[last] + (n - last) as f64 * slope
}

/// Unitary acting on a pair of modes. Each orbit holds the basis indices
/// sharing all other occupations and the pair total `s`, ordered by `n_i`.
#[derive(Debug, Clone)]
pub struct TwoModeGate {
    pub i: usize,
    pub j: usize,
    orbits: Vec<(usize, Vec<usize>)>,
    blocks: Vec<Array2<C64>>,
}

impl TwoModeGate {
    /// Local generator on the orbit with `s` photons shared by the pair.
    fn generator_block(s: usize, theta: f64, phi: f64) -> Array2<C64> {
        let mut g = Array2::zeros((s + 1, s + 1));
        let e = C64::from_polar(theta, phi);
        for m in 1..=s {
            // b_i b_j† |m, s−m⟩ = √m √(s−m+1) |m−1, s−m+1⟩
            let amp = ((m * (s - m + 1)) as f64).sqrt();
            g[(m - 1, m)] = e * amp;
            g[(m, m - 1)] = e.conj() * amp;
        }
        g
    }

    fn exp_minus_i(g: &Array2<C64>) -> Result<Array2<C64>> {
        hermitian_function(g, |w| C64::from_polar(1.0, -w))
    }

    fn orbits(basis: &FockBasis, i: usize, j: usize) -> Vec<(usize, Vec<usize>)> {
        let mut out = Vec::new();
        for s in basis.states() {
            if s[i] != 0 {
                continue;
            }
            let total = s[j] as usize;
            let mut idx = Vec::with_capacity(total + 1);
            let mut occ = s.clone();
            for m in 0..=total {
                occ[i] = m as u8;
                occ[j] = (total - m) as u8;
                idx.push(basis.index_of(&occ).expect("sector bases contain whole pair orbits"));
            }
            out.push((total, idx));
        }
        out
    }

    pub fn beamsplitter(basis: &FockBasis, i: usize, j: usize, theta: f64, phi: f64) -> Result<Self> {
        for m in [i, j] {
            if m >= basis.n_modes() {
                return Err(Error::ModeOutOfRange { mode: m, n_modes: basis.n_modes() });
            }
        }
        if i == j {
            return invalid("beamsplitter modes must differ");
        }
        let smax = basis.max_photons();
        let blocks = (0..=smax)
            .map(|s| Self::exp_minus_i(&Self::generator_block(s, theta, phi)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { i, j, orbits: Self::orbits(basis, i, j), blocks })
    }

    /// Gate from explicit per-`s` local unitaries (`blocks[s]` is (s+1)×(s+1)).
    pub fn from_blocks(basis: &FockBasis, i: usize, j: usize, blocks: Vec<Array2<C64>>) -> Result<Self> {
        if i == j || i >= basis.n_modes() || j >= basis.n_modes() {
            return invalid("bad mode pair");
        }
        if blocks.len() <= basis.max_photons() {
            return invalid("missing local blocks");
        }
        Ok(Self { i, j, orbits: Self::orbits(basis, i, j), blocks })
    }

    pub fn to_triplets(&self) -> Vec<(usize, usize, C64)> {
        let mut t = Vec::new();
        for (s, idx) in &self.orbits {
            let b = &self.blocks[*s];
            for (a, &ra) in idx.iter().enumerate() {
                for (c, &rc) in idx.iter().enumerate() {
                    let v = b[(a, c)];
                    if v != C64::default() {
                        t.push((ra, rc, v));
                    }
                }
            }
        }
        t
    }

    fn apply_vec(&self, x: &mut [C64]) {
        let mut buf = [C64::default(); 16];
        for (s, idx) in &self.orbits {
            let b = &self.blocks[*s];
            let n = idx.len();
            if n == 1 {
                x[idx[0]] *= b[(0, 0)];
                continue;
            }
            let mut tmp: Vec<C64>;
            let out: &mut [C64] = if n <= 16 {
                &mut buf[..n]
            } else {
                tmp = vec![C64::default(); n];
                &mut tmp
            };
            for a in 0..n {
                out[a] = (0..n).map(|c| b[(a, c)] * x[idx[c]]).sum();
            }
            for a in 0..n {
                x[idx[a]] = out[a];
            }
        }
    }

    /// m ← U m.
    fn apply_left(&self, m: &mut Array2<C64>) {
        let ncols = m.ncols();
        let mut scratch = Array2::<C64>::zeros((0, ncols));
        for (s, idx) in &self.orbits {
            let b = &self.blocks[*s];
            let n = idx.len();
            if n == 1 {
                let f = b[(0, 0)];
                m.row_mut(idx[0]).mapv_inplace(|v| v * f);
                continue;
            }
            if scratch.nrows() < n {
                scratch = Array2::zeros((n, ncols));
            }
            for a in 0..n {
                let mut row = scratch.row_mut(a);
                row.fill(C64::default());
                for c in 0..n {
                    let f = b[(a, c)];
                    if f != C64::default() {
                        row.scaled_add(f, &m.row(idx[c]));
                    }
                }
            }
            for a in 0..n {
                m.row_mut(idx[a]).assign(&scratch.row(a));
            }
        }
    }

    /// m ← m U†.
    fn apply_right_adjoint(&self, m: &mut Array2<C64>) {
        let mut buf = vec![C64::default(); self.blocks.len()];
        for mut row in m.rows_mut() {
            let r = row.as_slice_mut().expect("standard layout");
            for (s, idx) in &self.orbits {
                let b = &self.blocks[*s];
                let n = idx.len();
                if n == 1 {
                    r[idx[0]] *= b[(0, 0)].conj();
                    continue;
                }
                for a in 0..n {
                    buf[a] = (0..n).map(|c| r[idx[c]] * b[(a, c)].conj()).sum();
                }
                for a in 0..n {
                    r[idx[a]] = buf[a];
                }
            }
        }
    }
}

/// Diagonal unitary given by one phase factor per basis index.
#[derive(Debug, Clone)]
pub struct DiagonalGate {
    pub factors: Vec<C64>,
}

impl DiagonalGate {
    pub fn number_phase(basis: &FockBasis, mode: usize, table: &[f64]) -> Result<Self> {
        if mode >= basis.n_modes() {
            return Err(Error::ModeOutOfRange { mode, n_modes: basis.n_modes() });
        }
        check_table(table)?;
        let factors = basis
            .states()
            .iter()
            .map(|s| C64::from_polar(1.0, table_phase(table, s[mode] as usize)))
            .collect();
        Ok(Self { factors })
    }

    pub fn linear_phase(basis: &FockBasis, mode: usize, phi: f64) -> Result<Self> {
        if mode >= basis.n_modes() {
            return Err(Error::ModeOutOfRange { mode, n_modes: basis.n_modes() });
        }
        let factors = basis.states().iter().map(|s| C64::from_polar(1.0, phi * s[mode] as f64)).collect();
        Ok(Self { factors })
    }

    /// Product of several diagonal gates.
    pub fn compose(&self, other: &Self) -> Self {
        Self { factors: self.factors.iter().zip(&other.factors).map(|(a, b)| a * b).collect() }
    }
}

/// Gate compiled against a concrete basis, applied without forming matrices.
#[derive(Debug, Clone)]
pub enum Gate {
    TwoMode(TwoModeGate),
    Diagonal(DiagonalGate),
}

impl Gate {
    pub fn to_csr(&self, dim: usize) -> CsrMatrix {
        match self {
            Gate::TwoMode(g) => CsrMatrix::from_triplets(dim, dim, g.to_triplets()),
            Gate::Diagonal(g) => CsrMatrix::from_diag(&g.factors),
        }
    }

    pub fn apply_vec(&self, x: &mut [C64]) {
        match self {
            Gate::TwoMode(g) => g.apply_vec(x),
            Gate::Diagonal(g) => x.iter_mut().zip(&g.factors).for_each(|(v, f)| *v *= f),
        }
    }

    /// m ← U m.
    pub fn apply_left(&self, m: &mut Array2<C64>) {
        match self {
            Gate::TwoMode(g) => g.apply_left(m),
            Gate::Diagonal(g) => {
                for (mut row, f) in m.rows_mut().into_iter().zip(&g.factors) {
                    row.mapv_inplace(|v| v * f);
                }
            }
        }
    }

    /// m ← m U†.
    pub fn apply_right_adjoint(&self, m: &mut Array2<C64>) {
        match self {
            Gate::TwoMode(g) => g.apply_right_adjoint(m),
            Gate::Diagonal(g) => {
                for mut row in m.rows_mut() {
                    row.iter_mut().zip(&g.factors).for_each(|(v, f)| *v *= f.conj());
                }
            }
        }
    }

    /// m ← U m U†.
    pub fn conjugate(&self, m: &mut Array2<C64>) {
        self.apply_left(m);
        self.apply_right_adjoint(m);
    }
}

/// Applies a gate list in order: `U = g_last ⋯ g_first`.
pub fn apply_sequence_vec(gates: &[Gate], x: &mut [C64]) {
    gates.iter().for_each(|g| g.apply_vec(x));
}

/// m ← U m U† for the ordered product of `gates`.
pub fn conjugate_sequence(gates: &[Gate], m: &mut Array2<C64>) {
    for g in gates {
        g.apply_left(m);
    }
    for g in gates {
        g.apply_right_adjoint(m);
    }
}

pub fn beamsplitter_gate(basis: &Arc<FockBasis>, i: usize, j: usize, theta: f64, phi: f64) -> Result<SectorOperator> {
    let g = TwoModeGate::beamsplitter(basis, i, j, theta, phi)?;
    SectorOperator::new(basis.clone(), Gate::TwoMode(g).to_csr(basis.dim()))
}

pub fn number_phase_gate(basis: &Arc<FockBasis>, i: usize, phase_table: &[f64]) -> Result<SectorOperator> {
    let g = DiagonalGate::number_phase(basis, i, phase_table)?;
    SectorOperator::new(basis.clone(), CsrMatrix::from_diag(&g.factors))
}

pub fn linear_phase_gate(basis: &Arc<FockBasis>, i: usize, phi: f64) -> Result<SectorOperator> {
    let g = DiagonalGate::linear_phase(basis, i, phi)?;
    SectorOperator::new(basis.clone(), CsrMatrix::from_diag(&g.factors))
}

/// |ψ⟩ → U|ψ⟩.
pub fn apply_gate_state(state: &StateVector, gate: &SectorOperator) -> Result<StateVector> {
    same_basis(&state.basis, &gate.basis)?;
    StateVector::new(state.basis.clone(), gate.matrix.matvec(state.amplitudes.view()))
}

/// ρ → UρU†.
pub fn apply_gate_density(rho: &DensityMatrix, gate: &SectorOperator) -> Result<DensityMatrix> {
    same_basis(&rho.basis, &gate.basis)?;
    let left = gate.matrix.mul_dense(rho.matrix.view());
    let out = gate.matrix.mul_dense(left.t().mapv(|v| v.conj()).view());
    DensityMatrix::new(rho.basis.clone(), out.t().mapv(|v| v.conj()))
}

/// Dense matrix of the ordered gate product on `basis`.
pub fn sequence_unitary(gates: &[Gate], dim: usize) -> Array2<C64> {
    let mut m = Array2::<C64>::eye(dim);
    for g in gates {
        g.apply_left(&mut m);
    }
    m
}

/// Converts a vector into a `StateVector`-compatible owned array after gates.
pub fn evolve_state(gates: &[Gate], state: &StateVector) -> StateVector {
    let mut a: Array1<C64> = state.amplitudes.clone();
    apply_sequence_vec(gates, a.as_slice_mut().expect("contiguous"));
    StateVector { basis: state.basis.clone(), amplitudes: a }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{ladder_operator, product_fock_state, total_number_operator, LadderKind};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn basis(m: usize, sectors: &[usize]) -> Arc<FockBasis> {
        Arc::new(FockBasis::new(m, sectors).unwrap())
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_state(b: &Arc<FockBasis>, rng: &mut ChaCha8Rng) -> StateVector {
        let a = Array1::from_shape_fn(b.dim(), |_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        StateVector::new(b.clone(), a).unwrap().normalized()
    }

    #[test]
    fn zero_angle_is_identity() {
        let b = basis(3, &[0, 1, 2]);
        let u = beamsplitter_gate(&b, 0, 2, 0.0, 0.7).unwrap();
        assert!(u.sub(&SectorOperator::identity(b.clone())).unwrap().matrix.max_abs() < 1e-15);
    }

    #[test]
    fn full_transfer_of_single_photon() {
        let b = basis(2, &[1]);
        let u = beamsplitter_gate(&b, 0, 1, PI / 2.0, 0.0).unwrap();
        let out = apply_gate_state(&product_fock_state(&b, &[1, 0]).unwrap(), &u).unwrap();
        let target = b.index_of(&[0, 1]).unwrap();
        assert!((out.amplitudes[target] - c(0.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn hong_ou_mandel_null() {
        let b = basis(2, &[2]);
        let u = beamsplitter_gate(&b, 0, 1, PI / 4.0, 0.0).unwrap().to_dense();
        // oracle: exp(−iθ G) for G = [[0,√2,0],[√2,0,√2],[0,√2,0]] in the |m, 2−m⟩ order
        let s2 = 2f64.sqrt();
        let g = ndarray::arr2(&[[0.0, s2, 0.0], [s2, 0.0, s2], [0.0, s2, 0.0]]);
        let (w, v) = ndarray_linalg::Eigh::eigh(&g, ndarray_linalg::UPLO::Lower).unwrap();
        let mut oracle = Array2::<C64>::zeros((3, 3));
        for k in 0..3 {
            let ph = C64::from_polar(1.0, -PI / 4.0 * w[k]);
            for r in 0..3 {
                for cc in 0..3 {
                    oracle[(r, cc)] += v[(r, k)] * v[(cc, k)] * ph;
                }
            }
        }
        let order = [b.index_of(&[0, 2]).unwrap(), b.index_of(&[1, 1]).unwrap(), b.index_of(&[2, 0]).unwrap()];
        for r in 0..3 {
            for cc in 0..3 {
                assert!((u[(order[r], order[cc])] - oracle[(r, cc)]).norm() < 1e-13);
            }
        }
        let i11 = b.index_of(&[1, 1]).unwrap();
        assert!(u[(i11, i11)].norm() < 1e-14);
    }

    #[test]
    fn generator_matches_ladder_products() {
        let b = basis(3, &[0, 1, 2, 3]);
        let (i, j, theta, phi) = (2usize, 0usize, 0.37, 1.1);
        let bi = ladder_operator(&b, i, LadderKind::Annihilate).unwrap();
        let bjd = ladder_operator(&b, j, LadderKind::Create).unwrap();
        let hop = bjd.matmul(&bi).unwrap().scale(C64::from_polar(theta, phi));
        let gen = hop.add(&hop.adjoint()).unwrap().to_dense();
        let oracle = crate::linalg::expm(&gen.mapv(|z| z * C64::new(0.0, -1.0)));
        let u = beamsplitter_gate(&b, i, j, theta, phi).unwrap().to_dense();
        assert!((&u - &oracle).iter().all(|x| x.norm() < 1e-12));
    }

    #[test]
    fn same_mode_rejected() {
        let b = basis(2, &[1]);
        assert!(beamsplitter_gate(&b, 1, 1, 0.1, 0.0).is_err());
    }

    #[test]
    fn phase_tables() {
        let b = basis(1, &[0, 1, 2, 3, 4]);
        let id = number_phase_gate(&b, 0, &[0.0, 0.0]).unwrap();
        assert!(id.sub(&SectorOperator::identity(b.clone())).unwrap().matrix.max_abs() < 1e-15);
        let (u, dt) = (10.0, 0.2);
        let table: Vec<f64> = (0..=4).map(|n| -dt * u / 2.0 * (n * n - n) as f64).collect();
        assert!((table[2] + 2.0).abs() < 1e-15);
        let g = number_phase_gate(&b, 0, &table).unwrap();
        for n in 0..=4usize {
            let exact = C64::from_polar(1.0, -dt * u / 2.0 * (n as f64) * (n as f64 - 1.0));
            assert!((g.matrix.get(n, n) - exact).norm() < 1e-14);
        }
        let (p1, p2, p3) = (0.3, -0.8, 1.4);
        let cascade = number_phase_gate(&b, 0, &[0.0, p1, p1 + p2, p1 + p2 + p3]).unwrap();
        assert!((cascade.matrix.get(3, 3) - C64::from_polar(1.0, p1 + p2 + p3)).norm() < 1e-14);
        assert!((cascade.matrix.get(4, 4) - C64::from_polar(1.0, p1 + p2 + 2.0 * p3)).norm() < 1e-14);
        assert!((table_phase(&[0.0, p1, p1 + p2], 3) - (p1 + 2.0 * p2)).abs() < 1e-15);
        assert!(number_phase_gate(&b, 0, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn linear_phase_matches_linear_table() {
        let b = basis(2, &[0, 1, 2, 3]);
        let lp = linear_phase_gate(&b, 1, 0.77).unwrap();
        let np = number_phase_gate(&b, 1, &[0.0, 0.77, 1.54]).unwrap();
        assert!(lp.sub(&np).unwrap().matrix.max_abs() < 1e-14);
        let one = basis(1, &[1]);
        let g = linear_phase_gate(&one, 0, PI).unwrap();
        assert!((g.matrix.get(0, 0) - c(-1.0, 0.0)).norm() < 1e-15);
        let zero = linear_phase_gate(&b, 0, 0.0).unwrap();
        assert!(zero.sub(&SectorOperator::identity(b.clone())).unwrap().matrix.max_abs() == 0.0);
    }

    #[test]
    fn inverse_pair_cancels() {
        let b = basis(4, &[0, 1, 2, 3]);
        let u = beamsplitter_gate(&b, 1, 3, 0.9, 0.4).unwrap();
        let v = beamsplitter_gate(&b, 1, 3, -0.9, 0.4).unwrap();
        let p = v.matmul(&u).unwrap();
        assert!(p.sub(&SectorOperator::identity(b.clone())).unwrap().matrix.max_abs() < 1e-10);
    }

    #[test]
    fn identity_gate_leaves_state() {
        let b = basis(3, &[2]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_state(&b, &mut rng);
        let out = apply_gate_state(&s, &SectorOperator::identity(b.clone())).unwrap();
        assert!((&out.amplitudes - &s.amplitudes).iter().all(|x| x.norm() < 1e-16));
    }

    #[test]
    fn fast_paths_match_sparse() {
        let b = basis(4, &[0, 1, 2, 3]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let gates = vec![
            GateDescriptor::BeamSplitter { i: 0, j: 3, theta: 0.4, phi: -0.3 }.compile(&b).unwrap(),
            GateDescriptor::NumberPhase { mode: 2, table: vec![0.0, 0.1, -0.9] }.compile(&b).unwrap(),
            GateDescriptor::BeamSplitter { i: 2, j: 1, theta: 1.3, phi: 2.0 }.compile(&b).unwrap(),
        ];
        let dense = gates.iter().fold(Array2::<C64>::eye(b.dim()), |acc, g| g.to_csr(b.dim()).to_dense().dot(&acc));
        assert!((&sequence_unitary(&gates, b.dim()) - &dense).iter().all(|x| x.norm() < 1e-13));
        let psi = random_state(&b, &mut rng);
        let out = evolve_state(&gates, &psi);
        let expect = dense.dot(&psi.amplitudes);
        assert!((&out.amplitudes - &expect).iter().all(|x| x.norm() < 1e-13));
        let rho = Array2::from_shape_fn((b.dim(), b.dim()), |_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let mut m = rho.clone();
        conjugate_sequence(&gates, &mut m);
        let expect = dense.dot(&rho).dot(&dense.t().mapv(|x| x.conj()));
        assert!((&m - &expect).iter().all(|x| x.norm() < 1e-12));
    }

    #[test]
    fn density_application_preserves_trace() {
        let b = basis(3, &[0, 1, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_state(&b, &mut rng).to_density();
        let u = beamsplitter_gate(&b, 0, 1, 0.8, 0.2).unwrap();
        let out = apply_gate_density(&rho, &u).unwrap();
        assert!((out.trace() - c(1.0, 0.0)).norm() < 1e-10);
        assert!(out.hermiticity_error() < 1e-12);
    }

    proptest! {
        #[test]
        fn beamsplitters_are_unitary_and_number_conserving(
            theta in -3.0f64..3.0, phi in -3.2f64..3.2, i in 0usize..4, j in 0usize..4,
        ) {
            prop_assume!(i != j);
            let b = basis(4, &[0, 1, 2, 3]);
            let u = beamsplitter_gate(&b, i, j, theta, phi).unwrap();
            prop_assert!(u.unitarity_error() < 1e-10);
            prop_assert!(u.number_commutator_error() < 1e-10);
            let n = total_number_operator(&b);
            let comm = u.matmul(&n).unwrap().sub(&n.matmul(&u).unwrap()).unwrap();
            prop_assert!(comm.matrix.max_abs() < 1e-10);
        }

        #[test]
        fn gates_preserve_norm(seed in 0u64..1000, theta in -2.0f64..2.0) {
            let b = basis(3, &[0, 1, 2, 3]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = random_state(&b, &mut rng);
            let u = beamsplitter_gate(&b, 0, 2, theta, 0.3).unwrap();
            let out = apply_gate_state(&psi, &u).unwrap();
            prop_assert!((out.norm() - 1.0).abs() < 1e-10);
            let p = number_phase_gate(&b, 1, &[0.0, theta, 3.0 * theta]).unwrap();
            prop_assert!(p.unitarity_error() < 1e-10);
        }

        #[test]
        fn acts_trivially_on_spectator_modes(theta in -2.0f64..2.0) {
            let b = basis(3, &[0, 1, 2]);
            let u = beamsplitter_gate(&b, 0, 1, theta, 0.5).unwrap();
            for (r, c, v) in u.matrix.triplets() {
                if v.norm() > 1e-14 {
                    prop_assert_eq!(b.state(r)[2], b.state(c)[2]);
                }
            }
        }
    }
}
