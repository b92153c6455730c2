//! Occupation-number bases over fixed photon-number sectors, plus the state
//! and operator containers that live on them.

use std::collections::HashMap;
use std::ops::Range;
use std::sync::Arc;

use ndarray::{Array1, Array2};
use ndarray_linalg::{EigValsh, UPLO};
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::sparse::CsrMatrix;

/// Binomial coefficient as f64-exact integer for the sizes used here.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of occupation vectors with `k` photons in `m` modes.
pub fn sector_dimension(m: usize, k: usize) -> usize {
    binomial((m + k - 1) as u64, k as u64) as usize
}

/// Enumeration of occupation vectors. Ordering: sectors ascending, then
/// lexicographic ascending occupation within each sector.
#[derive(Debug, Clone)]
pub struct FockBasis {
    n_modes: usize,
    sectors: Vec<usize>,
    states: Vec<Vec<u8>>,
    totals: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    ranges: Vec<Range<usize>>,
}

impl PartialEq for FockBasis {
    fn eq(&self, other: &Self) -> bool {
        self.n_modes == other.n_modes && self.sectors == other.sectors
    }
}

fn push_compositions(n_modes: usize, total: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    let left = n_modes - prefix.len();
    let used: usize = prefix.iter().map(|&x| x as usize).sum();
    let remaining = total - used;
    if left == 1 {
        prefix.push(remaining as u8);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in 0..=remaining {
        prefix.push(first as u8);
        push_compositions(n_modes, total, prefix, out);
        prefix.pop();
    }
}

impl FockBasis {
    pub fn new(n_modes: usize, sectors: &[usize]) -> Result<Self> {
        if n_modes == 0 {
            return invalid("n_modes must be at least 1");
        }
        if sectors.is_empty() {
            return invalid("sector set must be nonempty");
        }
        let mut sectors = sectors.to_vec();
        sectors.sort_unstable();
        sectors.dedup();
        if *sectors.last().unwrap() > u8::MAX as usize {
            return invalid("photon numbers above 255 are not supported");
        }
        let mut states = Vec::new();
        let mut ranges = Vec::new();
        for &k in &sectors {
            let start = states.len();
            push_compositions(n_modes, k, &mut Vec::with_capacity(n_modes), &mut states);
            ranges.push(start..states.len());
        }
        let totals = states.iter().map(|s| s.iter().map(|&x| x as usize).sum()).collect();
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Self { n_modes, sectors, states, totals, index, ranges })
    }

    /// Sectors `0..=n_max`.
    pub fn up_to(n_modes: usize, n_max: usize) -> Result<Self> {
        Self::new(n_modes, &(0..=n_max).collect::<Vec<_>>())
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn sectors(&self) -> &[usize] {
        &self.sectors
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Vec<u8>] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &[u8] {
        &self.states[i]
    }

    pub fn total(&self, i: usize) -> usize {
        self.totals[i]
    }

    pub fn index_of(&self, occupation: &[u8]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    pub fn max_photons(&self) -> usize {
        *self.sectors.last().unwrap()
    }

    /// Index range of sector `k`, if present.
    pub fn sector_range(&self, k: usize) -> Option<Range<usize>> {
        self.sectors.iter().position(|&s| s == k).map(|p| self.ranges[p].clone())
    }

    pub fn contains_sector(&self, k: usize) -> bool {
        self.sectors.contains(&k)
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes {
            return Err(Error::ModeOutOfRange { mode, n_modes: self.n_modes });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    Create,
    Annihilate,
    Number,
}

/// Sparse operator tied to a basis.
#[derive(Debug, Clone)]
pub struct SectorOperator {
    pub basis: Arc<FockBasis>,
    pub matrix: CsrMatrix,
}

impl SectorOperator {
    pub fn new(basis: Arc<FockBasis>, matrix: CsrMatrix) -> Result<Self> {
        let d = basis.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: matrix.nrows().max(matrix.ncols()) });
        }
        Ok(Self { basis, matrix })
    }

    pub fn identity(basis: Arc<FockBasis>) -> Self {
        let d = basis.dim();
        Self { basis, matrix: CsrMatrix::identity(d) }
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn to_dense(&self) -> Array2<C64> {
        self.matrix.to_dense()
    }

    pub fn adjoint(&self) -> Self {
        Self { basis: self.basis.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        same_basis(&self.basis, &other.basis)?;
        Ok(Self { basis: self.basis.clone(), matrix: self.matrix.matmul(&other.matrix) })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_basis(&self.basis, &other.basis)?;
        Ok(Self { basis: self.basis.clone(), matrix: self.matrix.add(&other.matrix) })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_basis(&self.basis, &other.basis)?;
        Ok(Self { basis: self.basis.clone(), matrix: self.matrix.sub(&other.matrix) })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { basis: self.basis.clone(), matrix: self.matrix.scale(s) }
    }

    /// max |A − A†|.
    pub fn hermiticity_error(&self) -> f64 {
        self.matrix.sub(&self.matrix.adjoint()).max_abs()
    }

    /// max |U†U − I|.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.matrix.adjoint().matmul(&self.matrix);
        p.sub(&CsrMatrix::identity(self.dim())).max_abs()
    }

    /// max |[A, N̂]| with N̂ the total photon number.
    pub fn number_commutator_error(&self) -> f64 {
        self.matrix
            .triplets()
            .map(|(r, c, v)| (self.basis.total(c) as f64 - self.basis.total(r) as f64).abs() * v.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() < tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() < tol
    }

    pub fn is_number_conserving(&self, tol: f64) -> bool {
        self.number_commutator_error() < tol
    }

    /// Dense block restricted to sector `k`.
    pub fn sector_block(&self, k: usize) -> Result<Array2<C64>> {
        let r = self
            .basis
            .sector_range(k)
            .ok_or_else(|| Error::InvalidArgument(format!("sector {k} not in basis")))?;
        let n = r.len();
        let mut m = Array2::zeros((n, n));
        for row in r.clone() {
            for (c, v) in self.matrix.row(row) {
                if r.contains(&c) {
                    m[(row - r.start, c - r.start)] += v;
                }
            }
        }
        Ok(m)
    }
}

pub(crate) fn same_basis(a: &Arc<FockBasis>, b: &Arc<FockBasis>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::BasisMismatch)
    }
}

/// Creation, annihilation or number operator on one mode. Matrix elements
/// leaving the represented sector set are dropped.
pub fn ladder_operator(basis: &Arc<FockBasis>, mode: usize, kind: LadderKind) -> Result<SectorOperator> {
    basis.check_mode(mode)?;
    let mut t = Vec::new();
    for (col, s) in basis.states().iter().enumerate() {
        let n = s[mode] as usize;
        match kind {
            LadderKind::Number => {
                if n > 0 {
                    t.push((col, col, C64::new(n as f64, 0.0)));
                }
            }
            LadderKind::Create => {
                if n < u8::MAX as usize {
                    let mut target = s.clone();
                    target[mode] += 1;
                    if let Some(row) = basis.index_of(&target) {
                        t.push((row, col, C64::new(((n + 1) as f64).sqrt(), 0.0)));
                    }
                }
            }
            LadderKind::Annihilate => {
                if n > 0 {
                    let mut target = s.clone();
                    target[mode] -= 1;
                    if let Some(row) = basis.index_of(&target) {
                        t.push((row, col, C64::new((n as f64).sqrt(), 0.0)));
                    }
                }
            }
        }
    }
    let d = basis.dim();
    SectorOperator::new(basis.clone(), CsrMatrix::from_triplets(d, d, t))
}

/// Total photon number operator.
pub fn total_number_operator(basis: &Arc<FockBasis>) -> SectorOperator {
    let diag: Vec<C64> = (0..basis.dim()).map(|i| C64::new(basis.total(i) as f64, 0.0)).collect();
    SectorOperator { basis: basis.clone(), matrix: CsrMatrix::from_diag(&diag) }
}

#[derive(Debug, Clone)]
pub struct StateVector {
    pub basis: Arc<FockBasis>,
    pub amplitudes: Array1<C64>,
}

impl StateVector {
    pub fn new(basis: Arc<FockBasis>, amplitudes: Array1<C64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), got: amplitudes.len() });
        }
        Ok(Self { basis, amplitudes })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.amplitudes.mapv_inplace(|a| a / n);
        }
        self
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        same_basis(&self.basis, &other.basis)?;
        Ok(self.amplitudes.iter().zip(other.amplitudes.iter()).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn to_density(&self) -> DensityMatrix {
        let a = &self.amplitudes;
        let m = Array2::from_shape_fn((a.len(), a.len()), |(i, j)| a[i] * a[j].conj());
        DensityMatrix { basis: self.basis.clone(), matrix: m }
    }
}

/// Unit vector on a single occupation state.
pub fn product_fock_state(basis: &Arc<FockBasis>, occupation: &[u8]) -> Result<StateVector> {
    let idx = basis.index_of(occupation).ok_or_else(|| Error::NotInBasis(occupation.to_vec()))?;
    let mut amps = Array1::zeros(basis.dim());
    amps[idx] = C64::new(1.0, 0.0);
    StateVector::new(basis.clone(), amps)
}

#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub basis: Arc<FockBasis>,
    pub matrix: Array2<C64>,
}

impl DensityMatrix {
    pub fn new(basis: Arc<FockBasis>, matrix: Array2<C64>) -> Result<Self> {
        let d = basis.dim();
        if matrix.dim() != (d, d) {
            return Err(Error::DimensionMismatch { expected: d, got: matrix.nrows() });
        }
        Ok(Self { basis, matrix })
    }

    /// |occupation⟩⟨occupation|.
    pub fn product(basis: &Arc<FockBasis>, occupation: &[u8]) -> Result<Self> {
        Ok(product_fock_state(basis, occupation)?.to_density())
    }

    pub fn vacuum(basis: &Arc<FockBasis>) -> Result<Self> {
        Self::product(basis, &vec![0u8; basis.n_modes()])
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.diag().sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let m = &self.matrix;
        let mut e: f64 = 0.0;
        for i in 0..m.nrows() {
            for j in 0..=i {
                e = e.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        e
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let h = (&self.matrix + &self.matrix.t().mapv(|v| v.conj())).mapv(|v| v * 0.5);
        let w = h.eigvalsh(UPLO::Lower).map_err(|e| Error::Linalg(e.to_string()))?;
        Ok(w.iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// Population of sector `k` (zero if absent).
    pub fn sector_population(&self, k: usize) -> f64 {
        match self.basis.sector_range(k) {
            Some(r) => r.map(|i| self.matrix[(i, i)].re).sum(),
            None => 0.0,
        }
    }

    /// Dense block of sector `k`.
    pub fn sector_block(&self, k: usize) -> Option<Array2<C64>> {
        let r = self.basis.sector_range(k)?;
        Some(self.matrix.slice(ndarray::s![r.clone(), r]).to_owned())
    }

    /// ⟨N̂⟩ and ⟨N̂²⟩.
    pub fn number_moments(&self) -> (f64, f64) {
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for i in 0..self.dim() {
            let n = self.basis.total(i) as f64;
            let p = self.matrix[(i, i)].re;
            m1 += n * p;
            m2 += n * n * p;
        }
        (m1, m2)
    }

    /// Trace-norm distance ‖self − other‖₁ (Hermitian part).
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        same_basis(&self.basis, &other.basis)?;
        trace_norm_hermitian(&(&self.matrix - &other.matrix))
    }
}

/// Trace norm of the Hermitian part of `m`.
pub fn trace_norm_hermitian(m: &Array2<C64>) -> Result<f64> {
    let h = (m + &m.t().mapv(|v| v.conj())).mapv(|v| v * 0.5);
    let w = h.eigvalsh(UPLO::Lower).map_err(|e| Error::Linalg(e.to_string()))?;
    Ok(w.iter().map(|x| x.abs()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn basis(m: usize, sectors: &[usize]) -> Arc<FockBasis> {
        Arc::new(FockBasis::new(m, sectors).unwrap())
    }

    #[test]
    fn single_mode_two_levels() {
        let b = basis(1, &[0, 1]);
        assert_eq!(b.states(), &[vec![0u8], vec![1u8]]);
        assert_eq!(b.dim(), 2);
    }

    #[test]
    fn sixteen_modes_two_photons() {
        let b = basis(16, &[2]);
        assert_eq!(b.dim(), 136);
        assert_eq!(b.dim(), sector_dimension(16, 2));
        assert_eq!(binomial(17, 2), 136);
    }

    #[test]
    fn two_modes_up_to_two() {
        let b = basis(2, &[0, 1, 2]);
        assert_eq!(b.dim(), 6);
        let expected: Vec<Vec<u8>> =
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![0, 2], vec![1, 1], vec![2, 0]];
        assert_eq!(b.states(), expected.as_slice());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(FockBasis::new(0, &[1]).is_err());
        assert!(FockBasis::new(3, &[]).is_err());
        let b = basis(2, &[1]);
        assert!(matches!(
            ladder_operator(&b, 2, LadderKind::Number),
            Err(Error::ModeOutOfRange { .. })
        ));
        assert!(matches!(product_fock_state(&b, &[1, 1]), Err(Error::NotInBasis(_))));
    }

    #[test]
    fn number_and_create_elements() {
        let b = basis(1, &[0, 1, 2, 3]);
        let n = ladder_operator(&b, 0, LadderKind::Number).unwrap();
        assert_eq!(n.matrix.get(0, 0).re, 0.0);
        assert_eq!(n.matrix.get(3, 3).re, 3.0);
        let b2 = basis(1, &[0, 1, 2]);
        let a = ladder_operator(&b2, 0, LadderKind::Create).unwrap();
        assert!((a.matrix.get(2, 1).re - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn truncated_commutator_is_identity_below_cap() {
        let b = basis(1, &[0, 1, 2, 3, 4]);
        let a = ladder_operator(&b, 0, LadderKind::Annihilate).unwrap();
        let ad = ladder_operator(&b, 0, LadderKind::Create).unwrap();
        let comm = a.matmul(&ad).unwrap().sub(&ad.matmul(&a).unwrap()).unwrap().to_dense();
        for i in 0..4 {
            for j in 0..5 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((comm[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn multimode_commutators() {
        let b = basis(3, &[0, 1, 2, 3]);
        for i in 0..3 {
            for j in 0..3 {
                let bi = ladder_operator(&b, i, LadderKind::Annihilate).unwrap();
                let bjd = ladder_operator(&b, j, LadderKind::Create).unwrap();
                let comm = bi.matmul(&bjd).unwrap().sub(&bjd.matmul(&bi).unwrap()).unwrap();
                for r in 0..b.dim() {
                    for c in 0..b.dim() {
                        let v = comm.matrix.get(r, c);
                        let expect = if i == j && r == c && b.total(r) < 3 { 1.0 } else { 0.0 };
                        // b_j† leaves the basis from the top sector, so only lower rows are exact
                        if b.total(r) < 3 {
                            assert!((v - C64::new(expect, 0.0)).norm() < 1e-14, "i={i} j={j} r={r} c={c}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn number_equals_bdag_b() {
        let b = basis(3, &[0, 1, 2, 3]);
        for i in 0..3 {
            let n = ladder_operator(&b, i, LadderKind::Number).unwrap();
            let a = ladder_operator(&b, i, LadderKind::Annihilate).unwrap();
            let prod = a.adjoint().matmul(&a).unwrap();
            assert!(prod.sub(&n).unwrap().matrix.max_abs() < 1e-14);
        }
    }

    #[test]
    fn product_states_are_unit_vectors() {
        let b = basis(8, &[2]);
        let mut occ = vec![0u8; 8];
        occ[3] = 1;
        occ[4] = 1;
        let s = product_fock_state(&b, &occ).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert_eq!(s.amplitudes[b.index_of(&occ).unwrap()], C64::new(1.0, 0.0));
        let v = product_fock_state(&basis(4, &[0, 1]), &[0, 0, 0, 0]).unwrap();
        assert_eq!(v.amplitudes[0], C64::new(1.0, 0.0));
    }

    proptest! {
        #[test]
        fn sector_dimensions_match_stars_and_bars(m in 1usize..7, k in 0usize..5) {
            let b = FockBasis::new(m, &[k]).unwrap();
            prop_assert_eq!(b.dim(), sector_dimension(m, k));
        }

        #[test]
        fn index_round_trips(m in 1usize..6, kmax in 0usize..4) {
            let b = FockBasis::up_to(m, kmax).unwrap();
            for i in 0..b.dim() {
                prop_assert_eq!(b.index_of(b.state(i)), Some(i));
                prop_assert!(b.sectors().contains(&b.total(i)));
            }
            let mut seen = std::collections::HashSet::new();
            for s in b.states() {
                prop_assert!(seen.insert(s.clone()));
            }
        }
    }
}
