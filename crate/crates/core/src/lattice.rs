//! Bose-Hubbard chains and flux-threaded square lattices, their Trotter
//! grouping and exact sector Hamiltonians.
//!
//! Edge convention: an edge `(i, j, J_ij)` contributes `J_ij b_i b_j† + h.c.`,
//! i.e. a photon hopping from `i` to `j` picks up the amplitude `J_ij`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{invalid, Result};
use crate::fock::{FockBasis, SectorOperator};
use crate::gates::{Gate, GateDescriptor};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Chain { nx: usize },
    Square { nx: usize, ny: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub hopping: C64,
    pub direction: Direction,
    /// Starting coordinate along the hop direction (column for horizontal
    /// edges, row for vertical ones); its parity selects the Trotter group.
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeModel {
    pub geometry: Geometry,
    pub boundary: Boundary,
    pub n_sites: usize,
    pub edges: Vec<Edge>,
    pub j: f64,
    pub u: f64,
    /// Flux per plaquette in flux quanta (zero for chains).
    pub flux: f64,
}

/// Bose-Hubbard chain with hopping `−J` and on-site `(U/2) n(n−1)`.
pub fn build_bose_hubbard(nx: usize, j: f64, u: f64, boundary: Boundary) -> Result<LatticeModel> {
    if nx < 2 {
        return invalid("a chain needs at least two sites");
    }
    let mut edges: Vec<Edge> = (0..nx - 1)
        .map(|x| Edge { i: x, j: x + 1, hopping: C64::new(-j, 0.0), direction: Direction::Horizontal, offset: x })
        .collect();
    if boundary == Boundary::Periodic {
        edges.push(Edge {
            i: nx - 1,
            j: 0,
            hopping: C64::new(-j, 0.0),
            direction: Direction::Horizontal,
            offset: nx - 1,
        });
    }
    Ok(LatticeModel { geometry: Geometry::Chain { nx }, boundary, n_sites: nx, edges, j, u, flux: 0.0 })
}

/// Square lattice in Landau gauge: horizontal hops carry no phase, the
/// vertical hop in column `x` carries `2π·flux·x`, and the horizontal links
/// crossing the x-boundary in row `y` carry `−2π·flux·nx·y` so that every
/// wrap-around plaquette also encloses `flux`.
pub fn build_fqh(nx: usize, ny: usize, j: f64, u: f64, flux: f64, boundary: Boundary) -> Result<LatticeModel> {
    if nx < 2 || ny < 2 {
        return invalid("square lattice needs at least 2x2 sites");
    }
    if boundary == Boundary::Periodic {
        let total = flux * (nx * ny) as f64;
        if (total - total.round()).abs() > 1e-9 {
            return invalid(format!("total flux {total} must be an integer on a torus"));
        }
    }
    let site = |x: usize, y: usize| y * nx + x;
    let hop = |phase: f64| C64::from_polar(j, phase) * -1.0;
    let periodic = boundary == Boundary::Periodic;
    let mut edges = Vec::new();
    for y in 0..ny {
        for x in 0..nx {
            if x + 1 < nx || periodic {
                let phase = if x + 1 == nx { -2.0 * PI * flux * (nx * y) as f64 } else { 0.0 };
                edges.push(Edge {
                    i: site(x, y),
                    j: site((x + 1) % nx, y),
                    hopping: hop(phase),
                    direction: Direction::Horizontal,
                    offset: x,
                });
            }
            if y + 1 < ny || periodic {
                edges.push(Edge {
                    i: site(x, y),
                    j: site(x, (y + 1) % ny),
                    hopping: hop(2.0 * PI * flux * x as f64),
                    direction: Direction::Vertical,
                    offset: y,
                });
            }
        }
    }
    Ok(LatticeModel { geometry: Geometry::Square { nx, ny }, boundary, n_sites: nx * ny, edges, j, u, flux })
}

impl LatticeModel {
    pub fn onsite_energy(&self, n: usize) -> f64 {
        0.5 * self.u * (n * n.saturating_sub(1)) as f64
    }

    /// Coordinates `(x, y)` of a site.
    pub fn coords(&self, site: usize) -> (usize, usize) {
        match self.geometry {
            Geometry::Chain { .. } => (site, 0),
            Geometry::Square { nx, .. } => (site % nx, site / nx),
        }
    }

    fn hop_amplitude(&self, from: usize, to: usize) -> Option<C64> {
        let mut acc: Option<C64> = None;
        for e in &self.edges {
            let a = if e.i == from && e.j == to {
                Some(e.hopping)
            } else if e.i == to && e.j == from {
                Some(e.hopping.conj())
            } else {
                None
            };
            if let Some(a) = a {
                acc = Some(acc.unwrap_or_default() + a);
            }
        }
        acc
    }

    /// Flux through every elementary plaquette (flux quanta, wrapped into
    /// (−½, ½]), looping x → x+1 → y+1 → back. Empty for chains.
    pub fn plaquette_fluxes(&self) -> Vec<f64> {
        let Geometry::Square { nx, ny } = self.geometry else {
            return vec![];
        };
        let periodic = self.boundary == Boundary::Periodic;
        let site = |x: usize, y: usize| (y % ny) * nx + (x % nx);
        let mut out = Vec::new();
        for y in 0..ny {
            for x in 0..nx {
                if !periodic && (x + 1 >= nx || y + 1 >= ny) {
                    continue;
                }
                let loop_sites = [site(x, y), site(x + 1, y), site(x + 1, y + 1), site(x, y + 1), site(x, y)];
                let mut prod = C64::new(1.0, 0.0);
                for w in loop_sites.windows(2) {
                    prod *= self.hop_amplitude(w[0], w[1]).expect("plaquette edge present");
                }
                let f = prod.arg() / (2.0 * PI);
                out.push(f);
            }
        }
        out
    }

    /// Copy with `b_i → e^{iθ_i} b_i` applied.
    pub fn gauge_transformed(&self, thetas: &[f64]) -> LatticeModel {
        let mut m = self.clone();
        for e in &mut m.edges {
            e.hopping *= C64::from_polar(1.0, thetas[e.i] - thetas[e.j]);
        }
        m
    }

    /// Edges partitioned into vertex-disjoint groups.
    pub fn edge_coloring(&self) -> EdgeColoring {
        let keys: Vec<(Direction, usize)> = match self.geometry {
            Geometry::Chain { .. } => vec![(Direction::Horizontal, 0), (Direction::Horizontal, 1)],
            Geometry::Square { .. } => vec![
                (Direction::Horizontal, 0),
                (Direction::Horizontal, 1),
                (Direction::Vertical, 0),
                (Direction::Vertical, 1),
            ],
        };
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut recolored = false;
        for (dir, parity) in keys {
            let mut pending: Vec<usize> = (0..self.edges.len())
                .filter(|&k| self.edges[k].direction == dir && self.edges[k].offset % 2 == parity)
                .collect();
            let mut first = true;
            while !pending.is_empty() {
                let mut used = vec![false; self.n_sites];
                let mut group = Vec::new();
                let mut rest = Vec::new();
                for k in pending {
                    let e = &self.edges[k];
                    if used[e.i] || used[e.j] {
                        rest.push(k);
                    } else {
                        used[e.i] = true;
                        used[e.j] = true;
                        group.push(k);
                    }
                }
                if !first {
                    recolored = true;
                }
                first = false;
                groups.push(group);
                pending = rest;
            }
        }
        EdgeColoring { groups, recolored }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeColoring {
    pub groups: Vec<Vec<usize>>,
    /// True when the parity coloring failed (odd periodic length) and extra
    /// groups were added.
    pub recolored: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrotterPlan {
    pub delta_t: f64,
    pub groups: Vec<Vec<usize>>,
    pub recolored: bool,
    /// φ(n) = −δt (U/2) n(n−1) for n = 0..=n_max.
    pub onsite_phase_table: Vec<f64>,
}

pub fn trotter_plan(model: &LatticeModel, delta_t: f64, n_max: usize) -> TrotterPlan {
    let coloring = model.edge_coloring();
    let onsite_phase_table = (0..=n_max).map(|n| -delta_t * model.onsite_energy(n)).collect();
    TrotterPlan { delta_t, groups: coloring.groups, recolored: coloring.recolored, onsite_phase_table }
}

/// Gate list for one first-order step: every group's beamsplitters in the
/// declared order, then the on-site phase gate on every site.
pub fn trotter_step_sequence(model: &LatticeModel, delta_t: f64, n_max: usize) -> Vec<GateDescriptor> {
    let plan = trotter_plan(model, delta_t, n_max);
    let mut seq = Vec::new();
    for group in &plan.groups {
        for &k in group {
            let e = &model.edges[k];
            seq.push(GateDescriptor::BeamSplitter {
                i: e.i,
                j: e.j,
                theta: e.hopping.norm() * delta_t,
                phi: e.hopping.arg(),
            });
        }
    }
    for site in 0..model.n_sites {
        seq.push(GateDescriptor::NumberPhase { mode: site, table: plan.onsite_phase_table.clone() });
    }
    seq
}

/// Compiled gates of one Trotter step on `basis`.
pub fn compile_step(model: &LatticeModel, basis: &Arc<FockBasis>, delta_t: f64) -> Result<Vec<Gate>> {
    trotter_step_sequence(model, delta_t, basis.max_photons()).iter().map(|g| g.compile(basis)).collect()
}

fn hopping_triplets(edges: &[&Edge], basis: &FockBasis, out: &mut Vec<(usize, usize, C64)>) {
    for (col, s) in basis.states().iter().enumerate() {
        for e in edges {
            let (ni, nj) = (s[e.i] as f64, s[e.j] as f64);
            if ni == 0.0 {
                continue;
            }
            let mut t = s.clone();
            t[e.i] -= 1;
            t[e.j] += 1;
            if let Some(row) = basis.index_of(&t) {
                let amp = e.hopping * (ni * (nj + 1.0)).sqrt();
                out.push((row, col, amp));
                out.push((col, row, amp.conj()));
            }
        }
    }
}

/// Hopping part restricted to a subset of edges.
pub fn hopping_hamiltonian(model: &LatticeModel, edges: &[usize], basis: &Arc<FockBasis>) -> Result<SectorOperator> {
    let sel: Vec<&Edge> = edges.iter().map(|&k| &model.edges[k]).collect();
    let mut t = Vec::new();
    hopping_triplets(&sel, basis, &mut t);
    let d = basis.dim();
    SectorOperator::new(basis.clone(), CsrMatrix::from_triplets(d, d, t))
}

/// Σ (J_ij b_i b_j† + h.c.) + Σ (U/2) n_i(n_i − 1).
pub fn exact_hamiltonian(model: &LatticeModel, basis: &Arc<FockBasis>) -> Result<SectorOperator> {
    let sel: Vec<&Edge> = model.edges.iter().collect();
    let mut t = Vec::new();
    hopping_triplets(&sel, basis, &mut t);
    for (k, s) in basis.states().iter().enumerate() {
        let e: f64 = s.iter().map(|&n| model.onsite_energy(n as usize)).sum();
        if e != 0.0 {
            t.push((k, k, C64::new(e, 0.0)));
        }
    }
    let d = basis.dim();
    SectorOperator::new(basis.clone(), CsrMatrix::from_triplets(d, d, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{ladder_operator, LadderKind};
    use ndarray_linalg::{EigValsh, UPLO};

    fn basis(m: usize, sectors: &[usize]) -> Arc<FockBasis> {
        Arc::new(FockBasis::new(m, sectors).unwrap())
    }

    #[test]
    fn chain_edges() {
        let open = build_bose_hubbard(2, 1.0, 0.0, Boundary::Open).unwrap();
        assert_eq!(open.edges.len(), 1);
        let ring = build_bose_hubbard(8, 1.0, 0.0, Boundary::Periodic).unwrap();
        assert_eq!(ring.edges.len(), 8);
        assert!(ring.edges.iter().any(|e| (e.i, e.j) == (7, 0)));
        assert!(build_bose_hubbard(1, 1.0, 0.0, Boundary::Open).is_err());
    }

    #[test]
    fn free_ring_single_particle_spectrum() {
        let nx = 8;
        let m = build_bose_hubbard(nx, 1.3, 0.0, Boundary::Periodic).unwrap();
        let b = basis(nx, &[1]);
        let h = exact_hamiltonian(&m, &b).unwrap().to_dense();
        let mut w = h.eigvalsh(UPLO::Lower).unwrap().to_vec();
        let mut expect: Vec<f64> = (0..nx).map(|k| -2.0 * 1.3 * (2.0 * PI * k as f64 / nx as f64).cos()).collect();
        w.sort_by(f64::total_cmp);
        expect.sort_by(f64::total_cmp);
        for (a, b) in w.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn torus_flux_is_uniform() {
        let m = build_fqh(4, 4, 1.0, 0.0, 0.25, Boundary::Periodic).unwrap();
        assert_eq!(m.edges.len(), 32);
        let f = m.plaquette_fluxes();
        assert_eq!(f.len(), 16);
        for v in f {
            assert!((v - 0.25).abs() < 1e-12, "plaquette flux {v}");
        }
        let rect = build_fqh(6, 4, 1.0, 0.0, 0.25, Boundary::Periodic).unwrap();
        for v in rect.plaquette_fluxes() {
            assert!((v - 0.25).abs() < 1e-12);
        }
        let odd = build_fqh(4, 4, 1.0, 0.0, 1.0 / 3.0, Boundary::Open).unwrap();
        for v in odd.plaquette_fluxes() {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!(build_fqh(4, 4, 1.0, 0.0, 0.1, Boundary::Periodic).is_err());
    }

    #[test]
    fn zero_flux_has_real_hoppings() {
        let m = build_fqh(4, 4, 1.0, 2.0, 0.0, Boundary::Periodic).unwrap();
        assert!(m.edges.iter().all(|e| (e.hopping - C64::new(-1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn colorings() {
        let ring = build_bose_hubbard(8, 1.0, 0.0, Boundary::Periodic).unwrap();
        let c = ring.edge_coloring();
        assert_eq!(c.groups.iter().map(Vec::len).collect::<Vec<_>>(), vec![4, 4]);
        assert!(!c.recolored);
        let torus = build_fqh(4, 4, 1.0, 0.0, 0.25, Boundary::Periodic).unwrap();
        let c = torus.edge_coloring();
        assert_eq!(c.groups.iter().map(Vec::len).collect::<Vec<_>>(), vec![8, 8, 8, 8]);
        let odd = build_bose_hubbard(5, 1.0, 0.0, Boundary::Periodic).unwrap();
        let c = odd.edge_coloring();
        assert!(c.recolored);
        assert_eq!(c.groups.len(), 3);
        for model in [&ring, &torus, &odd] {
            let c = model.edge_coloring();
            let mut all: Vec<usize> = c.groups.concat();
            all.sort();
            assert_eq!(all, (0..model.edges.len()).collect::<Vec<_>>());
            for g in &c.groups {
                let mut seen = std::collections::HashSet::new();
                for &k in g {
                    assert!(seen.insert(model.edges[k].i));
                    assert!(seen.insert(model.edges[k].j));
                }
            }
        }
    }

    #[test]
    fn sequence_structure() {
        let m = build_bose_hubbard(8, 1.0, 10.0, Boundary::Periodic).unwrap();
        let seq = trotter_step_sequence(&m, 0.2, 2);
        let bs = seq.iter().filter(|g| matches!(g, GateDescriptor::BeamSplitter { .. })).count();
        let ph = seq.iter().filter(|g| matches!(g, GateDescriptor::NumberPhase { .. })).count();
        assert_eq!((bs, ph), (8, 8));
        let free = build_bose_hubbard(8, 1.0, 0.0, Boundary::Periodic).unwrap();
        for g in trotter_step_sequence(&free, 0.2, 3) {
            if let GateDescriptor::NumberPhase { table, .. } = g {
                assert!(table.iter().all(|&p| p == 0.0));
            }
        }
    }

    #[test]
    fn hamiltonian_entries() {
        let m = build_bose_hubbard(3, 1.0, 7.0, Boundary::Open).unwrap();
        let b = basis(3, &[0, 1, 2]);
        let h = exact_hamiltonian(&m, &b).unwrap();
        assert_eq!(h.matrix.get(0, 0).norm(), 0.0);
        let k = b.index_of(&[0, 2, 0]).unwrap();
        assert!((h.matrix.get(k, k).re - 7.0).abs() < 1e-15);
        assert!(h.is_hermitian(1e-14));
    }

    #[test]
    fn hamiltonian_matches_ladder_construction() {
        let m = build_fqh(2, 3, 0.8, 3.0, 1.0 / 3.0, Boundary::Periodic).unwrap();
        let b = basis(6, &[0, 1, 2, 3]);
        let mut acc = exact_hamiltonian(&m, &b).unwrap().scale(C64::new(-1.0, 0.0));
        for e in &m.edges {
            let bi = ladder_operator(&b, e.i, LadderKind::Annihilate).unwrap();
            let bjd = ladder_operator(&b, e.j, LadderKind::Create).unwrap();
            let term = bi.matmul(&bjd).unwrap().scale(e.hopping);
            acc = acc.add(&term).unwrap().add(&term.adjoint()).unwrap();
        }
        for s in 0..6 {
            let n = ladder_operator(&b, s, LadderKind::Number).unwrap();
            let n2 = n.matmul(&n).unwrap().sub(&n).unwrap().scale(C64::new(1.5, 0.0));
            acc = acc.add(&n2).unwrap();
        }
        // truncation drops hops out of the top sector in the ladder products only
        for (r, c, v) in acc.matrix.triplets() {
            if b.total(r) < 3 && b.total(c) < 3 {
                assert!(v.norm() < 1e-12, "{r} {c} {v}");
            }
        }
    }

    #[test]
    fn group_generators_sum_to_hopping() {
        let m = build_fqh(4, 4, 1.0, 0.0, 0.25, Boundary::Periodic).unwrap();
        let b = basis(16, &[2]);
        let full = hopping_hamiltonian(&m, &(0..m.edges.len()).collect::<Vec<_>>(), &b).unwrap();
        let mut acc = full.scale(C64::new(-1.0, 0.0));
        for g in m.edge_coloring().groups {
            acc = acc.add(&hopping_hamiltonian(&m, &g, &b).unwrap()).unwrap();
        }
        assert!(acc.matrix.max_abs() < 1e-14);
        assert!(full.sub(&exact_hamiltonian(&m, &b).unwrap()).unwrap().matrix.max_abs() < 1e-14);
    }
}
