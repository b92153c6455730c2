use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use photonsim_core::gates::sequence_unitary;
use photonsim_core::lattice::{build_bose_hubbard, compile_step, Boundary, LatticeModel};
use photonsim_core::spectral::{sector_spectrum, GroundSpace};
use photonsim_core::DensityMatrix;
use photonsim_dynamics::incoherent::{IncoherentParams, IncoherentProtocol, Phi2Convention};

fn chain() -> LatticeModel {
    build_bose_hubbard(2, 1.0, 3.0, Boundary::Open).unwrap()
}

fn random_state(d: usize, seed: u64) -> Array2<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = Array2::from_shape_fn((d, d), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let rho = a.dot(&a.t().mapv(|z| z.conj()));
    let tr: C64 = rho.diag().sum();
    rho / tr
}

#[test]
fn rejects_bad_refresh_probability() {
    assert!(IncoherentParams::new(0.1, 1.5, 0.25, 0.0, 0.0).is_err());
    assert!(IncoherentParams::new(0.1, -0.1, 0.25, 0.0, 0.0).is_err());
}

#[test]
fn oversized_joint_space_is_rejected() {
    let model = build_bose_hubbard(8, 1.0, 3.0, Boundary::Periodic).unwrap();
    let p = IncoherentParams::new(0.1, 0.01, 0.25, 0.0, 0.0).unwrap();
    let err = IncoherentProtocol::new(&model, p, 3, 3).unwrap_err();
    assert!(err.to_string().contains("exceeds"));
}

#[test]
fn full_refresh_resets_every_ancilla() {
    let p = IncoherentParams::new(0.7, 1.0, 0.25, 0.3, -0.2).unwrap();
    let proto = IncoherentProtocol::new(&chain(), p, 3, 3).unwrap();
    let rho = random_state(proto.dim(), 1);
    let out = proto.step(&rho);
    for i in 0..2 {
        let d = proto.ancilla_distribution(&out, i);
        assert!((d[1] - 1.0).abs() < 1e-12 && d[0].abs() < 1e-12 && d[2].abs() < 1e-12, "{d:?}");
    }
}

#[test]
fn decoupled_ancillas_leave_the_system_unitary() {
    let model = chain();
    let p = IncoherentParams::new(0.0, 0.0, 0.25, 0.4, 1.1).unwrap();
    let proto = IncoherentProtocol::new(&model, p, 3, 3).unwrap();
    let sys = random_state(proto.system.dim(), 2);
    let rho = proto.initial_state(&sys).unwrap();
    let out = proto.step(&rho);
    let u = sequence_unitary(&compile_step(&model, &proto.system, 0.25).unwrap(), proto.system.dim());
    let expect = u.dot(&sys).dot(&u.t().mapv(|z| z.conj()));
    assert!((&proto.system_state(&out) - &expect).iter().all(|z| z.norm() < 1e-12));
    for i in 0..2 {
        assert!((proto.ancilla_distribution(&out, i)[1] - 1.0).abs() < 1e-12);
    }
    // the joint state stays a product with the ancillas in |1 1⟩
    let again = proto.initial_state(&expect).unwrap();
    assert!((&out - &again).iter().all(|z| z.norm() < 1e-12));
}

#[test]
fn single_exchange_transfers_sin_squared() {
    // no hopping: on each site |0⟩_sys|1⟩_anc → cos θ |0,1⟩ + i sin θ |1,0⟩
    let model = build_bose_hubbard(2, 0.0, 0.0, Boundary::Open).unwrap();
    let theta: f64 = 0.3;
    let p = IncoherentParams::new(theta / 0.25, 0.0, 0.25, 0.0, 0.0).unwrap();
    let proto = IncoherentProtocol::new(&model, p, 3, 3).unwrap();
    let vac = DensityMatrix::vacuum(&proto.system).unwrap();
    let out = proto.step(&proto.initial_state(&vac.matrix).unwrap());
    let rec = proto.observe(&out, 1, None).unwrap();
    let (s2, c2) = (theta.sin().powi(2), theta.cos().powi(2));
    assert!((rec.populations[0] - c2 * c2).abs() < 1e-13);
    assert!((rec.populations[1] - 2.0 * s2 * c2).abs() < 1e-13);
    assert!((rec.populations[2] - s2 * s2).abs() < 1e-13);
    assert!((proto.ancilla_distribution(&out, 0)[0] - theta.sin().powi(2)).abs() < 1e-13);
}

#[test]
fn step_is_trace_preserving_and_positive() {
    let p = IncoherentParams::from_model(&chain(), 0.8, 0.1, 0.25, Phi2Convention::Stated).unwrap();
    let proto = IncoherentProtocol::new(&chain(), p, 3, 3).unwrap();
    for seed in 0..4 {
        let rho = random_state(proto.dim(), seed);
        let out = proto.step(&rho);
        let tr: C64 = out.diag().sum();
        assert!((tr - 1.0).norm() < 1e-9);
        let herm = (&out - &out.t().mapv(|z| z.conj())).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(herm < 1e-10);
        let h = (&out + &out.t().mapv(|z| z.conj())) * C64::new(0.5, 0.0);
        let (w, _) = photonsim_core::linalg::eigh(&h).unwrap();
        assert!(w.iter().cloned().fold(f64::INFINITY, f64::min) > -1e-8);
    }
}

#[test]
fn converged_populations_forget_the_initial_state() {
    let model = build_bose_hubbard(3, 1.0, 4.0, Boundary::Periodic).unwrap();
    let p = IncoherentParams::from_model(&model, 1.0, 0.2, 0.25, Phi2Convention::Resonant).unwrap();
    let proto = IncoherentProtocol::new(&model, p, 3, 2).unwrap();
    let (b2, spec) = sector_spectrum(&model, 0.25, 2).unwrap();
    let ground = GroundSpace::from_spectrum(b2, &spec).unwrap();
    let vac = DensityMatrix::vacuum(&proto.system).unwrap().matrix;
    let mut gs = Array2::zeros(vac.raw_dim());
    let r = proto.system.sector_range(2).unwrap();
    let psi = spec.eigenvectors.column(0);
    for (a, x) in r.clone().zip(psi.iter()) {
        for (b, y) in r.clone().zip(psi.iter()) {
            gs[(a, b)] = x * y.conj();
        }
    }
    let (_, from_vac) = proto.run(proto.initial_state(&vac).unwrap(), 400, 400, Some(&ground)).unwrap();
    let (_, from_gs) = proto.run(proto.initial_state(&gs).unwrap(), 400, 400, Some(&ground)).unwrap();
    let (a, b) = (from_vac.last().unwrap(), from_gs.last().unwrap());
    assert!((a.ground - b.ground).abs() < 0.02, "{a:?} {b:?}");
    for k in 0..4 {
        assert!((a.populations[k] - b.populations[k]).abs() < 0.02, "{a:?} {b:?}");
    }
}
