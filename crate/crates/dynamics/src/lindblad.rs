//! Dense Lindblad generators on a single truncated mode, used as an
//! independent reference for the ancilla-based channel.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use photonsim_core::linalg::expm;

fn lowering(levels: usize) -> Array2<C64> {
    let mut b = Array2::zeros((levels, levels));
    for n in 1..levels {
        b[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    b
}

fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (p, q) = (a.nrows(), b.nrows());
    let mut out = Array2::zeros((p * q, p * q));
    for ((i, j), x) in a.indexed_iter() {
        for ((k, l), y) in b.indexed_iter() {
            out[(i * q + k, j * q + l)] = x * y;
        }
    }
    out
}

/// Superoperator of −i[Fb + F*b† − Ω b†b, ρ] + γ(bρb† − ½{b†b, ρ}) acting on
/// row-major vectorized ρ (vec(AρB) = (A ⊗ Bᵀ) vec ρ).
pub fn drive_loss_generator(levels: usize, f: C64, omega: f64, gamma: f64) -> Array2<C64> {
    let b = lowering(levels);
    let bd = b.t().mapv(|z| z.conj());
    let n = bd.dot(&b);
    let h = b.mapv(|z| z * f) + bd.mapv(|z| z * f.conj()) - n.mapv(|z| z * omega);
    let id = Array2::<C64>::eye(levels);
    let i = C64::new(0.0, 1.0);
    let mut l = (kron(&h, &id) - kron(&id, &h.t().to_owned())).mapv(|z| -i * z);
    l += &kron(&b, &b.mapv(|z| z.conj())).mapv(|z| z * gamma);
    l -= &(kron(&n, &id) + kron(&id, &n.t().to_owned())).mapv(|z| z * 0.5 * gamma);
    l
}

/// exp(L t) applied to ρ.
pub fn propagate(generator: &Array2<C64>, rho: &Array2<C64>, t: f64) -> Array2<C64> {
    let d = rho.nrows();
    let e = expm(&generator.mapv(|z| z * t));
    let v = rho.as_standard_layout().into_owned().into_shape_with_order(d * d).expect("square");
    e.dot(&v).into_shape_with_order((d, d)).expect("square")
}

/// L[ρ] for a vectorized generator.
pub fn generator_action(generator: &Array2<C64>, rho: &Array2<C64>) -> Array2<C64> {
    let d = rho.nrows();
    let v = rho.as_standard_layout().into_owned().into_shape_with_order(d * d).expect("square");
    generator.dot(&v).into_shape_with_order((d, d)).expect("square")
}
