//! Failure probabilities and subtraction fidelities built on [`SubtractionDerived`].
//!
//! Every nested time integral is reduced to a chain of one-dimensional
//! exponential convolutions, so the cost is linear in the grid size even
//! for the two-photon correlator and the two-layer overlap.

use crate::derived::SubtractionDerived;
use crate::pulse::PulseShape;
use crate::{Error, Result};

/// ∫₀^∞ |u − ũ|², with the tail past t = 1 in closed form.
pub fn p_fail_k1(d: &SubtractionDerived) -> f64 {
    let a2: Vec<f64> = d.u.iter().zip(&d.u_tilde).map(|(u, ut)| (u - ut).powi(2)).collect();
    d.grid.integrate(&a2) + d.u_tilde_end.powi(2) / (4.0 * d.gamma)
}

/// ∫∫_{0≤t≤s} |C(t, s)|² for the two-photon output correlator
/// C/√2 = a(t)a(s) − ũ(t)² e^{−2γ(s−t)}, a = u − ũ.
pub fn p_fail_k2(d: &SubtractionDerived) -> f64 {
    let g2 = 2.0 * d.gamma;
    let g4 = 4.0 * d.gamma;
    let u1 = d.u_tilde_end;
    let a: Vec<f64> = d.u.iter().zip(&d.u_tilde).map(|(u, ut)| u - ut).collect();
    let p1 = p_fail_k1(d);

    // h(t) = ∫ₜ^∞ a(s) e^{−2γ(s−t)} ds
    let (mut h, _) = d.grid.backward(&a, g2);
    for (hi, t) in h.iter_mut().zip(&d.grid.t) {
        *hi -= (-g2 * (1.0 - t)).exp() * u1 / g4;
    }
    let cross: Vec<f64> = (0..a.len()).map(|i| a[i] * d.u_tilde[i].powi(2) * h[i]).collect();
    let t2 = -2.0 * d.grid.integrate(&cross) - u1.powi(4) / (16.0 * d.gamma * d.gamma);

    let q: Vec<f64> = d.u_tilde.iter().map(|v| v.powi(4)).collect();
    let t3 = d.grid.integrate(&q) / g4 + u1.powi(4) / (32.0 * d.gamma * d.gamma);

    2.0 * (0.5 * p1 * p1 + t2 + t3)
}

fn check_k(k: u32, min: u32) -> Result<()> {
    if k < min {
        Err(Error::PhotonNumber { k, min })
    } else {
        Ok(())
    }
}

/// |k ∫₀¹ ũ u G^{k−1}|².
pub fn f_sub_single(d: &SubtractionDerived, k: u32) -> Result<f64> {
    check_k(k, 1)?;
    let f: Vec<f64> = (0..d.u.len()).map(|i| d.u_tilde[i] * d.u[i] * d.g_tail[i].powi(k as i32 - 1)).collect();
    Ok((k as f64 * d.grid.integrate(&f)).powi(2))
}

/// Two-layer overlap
/// |k(k−1) ∫∫_{t₁≤t₂} [ũ(t₁)ũ(t₂,t₁) + ½w̃(t₁)e^{−2γ(t₂−t₁)}] u(t₁)u(t₂) G(t₂)^{k−2}|².
///
/// The inner t₁ integral is 2γ·conv(uF) + ½conv(w̃u) at rate 2γ with
/// F(T) = ∫₀ᵀ ũu, since ũ(t₂,t₁) = ∫_{t₁}^{t₂} 2γ e^{−2γ(t₂−T)} u(T) dT.
pub fn f_sub_double(d: &SubtractionDerived, k: u32) -> Result<f64> {
    check_k(k, 2)?;
    let g2 = 2.0 * d.gamma;
    let n = d.u.len();
    let uu: Vec<f64> = (0..n).map(|i| d.u_tilde[i] * d.u[i]).collect();
    let (big_f, _) = d.grid.forward(&uu, 0.0);
    let src: Vec<f64> = (0..n).map(|i| d.u[i] * (g2 * big_f[i] + 0.5 * d.w_tilde[i])).collect();
    let (inner, _) = d.grid.forward(&src, g2);
    let f: Vec<f64> = (0..n).map(|i| d.u[i] * d.g_tail[i].powi(k as i32 - 2) * inner[i]).collect();
    let kk = (k * (k - 1)) as f64;
    Ok((kk * d.grid.integrate(&f)).powi(2))
}

/// Square-pulse closed form of 1 − F_sub for a single layer, k = 1.
pub fn square_infidelity_k1(gamma: f64) -> f64 {
    let e = -(-2.0 * gamma).exp_m1();
    e / gamma * (1.0 - e / (4.0 * gamma))
}

/// Square-pulse closed form of 1 − F_sub for a single layer, k = 2.
pub fn square_infidelity_k2(gamma: f64) -> f64 {
    let e = -(-2.0 * gamma).exp_m1();
    2.0 / gamma * (1.0 - e / (2.0 * gamma)) * (1.0 - 1.0 / (2.0 * gamma) + e / (4.0 * gamma * gamma))
}

/// Coupling above which p_fail(k = 1) < 4ε for a pulse with peak `m` and
/// Lipschitz constant `lip`.
pub fn gamma_threshold(eps: f64, m: f64, lip: f64) -> f64 {
    let smooth = if lip > 0.0 { lip / (2.0 * eps) * (m / eps).ln().max(0.0) } else { 0.0 };
    smooth.max(2.0 * m).max(m * m / (4.0 * eps))
}

/// [`gamma_threshold`] with peak and slope measured from the pulse.
pub fn pulse_gamma_threshold(pulse: &PulseShape, eps: f64) -> f64 {
    gamma_threshold(eps, pulse.max_value(), pulse.lipschitz())
}

/// 2p(1 − p)(1 − cos δφ).
pub fn gate_infidelity(p_fail: f64, dphi: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_fail) {
        return Err(Error::Probability(format!("p_fail = {p_fail} outside [0, 1]")));
    }
    Ok(2.0 * p_fail * (1.0 - p_fail) * (1.0 - dphi.cos()))
}

/// |p₁e^{i[(φ₁−φ₃)+(φ₂−φ₃)]} + p₂e^{i(φ₂−φ₃)} + p₃e^{i(φ₁−φ₃)} + p₄|².
pub fn gate_fidelity_two_layer(p: [f64; 4], phi1: f64, phi2: f64, phi3: f64) -> Result<f64> {
    if p.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::Probability(format!("probabilities {p:?} outside [0, 1]")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Probability(format!("probabilities sum to {sum}")));
    }
    let terms = [(p[0], (phi1 - phi3) + (phi2 - phi3)), (p[1], phi2 - phi3), (p[2], phi1 - phi3), (p[3], 0.0)];
    let re: f64 = terms.iter().map(|(w, a)| w * a.cos()).sum();
    let im: f64 = terms.iter().map(|(w, a)| w * a.sin()).sum();
    Ok(re * re + im * im)
}

/// 1 − F_gate for the two-layer cascade.
pub fn gate_infidelity_two_layer(p: [f64; 4], phi1: f64, phi2: f64, phi3: f64) -> Result<f64> {
    Ok(1.0 - gate_fidelity_two_layer(p, phi1, phi2, phi3)?)
}
