use num_complex::Complex64 as C64;

use photonsim_core::{Error, Result};

/// Circuit parameters of the drive/dissipation channel together with the
/// master-equation parameters they emulate: α*K = F, γδt = (Kδt)², Φ = Ωδt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveDissParams {
    /// Beamsplitter rate K.
    pub k: f64,
    /// Coherent amplitude of the ancilla.
    pub alpha: C64,
    /// Drive frequency Ω.
    pub omega: f64,
    pub delta_t: f64,
}

impl DriveDissParams {
    pub fn new(k: f64, alpha: C64, omega: f64, delta_t: f64) -> Result<Self> {
        if !(delta_t > 0.0) || !k.is_finite() || k < 0.0 || !alpha.re.is_finite() || !alpha.im.is_finite() || !omega.is_finite() {
            return Err(Error::InvalidArgument(format!("bad drive parameters k={k} alpha={alpha} omega={omega} dt={delta_t}")));
        }
        Ok(Self { k, alpha, omega, delta_t })
    }

    /// From drive amplitude F, frequency Ω and loss rate γ.
    pub fn from_physical(f: C64, omega: f64, gamma: f64, delta_t: f64) -> Result<Self> {
        if gamma <= 0.0 {
            return Err(Error::InvalidArgument("loss rate must be positive".into()));
        }
        let k = (gamma / delta_t).sqrt();
        Self::new(k, (f / k).conj(), omega, delta_t)
    }

    /// From Kδt and the ratio α*/(Kδt).
    pub fn from_ratio(k_dt: f64, alpha_ratio: C64, omega: f64, delta_t: f64) -> Result<Self> {
        Self::new(k_dt / delta_t, (alpha_ratio * k_dt).conj(), omega, delta_t)
    }

    pub fn zero(delta_t: f64) -> Self {
        Self { k: 0.0, alpha: C64::default(), omega: 0.0, delta_t }
    }

    /// F = α*K.
    pub fn drive(&self) -> C64 {
        self.alpha.conj() * self.k
    }

    /// γ = K²δt.
    pub fn gamma(&self) -> f64 {
        self.k * self.k * self.delta_t
    }

    /// Φ = Ωδt.
    pub fn phase(&self) -> f64 {
        self.omega * self.delta_t
    }

    pub fn k_dt(&self) -> f64 {
        self.k * self.delta_t
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }
}
