//! Normalized single-bin pulse envelopes u(t) on [0, 1].

use crate::quadrature::gauss_legendre;
use crate::{Error, Result};

/// Minimum number of samples for a custom envelope.
pub const MIN_GRID_POINTS: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Square,
    Bump,
    /// Samples at t_i = i/(n−1), interpolated by local cubics.
    Samples(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseShape {
    kind: Kind,
    scale: f64,
}

impl PulseShape {
    pub fn square() -> Self {
        Self { kind: Kind::Square, scale: 1.0 }
    }

    /// ∝ exp(−0.25 / (0.25 − (t − 0.5)²)).
    pub fn bump() -> Self {
        let mut p = Self { kind: Kind::Bump, scale: 1.0 };
        p.scale = 1.0 / p.raw_norm().sqrt();
        p
    }

    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        if samples.len() < MIN_GRID_POINTS {
            return Err(Error::InvalidPulse(format!("need at least {MIN_GRID_POINTS} samples, got {}", samples.len())));
        }
        if samples.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidPulse("samples must be finite and nonnegative".into()));
        }
        let mut p = Self { kind: Kind::Samples(samples), scale: 1.0 };
        let n = p.raw_norm();
        if !(n > 0.0) {
            return Err(Error::InvalidPulse("pulse has zero norm".into()));
        }
        p.scale = 1.0 / n.sqrt();
        Ok(p)
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            Kind::Square => "square",
            Kind::Bump => "bump",
            Kind::Samples(_) => "custom",
        }
    }

    /// u(t), zero outside [0, 1].
    pub fn eval(&self, t: f64) -> f64 {
        if !(0.0..=1.0).contains(&t) {
            return 0.0;
        }
        self.scale * self.raw(t)
    }

    fn raw(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Square => 1.0,
            Kind::Bump => {
                let d = 0.25 - (t - 0.5) * (t - 0.5);
                if d <= 0.0 {
                    0.0
                } else {
                    (-0.25 / d).exp()
                }
            }
            Kind::Samples(s) => cubic(s, t),
        }
    }

    fn raw_norm(&self) -> f64 {
        let (x, w) = gauss_legendre(12);
        let panels = 4096;
        let h = 1.0 / panels as f64;
        (0..panels)
            .map(|p| x.iter().zip(&w).map(|(x, w)| w * h * self.raw((p as f64 + x) * h).powi(2)).sum::<f64>())
            .sum()
    }

    /// ∫|u|² under the default composite rule.
    pub fn norm(&self) -> f64 {
        self.raw_norm() * self.scale * self.scale
    }

    /// max u on a fine grid.
    pub fn max_value(&self) -> f64 {
        (0..=20000).map(|i| self.eval(i as f64 / 20000.0)).fold(0.0, f64::max)
    }

    /// Largest finite-difference slope on a fine grid (jumps at the bin edges
    /// are not counted).
    pub fn lipschitz(&self) -> f64 {
        let n = 20000;
        (0..n)
            .map(|i| {
                let (a, b) = (i as f64 / n as f64, (i + 1) as f64 / n as f64);
                (self.eval(b) - self.eval(a)).abs() * n as f64
            })
            .fold(0.0, f64::max)
    }
}

/// Four-point Lagrange interpolation on a uniform grid over [0, 1].
fn cubic(s: &[f64], t: f64) -> f64 {
    let n = s.len();
    let x = t * (n - 1) as f64;
    let i = (x.floor() as usize).min(n - 2);
    let lo = i.saturating_sub(1).min(n - 4);
    let f = x - lo as f64;
    let y = &s[lo..lo + 4];
    let l0 = -(f - 1.0) * (f - 2.0) * (f - 3.0) / 6.0;
    let l1 = f * (f - 2.0) * (f - 3.0) / 2.0;
    let l2 = -f * (f - 1.0) * (f - 3.0) / 2.0;
    let l3 = f * (f - 1.0) * (f - 2.0) / 6.0;
    y[0] * l0 + y[1] * l1 + y[2] * l2 + y[3] * l3
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_are_normalized() {
        for p in [PulseShape::square(), PulseShape::bump()] {
            assert!((p.norm() - 1.0).abs() < 1e-10, "{}", p.name());
            assert_eq!(p.eval(-0.1), 0.0);
            assert_eq!(p.eval(1.1), 0.0);
        }
        let samples: Vec<f64> = (0..2048).map(|i| (std::f64::consts::PI * i as f64 / 2047.0).sin()).collect();
        let p = PulseShape::from_samples(samples).unwrap();
        assert!((p.norm() - 1.0).abs() < 1e-10);
        // normalized sin(πt) is √2 sin(πt)
        assert!((p.eval(0.3) - 2f64.sqrt() * (0.3 * std::f64::consts::PI).sin()).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(PulseShape::from_samples(vec![1.0; 10]).is_err());
        assert!(PulseShape::from_samples(vec![0.0; 2000]).is_err());
        let mut s = vec![1.0; 2000];
        s[3] = -1.0;
        assert!(PulseShape::from_samples(s).is_err());
    }

    #[test]
    fn bump_is_symmetric_and_peaked() {
        let p = PulseShape::bump();
        assert!((p.eval(0.2) - p.eval(0.8)).abs() < 1e-14);
        assert!((p.max_value() - p.eval(0.5)).abs() < 1e-12);
        assert_eq!(p.eval(0.0), 0.0);
    }
}
