//! Jacobi theta functions with characteristics.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{invalid, Result};

/// ϑ[a,b](z|τ) = Σ_n exp(iπτ(n+a)² + 2πi(n+a)(z+b)).
///
/// The series is summed outward from its largest term until both tails drop
/// below 1e−17 of the running maximum.
pub fn jacobi_theta(a: f64, b: f64, z: C64, tau: C64) -> Result<C64> {
    if tau.im <= 0.0 {
        return invalid(format!("theta needs Im(tau) > 0, got {}", tau.im));
    }
    let i = C64::i();
    let term = |n: i64| {
        let m = n as f64 + a;
        (i * PI * tau * m * m + 2.0 * i * PI * m * (z + b)).exp()
    };
    let center = (-a - z.im / tau.im).round() as i64;
    let mut sum = term(center);
    let mut peak = sum.norm();
    for dir in [1i64, -1] {
        let mut n = center;
        loop {
            n += dir;
            let t = term(n);
            sum += t;
            peak = peak.max(t.norm());
            // terms are Gaussian in n past the peak, so once small they stay small
            if (n - center).abs() > 2 && t.norm() <= 1e-17 * peak {
                break;
            }
        }
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(a: f64, b: f64, z: C64, tau: C64) -> C64 {
        (-60..=60)
            .map(|n| {
                let m = n as f64 + a;
                (C64::i() * PI * tau * m * m + 2.0 * C64::i() * PI * m * (z + b)).exp()
            })
            .sum()
    }

    #[test]
    fn odd_theta_vanishes_at_origin() {
        let v = jacobi_theta(0.5, 0.5, C64::new(0.0, 0.0), C64::i()).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert!(jacobi_theta(0.0, 0.0, C64::new(0.0, 0.0), C64::new(0.0, -1.0)).is_err());
    }

    #[test]
    fn product_formula_for_theta3() {
        // ϑ[0,0](0|i) = π^{1/4} / Γ(3/4)
        let v = jacobi_theta(0.0, 0.0, C64::new(0.0, 0.0), C64::i()).unwrap();
        assert!((v.re - 1.086_434_811_213_308).abs() < 1e-14);
        assert!(v.im.abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn odd_and_quasi_periodic(x in -2.0f64..2.0, y in -1.5f64..1.5) {
            let z = C64::new(x, y);
            let f = |z| jacobi_theta(0.5, 0.5, z, C64::i()).unwrap();
            let scale = f(z).norm().max(1.0);
            prop_assert!((f(-z) + f(z)).norm() < 1e-12 * scale);
            prop_assert!((f(z + 1.0) + f(z)).norm() < 1e-12 * scale);
        }

        #[test]
        fn matches_fixed_window_sum(a in -1.0f64..1.0, b in -1.0f64..1.0, x in -3.0f64..3.0,
                                    y in -3.0f64..3.0, t in 0.5f64..3.0) {
            let z = C64::new(x, y);
            let tau = C64::new(0.3, t);
            let fast = jacobi_theta(a, b, z, tau).unwrap();
            let slow = naive(a, b, z, tau);
            prop_assert!((fast - slow).norm() < 1e-11 * slow.norm().max(1.0));
        }
    }
}
