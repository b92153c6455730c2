//! Gauss–Legendre rules and the panel weights for exponential-kernel
//! convolutions built on them.

use std::f64::consts::PI;

/// Nodes and weights of the n-point Gauss–Legendre rule on [0, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        dp = if d != 0.0 { d } else { dp };
        // map [-1, 1] → [0, 1], ascending
        x[n - 1 - i] = 0.5 * (z + 1.0);
        w[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// P_n(z) and P_n'(z).
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Lagrange basis through `nodes`, evaluated at `x`.
pub fn lagrange_basis(nodes: &[f64], x: f64) -> Vec<f64> {
    nodes
        .iter()
        .enumerate()
        .map(|(k, &xk)| {
            nodes.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &xj)| (x - xj) / (xk - xj)).product()
        })
        .collect()
}

/// Weights for ∫₀^{ξ_j} e^{−μ(ξ_j − ξ)} p(ξ) dξ on the reference panel
/// [0, 1], where p interpolates values at the panel nodes. Row `j` targets
/// node `j`; the extra last row targets the panel end ξ = 1.
pub fn kernel_weights(nodes: &[f64], mu: f64, sub: &(Vec<f64>, Vec<f64>)) -> Vec<Vec<f64>> {
    let targets: Vec<f64> = nodes.iter().copied().chain(std::iter::once(1.0)).collect();
    targets
        .iter()
        .map(|&xi| {
            let mut row = vec![0.0; nodes.len()];
            for (s, ws) in sub.0.iter().zip(&sub.1) {
                let t = s * xi;
                let k = (-mu * (xi - t)).exp() * ws * xi;
                for (r, l) in row.iter_mut().zip(lagrange_basis(nodes, t)) {
                    *r += k * l;
                }
            }
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(6);
        for p in 0..12 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
            assert!((q - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "degree {p}");
        }
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn kernel_weights_match_exponential_moments() {
        let (x, _) = gauss_legendre(8);
        let sub = gauss_legendre(32);
        let mu = 0.7;
        let w = kernel_weights(&x, mu, &sub);
        // f = 1: ∫₀^ξ e^{−μ(ξ−s)} ds = (1 − e^{−μξ})/μ
        for (j, &xi) in x.iter().chain(std::iter::once(&1.0)).enumerate() {
            let s: f64 = w[j].iter().sum();
            assert!((s - (1.0 - (-mu * xi).exp()) / mu).abs() < 1e-14);
        }
    }
}
