//! Restarted GMRES for complex linear operators given as closures.

use num_complex::Complex64 as C64;

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<C64>,
    pub matvecs: usize,
    /// ‖b − Ax‖ / ‖b‖ as tracked by the Givens recurrence.
    pub relative_residual: f64,
    pub converged: bool,
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dotc(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

/// Solves `A x = b` starting from zero.
pub fn gmres(
    mut op: impl FnMut(&[C64]) -> Vec<C64>,
    b: &[C64],
    restart: usize,
    tol: f64,
    max_matvecs: usize,
) -> GmresOutcome {
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![C64::default(); n];
    if bnorm == 0.0 {
        return GmresOutcome { x, matvecs: 0, relative_residual: 0.0, converged: true };
    }
    let restart = restart.max(1);
    let mut matvecs = 0;
    let mut rel: f64;
    let mut first = true;
    loop {
        let r: Vec<C64> = if first {
            b.to_vec()
        } else {
            let ax = op(&x);
            matvecs += 1;
            b.iter().zip(&ax).map(|(p, q)| p - q).collect()
        };
        first = false;
        let beta = norm(&r);
        rel = beta / bnorm;
        if rel < tol || matvecs >= max_matvecs {
            break;
        }
        let mut basis: Vec<Vec<C64>> = vec![r.iter().map(|z| z / beta).collect()];
        let mut h: Vec<Vec<C64>> = Vec::new();
        let mut cs: Vec<f64> = Vec::new();
        let mut sn: Vec<C64> = Vec::new();
        let mut g = vec![C64::new(beta, 0.0)];
        for j in 0..restart {
            let mut w = op(&basis[j]);
            matvecs += 1;
            let mut col = vec![C64::default(); j + 2];
            for _ in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let c = dotc(v, &w);
                    col[i] += c;
                    axpy(&mut w, -c, v);
                }
            }
            let wn = norm(&w);
            col[j + 1] = C64::new(wn, 0.0);
            for i in 0..j {
                let (a, bb) = (col[i], col[i + 1]);
                col[i] = cs[i] * a + sn[i] * bb;
                col[i + 1] = -sn[i].conj() * a + cs[i] * bb;
            }
            let (a, bb) = (col[j], col[j + 1]);
            let rr = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            let (c, s) = if a.norm() == 0.0 { (0.0, C64::new(1.0, 0.0)) } else { (a.norm() / rr, (a / a.norm()) * bb.conj() / rr) };
            col[j] = c * a + s * bb;
            col[j + 1] = C64::default();
            cs.push(c);
            sn.push(s);
            let gj = g[j];
            g[j] = c * gj;
            g.push(-s.conj() * gj);
            h.push(col);
            rel = g[j + 1].norm() / bnorm;
            if wn > 0.0 {
                basis.push(w.iter().map(|z| z / wn).collect());
            }
            if rel < tol || matvecs >= max_matvecs || wn == 0.0 {
                break;
            }
        }
        let m = h.len();
        let mut y = vec![C64::default(); m];
        for i in (0..m).rev() {
            let mut s = g[i];
            for k in i + 1..m {
                s -= h[k][i] * y[k];
            }
            y[i] = s / h[i][i];
        }
        for (k, yk) in y.iter().enumerate() {
            axpy(&mut x, *yk, &basis[k]);
        }
        if rel < tol || matvecs >= max_matvecs {
            break;
        }
    }
    GmresOutcome { x, matvecs, relative_residual: rel, converged: rel < tol }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn solves_dense_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 30;
        let a: Vec<Vec<C64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let d = if i == j { 4.0 } else { 0.0 };
                        C64::new(d + rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3))
                    })
                    .collect()
            })
            .collect();
        let mul = |x: &[C64]| a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect::<Vec<C64>>();
        let b: Vec<C64> = (0..n).map(|_| C64::new(rng.gen(), rng.gen())).collect();
        for restart in [5, 40] {
            let out = gmres(mul, &b, restart, 1e-12, 1000);
            assert!(out.converged);
            let ax = mul(&out.x);
            let err: f64 = ax.iter().zip(&b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
            assert!(err < 1e-10 * norm(&b), "restart {restart}: {err}");
        }
    }

    #[test]
    fn zero_rhs() {
        let out = gmres(|x: &[C64]| x.to_vec(), &[C64::default(); 3], 5, 1e-12, 10);
        assert_eq!(out.matvecs, 0);
        assert!(out.x.iter().all(|z| *z == C64::default()));
    }
}
