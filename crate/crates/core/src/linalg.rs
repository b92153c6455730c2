//! Dense helpers on top of LAPACK.

use ndarray::{Array1, Array2, ShapeBuilder};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Hermitian eigendecomposition with eigenvectors as columns.
///
/// The input is copied into column-major storage first: handing LAPACK a
/// row-major complex matrix makes it decompose the transpose, whose
/// eigenvectors are the complex conjugates of the ones wanted.
pub fn eigh(m: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let mut f = Array2::<C64>::zeros(m.raw_dim().f());
    f.assign(m);
    f.eigh(UPLO::Lower).map_err(|e| Error::Linalg(e.to_string()))
}

/// `V f(w) V†` for the Hermitian eigendecomposition of `m`.
pub fn hermitian_function(m: &Array2<C64>, f: impl Fn(f64) -> C64) -> Result<Array2<C64>> {
    let (w, v) = eigh(m)?;
    let mut vd = v.clone();
    for (k, &x) in w.iter().enumerate() {
        let s = f(x);
        vd.column_mut(k).mapv_inplace(|z| z * s);
    }
    Ok(vd.dot(&v.t().mapv(|z| z.conj())))
}

/// Matrix exponential by scaling and squaring of a Taylor series.
pub fn expm(m: &Array2<C64>) -> Array2<C64> {
    let norm = m.rows().into_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let a = m.mapv(|z| z / 2f64.powi(squarings));
    let n = m.nrows();
    let mut out = Array2::<C64>::eye(n);
    let mut term = Array2::<C64>::eye(n);
    for k in 1..30 {
        term = term.dot(&a).mapv(|z| z / k as f64);
        out += &term;
        if term.iter().all(|z| z.norm() < 1e-18) {
            break;
        }
    }
    for _ in 0..squarings {
        out = out.dot(&out);
    }
    out
}
