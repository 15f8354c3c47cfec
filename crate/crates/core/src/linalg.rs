//! Dense complex helpers on top of `faer`.
//!
//! All log-determinants here are base 2 and go through a Cholesky factor of
//! a Hermitian positive-definite matrix. A failed factorization is reported
//! as [`Error::Numerical`]; nothing is regularized.

use faer::linalg::matmul::triangular::{self, BlockStructure};
use faer::{c64, Accum, Mat, MatRef, Par, Side};

use crate::error::{Error, Result};

pub type CMat = Mat<c64>;

/// `log2 det(A)` for Hermitian positive-definite `A`.
pub fn logdet2_hpd(a: MatRef<'_, c64>) -> Result<f64> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "log-det of a {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.nrows() == 0 {
        return Ok(0.0);
    }
    let llt = a
        .llt(Side::Lower)
        .map_err(|e| Error::Numerical(format!("Cholesky factorization failed: {e:?}")))?;
    let l = llt.L();
    let mut acc = 0.0;
    for i in 0..l.nrows() {
        acc += l[(i, i)].re.ln();
    }
    Ok(2.0 * acc / std::f64::consts::LN_2)
}

/// `scale * G G^H` as a full Hermitian matrix.
///
/// Only the lower triangle is multiplied; the upper one is mirrored.
pub fn gram(g: MatRef<'_, c64>, scale: f64) -> CMat {
    let n = g.nrows();
    let mut out = Mat::<c64>::zeros(n, n);
    accumulate_gram(out.as_mut(), g, scale);
    out
}

/// `dst += scale * G G^H`, with `dst` Hermitian.
pub fn accumulate_gram(mut dst: faer::MatMut<'_, c64>, g: MatRef<'_, c64>, scale: f64) {
    let n = g.nrows();
    assert_eq!(dst.nrows(), n);
    assert_eq!(dst.ncols(), n);
    if g.ncols() == 0 || n == 0 {
        return;
    }
    triangular::matmul(
        dst.as_mut(),
        BlockStructure::TriangularLower,
        Accum::Add,
        g,
        BlockStructure::Rectangular,
        g.adjoint(),
        BlockStructure::Rectangular,
        c64::new(scale, 0.0),
        Par::Seq,
    );
    for j in 0..n {
        dst[(j, j)].im = 0.0;
        for i in 0..j {
            dst[(i, j)] = dst[(j, i)].conj();
        }
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: MatRef<'_, c64>) -> Result<Vec<f64>> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    a.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigendecomposition failed: {e:?}")))
}

/// Singular values, descending.
pub fn singular_values(a: MatRef<'_, c64>) -> Result<Vec<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    a.singular_values()
        .map_err(|e| Error::Numerical(format!("SVD failed: {e:?}")))
}

pub fn identity(n: usize) -> CMat {
    Mat::from_fn(n, n, |i, j| {
        if i == j {
            c64::new(1.0, 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    })
}

/// Largest entry-wise deviation from Hermitian symmetry, relative to the
/// largest entry.
pub fn hermitian_defect(a: MatRef<'_, c64>) -> f64 {
    let mut scale = 0.0f64;
    let mut defect = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            scale = scale.max(a[(i, j)].norm());
            defect = defect.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        defect / scale
    }
}
