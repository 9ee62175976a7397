//! Orthonormal bases and the wide least-squares solve used by the compressor.

use crate::error::{HbsError, Result};
use crate::flops;
use crate::linalg::matrix::DenseMatrix;
use crate::linalg::qr::HouseholderQr;
use crate::linalg::triangular::{solve_triangular, Diag, Triangle};
use crate::linalg::matrix::Op;
use crate::scalar::Scalar;

/// `k` orthonormal columns spanning the leading column space of `b`.
///
/// Computed from an unpivoted QR of the first `k` columns, which is reliable
/// for the random-derived matrices this is applied to.
pub fn col<T: Scalar>(b: &DenseMatrix<T>, k: usize) -> Result<DenseMatrix<T>> {
    let (m, n) = b.shape();
    if k > m.min(n) {
        return Err(HbsError::Dimension(format!(
            "col: cannot extract {k} columns from a {m}x{n} matrix"
        )));
    }
    let qr = HouseholderQr::new(b.col_block(0..k));
    let q = qr.q_columns(0..k);

    if cfg!(debug_assertions) {
        flops::uncounted(|| {
            let defect = q.t_matmul(&q).sub(&DenseMatrix::identity(k)).norm_fro();
            let tol = T::epsilon() * T::lit(1e3) * T::lit((k.max(1)) as f64);
            debug_assert!(defect <= tol, "col: basis lost orthogonality ({defect:?})");
        });
    }
    Ok(q)
}

/// `k` orthonormal columns in the nullspace of the wide matrix `b`.
///
/// These are the trailing `k` columns of the full `Q` from a QR of `b^T`.
pub fn nullspace<T: Scalar>(b: &DenseMatrix<T>, k: usize) -> Result<DenseMatrix<T>> {
    let (m, n) = b.shape();
    if k > n.saturating_sub(m) {
        return Err(HbsError::Dimension(format!(
            "nullspace: a {m}x{n} matrix only guarantees {} null directions, {k} requested",
            n.saturating_sub(m)
        )));
    }
    let qr = HouseholderQr::new(b.transpose());
    Ok(qr.q_columns(n - k..n))
}

/// Minimum-norm `X` minimising `||X M - B||_F` for a wide, full-row-rank `M`.
///
/// Uses a column-pivoted QR of `M^T`. A diagonal entry of `R` below
/// `tol * |R[0,0]|` is reported as an ill-conditioned probe.
pub fn lstsq_right<T: Scalar>(b: &DenseMatrix<T>, m: &DenseMatrix<T>, tol: T) -> Result<DenseMatrix<T>> {
    let (p, s) = m.shape();
    if p > s {
        return Err(HbsError::Dimension(format!(
            "lstsq_right: probe matrix is {p}x{s}, expected at least as many columns as rows"
        )));
    }
    if b.cols() != s {
        return Err(HbsError::Dimension(format!(
            "lstsq_right: right-hand side has {} columns, probe has {s}",
            b.cols()
        )));
    }
    let q = b.rows();
    if p == 0 {
        return Ok(DenseMatrix::zeros(q, 0));
    }

    let qr = HouseholderQr::with_column_pivoting(m.transpose());
    let diag = qr.r_diagonal();
    let lead = diag[0].abs();
    let weakest = diag[p - 1].abs();
    if !(lead > T::zero()) || weakest <= tol * lead {
        let ratio = if lead > T::zero() { (weakest / lead).as_f64() } else { 0.0 };
        return Err(HbsError::IllConditioned {
            node: None,
            level: None,
            ratio,
        });
    }

    // Q^T B^T, keep the leading p rows: Q_thin^T B^T.
    let mut g = b.transpose();
    qr.apply_qt(&mut g);
    let mut w_t = g.row_block(0..p);
    let r = qr.r().col_block(0..p);
    solve_triangular(&r, Triangle::Upper, Op::N, Diag::NonUnit, &mut w_t);

    // Undo the pivoting: X[:, perm[j]] = W[:, j].
    let perm = qr.permutation();
    let mut x = DenseMatrix::zeros(q, p);
    for j in 0..p {
        for i in 0..q {
            x[(i, perm[j])] = w_t[(j, i)];
        }
    }
    Ok(x)
}
