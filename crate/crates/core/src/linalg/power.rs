//! Spectral-norm estimation by power iteration on the Gram operator.
//!
//! The estimate `||E x_k||` with `||x_k|| = 1` never exceeds `||E||`, so both
//! the numerator and the denominator of a relative error are lower bounds
//! (up to roundoff).

use crate::error::{HbsError, Result};
use crate::linalg::matrix::{norm2, DenseMatrix};
use crate::linalg::operator::LinearOperator;
use crate::linalg::random::{gaussian_matrix, stream, RngSeed};
use crate::scalar::Scalar;

/// Iteration count used for reported errors.
pub const DEFAULT_POWER_ITERS: usize = 20;

const MAX_RESTARTS: u64 = 8;

/// Estimates `||op||_2` with `iters` applications of `op` (and `iters - 1` of its transpose).
pub fn spectral_norm_estimate<T: Scalar>(
    op: &dyn LinearOperator<T>,
    iters: usize,
    seed: RngSeed,
) -> Result<T> {
    if iters == 0 {
        return Err(HbsError::Config("power method needs at least one iteration".into()));
    }
    let n = op.dim();
    if n == 0 {
        return Ok(T::zero());
    }
    let mut x = start_vector::<T>(n, seed)?;
    let mut estimate = T::zero();
    for it in 0..iters {
        let y = op.apply_block(&x);
        estimate = norm2(y.as_slice());
        if estimate == T::zero() || it + 1 == iters {
            break;
        }
        let mut z = op.apply_transpose_block(&y);
        let zn = norm2(z.as_slice());
        if zn == T::zero() {
            break;
        }
        z.scale(T::one() / zn);
        x = z;
    }
    Ok(estimate)
}

fn start_vector<T: Scalar>(n: usize, seed: RngSeed) -> Result<DenseMatrix<T>> {
    for restart in 0..MAX_RESTARTS {
        let mut x = gaussian_matrix::<T>(n, 1, seed, stream::POWER_METHOD + restart * 16);
        let xn = norm2(x.as_slice());
        if xn > T::zero() {
            x.scale(T::one() / xn);
            return Ok(x);
        }
    }
    Err(HbsError::Config("could not draw a nonzero start vector".into()))
}

/// Estimates `||E|| / ||A||`, both norms from the same start vector.
///
/// Returns zero when both estimates vanish and infinity when only `A` does.
pub fn power_method_relnorm<T: Scalar>(
    error: &dyn LinearOperator<T>,
    reference: &dyn LinearOperator<T>,
    iters: usize,
    seed: RngSeed,
) -> Result<T> {
    if error.dim() != reference.dim() {
        return Err(HbsError::Dimension(format!(
            "error operator has dimension {}, reference {}",
            error.dim(),
            reference.dim()
        )));
    }
    let num = spectral_norm_estimate(error, iters, seed)?;
    let den = spectral_norm_estimate(reference, iters, seed)?;
    if den == T::zero() {
        return Ok(if num == T::zero() { T::zero() } else { T::infinity() });
    }
    Ok(num / den)
}
