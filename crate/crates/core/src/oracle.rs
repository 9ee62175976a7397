//! Black-box access to a matrix: products with `A` and `A^T`, nothing else.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{HbsError, Result};
use crate::linalg::matrix::DenseMatrix;
use crate::linalg::operator::LinearOperator;
use crate::scalar::Scalar;

/// Columns pushed through `A` and through `A^T` so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MatVecCount {
    pub forward: u64,
    pub adjoint: u64,
}

/// Wraps an operator and counts every column it is applied to.
pub struct MatVecOracle<T> {
    op: Box<dyn LinearOperator<T>>,
    forward: AtomicU64,
    adjoint: AtomicU64,
}

impl<T: Scalar> MatVecOracle<T> {
    pub fn new(op: impl LinearOperator<T> + 'static) -> Self {
        Self::from_boxed(Box::new(op))
    }

    pub fn from_boxed(op: Box<dyn LinearOperator<T>>) -> Self {
        Self {
            op,
            forward: AtomicU64::new(0),
            adjoint: AtomicU64::new(0),
        }
    }

    pub fn n(&self) -> usize {
        self.op.dim()
    }

    pub fn apply_batch(&self, x: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        self.check(x)?;
        self.forward.fetch_add(x.cols() as u64, Ordering::Relaxed);
        Ok(self.op.apply_block(x))
    }

    pub fn apply_transpose_batch(&self, x: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        self.check(x)?;
        self.adjoint.fetch_add(x.cols() as u64, Ordering::Relaxed);
        Ok(self.op.apply_transpose_block(x))
    }

    pub fn counts(&self) -> MatVecCount {
        MatVecCount {
            forward: self.forward.load(Ordering::Relaxed),
            adjoint: self.adjoint.load(Ordering::Relaxed),
        }
    }

    pub fn reset_counts(&self) {
        self.forward.store(0, Ordering::Relaxed);
        self.adjoint.store(0, Ordering::Relaxed);
    }

    fn check(&self, x: &DenseMatrix<T>) -> Result<()> {
        if x.rows() != self.n() {
            return Err(HbsError::Dimension(format!(
                "oracle is {n}x{n}, probe block has {} rows",
                x.rows(),
                n = self.n()
            )));
        }
        Ok(())
    }
}

/// Counted products, so error estimates that go through the oracle are tallied too.
impl<T: Scalar> LinearOperator<T> for MatVecOracle<T> {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply_block(&self, x: &DenseMatrix<T>) -> DenseMatrix<T> {
        self.apply_batch(x).expect("oracle dimension mismatch")
    }

    fn apply_transpose_block(&self, x: &DenseMatrix<T>) -> DenseMatrix<T> {
        self.apply_transpose_batch(x).expect("oracle dimension mismatch")
    }
}

impl<T> fmt::Debug for MatVecOracle<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatVecOracle")
            .field("forward", &self.forward.load(Ordering::Relaxed))
            .field("adjoint", &self.adjoint.load(Ordering::Relaxed))
            .finish_non_exhaustive()
    }
}
