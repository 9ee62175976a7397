use crate::linalg::matrix::DenseMatrix;
use crate::scalar::Scalar;

/// A square linear map known only through its action on blocks of vectors.
pub trait LinearOperator<T: Scalar>: Send + Sync {
    fn dim(&self) -> usize;

    /// `A X` for an `n x c` block `X`.
    fn apply_block(&self, x: &DenseMatrix<T>) -> DenseMatrix<T>;

    /// `A^T X` for an `n x c` block `X`.
    fn apply_transpose_block(&self, x: &DenseMatrix<T>) -> DenseMatrix<T>;
}

impl<T: Scalar> LinearOperator<T> for DenseMatrix<T> {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply_block(&self, x: &DenseMatrix<T>) -> DenseMatrix<T> {
        self.matmul(x)
    }

    fn apply_transpose_block(&self, x: &DenseMatrix<T>) -> DenseMatrix<T> {
        self.t_matmul(x)
    }
}

impl<T: Scalar, O: LinearOperator<T> + ?Sized> LinearOperator<T> for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply_block(&self, x: &DenseMatrix<T>) -> DenseMatrix<T> {
        (**self).apply_block(x)
    }

    fn apply_transpose_block(&self, x: &DenseMatrix<T>) -> DenseMatrix<T> {
        (**self).apply_transpose_block(x)
    }
}

/// `A - B`, applied as two products.
pub struct Difference<A, B> {
    pub minuend: A,
    pub subtrahend: B,
}

impl<T: Scalar, A: LinearOperator<T>, B: LinearOperator<T>> LinearOperator<T> for Difference<A, B> {
    fn dim(&self) -> usize {
        self.minuend.dim()
    }

    fn apply_block(&self, x: &DenseMatrix<T>) -> DenseMatrix<T> {
        self.minuend.apply_block(x).sub(&self.subtrahend.apply_block(x))
    }

    fn apply_transpose_block(&self, x: &DenseMatrix<T>) -> DenseMatrix<T> {
        self.minuend
            .apply_transpose_block(x)
            .sub(&self.subtrahend.apply_transpose_block(x))
    }
}

/// `A^T`, applied through the transpose products of `A`.
pub struct Transposed<A>(pub A);

impl<T: Scalar, A: LinearOperator<T>> LinearOperator<T> for Transposed<A> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply_block(&self, x: &DenseMatrix<T>) -> DenseMatrix<T> {
        self.0.apply_transpose_block(x)
    }

    fn apply_transpose_block(&self, x: &DenseMatrix<T>) -> DenseMatrix<T> {
        self.0.apply_block(x)
    }
}
