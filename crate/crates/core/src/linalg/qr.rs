use std::ops::Range;

use crate::flops;
use crate::linalg::matrix::{norm2, DenseMatrix};
use crate::scalar::Scalar;

/// Householder QR factorization `A P = Q R`, stored compactly.
///
/// The strictly lower part of `factors` holds the essential parts of the
/// reflectors (unit leading entry implied), the upper triangle holds `R`.
/// `P` is the identity unless built with column pivoting.
#[derive(Debug, Clone)]
pub struct HouseholderQr<T> {
    factors: DenseMatrix<T>,
    tau: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> HouseholderQr<T> {
    /// Unpivoted factorization.
    pub fn new(a: DenseMatrix<T>) -> Self {
        Self::factor(a, false)
    }

    /// Factorization with greedy column pivoting; `|R[j,j]|` is non-increasing.
    pub fn with_column_pivoting(a: DenseMatrix<T>) -> Self {
        Self::factor(a, true)
    }

    fn factor(mut a: DenseMatrix<T>, pivot: bool) -> Self {
        let (m, n) = a.shape();
        let steps = m.min(n);
        let mut tau = Vec::with_capacity(steps);
        let mut perm: Vec<usize> = (0..n).collect();

        for j in 0..steps {
            if pivot {
                let best = (j..n)
                    .map(|c| (c, norm2(&a.column(c)[j..])))
                    .fold((j, -T::one()), |acc, (c, v)| if v > acc.1 { (c, v) } else { acc })
                    .0;
                if best != j {
                    swap_columns(&mut a, j, best);
                    perm.swap(j, best);
                }
            }

            let t = make_reflector(&mut a.column_mut(j)[j..]);
            tau.push(t);
            if t != T::zero() {
                for c in j + 1..n {
                    let (head, tail) = a.as_mut_slice().split_at_mut(c * m);
                    let v = &head[j * m + j..j * m + m];
                    reflect(v, t, &mut tail[j..m]);
                }
            }
        }

        Self {
            factors: a,
            tau,
            perm,
        }
    }

    pub fn rows(&self) -> usize {
        self.factors.rows()
    }

    pub fn cols(&self) -> usize {
        self.factors.cols()
    }

    /// Column permutation: column `j` of `A P` is column `perm[j]` of `A`.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn r_diagonal(&self) -> Vec<T> {
        (0..self.tau.len()).map(|j| self.factors[(j, j)]).collect()
    }

    /// The `min(m, n) x n` upper-triangular factor.
    pub fn r(&self) -> DenseMatrix<T> {
        let k = self.tau.len();
        DenseMatrix::from_fn(k, self.cols(), |i, j| {
            if i <= j {
                self.factors[(i, j)]
            } else {
                T::zero()
            }
        })
    }

    fn reflector(&self, j: usize) -> &[T] {
        &self.factors.column(j)[j..]
    }

    /// `c <- Q c`.
    pub fn apply_q(&self, c: &mut DenseMatrix<T>) {
        assert_eq!(c.rows(), self.rows(), "apply_q row mismatch");
        for j in (0..self.tau.len()).rev() {
            self.apply_reflector(j, c);
        }
    }

    /// `c <- Q^T c`.
    pub fn apply_qt(&self, c: &mut DenseMatrix<T>) {
        assert_eq!(c.rows(), self.rows(), "apply_qt row mismatch");
        for j in 0..self.tau.len() {
            self.apply_reflector(j, c);
        }
    }

    fn apply_reflector(&self, j: usize, c: &mut DenseMatrix<T>) {
        let t = self.tau[j];
        if t == T::zero() {
            return;
        }
        let v = self.reflector(j);
        for col in 0..c.cols() {
            reflect(v, t, &mut c.column_mut(col)[j..]);
        }
    }

    /// Columns `range` of the full `m x m` orthogonal factor.
    pub fn q_columns(&self, range: Range<usize>) -> DenseMatrix<T> {
        let m = self.rows();
        assert!(range.end <= m, "Q has only {m} columns");
        let mut e = DenseMatrix::zeros(m, range.len());
        for (k, j) in range.enumerate() {
            e[(j, k)] = T::one();
        }
        self.apply_q(&mut e);
        e
    }
}

fn swap_columns<T: Scalar>(a: &mut DenseMatrix<T>, p: usize, q: usize) {
    let m = a.rows();
    let (lo, hi) = if p < q { (p, q) } else { (q, p) };
    let (head, tail) = a.as_mut_slice().split_at_mut(hi * m);
    head[lo * m..lo * m + m].swap_with_slice(&mut tail[..m]);
}

/// Turns `x` into the reflector that maps it to `beta e1`.
///
/// On return `x[0] = beta` and `x[1..]` holds the essential part of `v`;
/// returns `tau` with `H = I - tau v v^T`.
fn make_reflector<T: Scalar>(x: &mut [T]) -> T {
    if x.len() <= 1 {
        return T::zero();
    }
    let alpha = x[0];
    let xnorm = norm2(&x[1..]);
    if xnorm == T::zero() {
        return T::zero();
    }
    let mag = alpha.hypot(xnorm);
    let beta = if alpha >= T::zero() { -mag } else { mag };
    let tau = (beta - alpha) / beta;
    let inv = T::one() / (alpha - beta);
    flops::record(x.len());
    x[1..].iter_mut().for_each(|v| *v *= inv);
    x[0] = beta;
    tau
}

/// `c <- (I - tau v v^T) c` where `v[0]` is implicitly one.
#[inline]
fn reflect<T: Scalar>(v: &[T], tau: T, c: &mut [T]) {
    debug_assert_eq!(v.len(), c.len());
    let mut w = c[0];
    for (&vi, &ci) in v[1..].iter().zip(&c[1..]) {
        w += vi * ci;
    }
    let s = tau * w;
    c[0] -= s;
    for (ci, &vi) in c[1..].iter_mut().zip(&v[1..]) {
        *ci -= s * vi;
    }
    flops::record(2 * v.len());
}
