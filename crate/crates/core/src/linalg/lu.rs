use crate::error::{HbsError, Result};
use crate::flops;
use crate::linalg::matrix::{gemm_strided, DenseMatrix, Op, StridedRef};
use crate::linalg::triangular::{solve_triangular, Diag, Triangle};
use crate::scalar::Scalar;

const PANEL: usize = 64;

/// Blocked LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct PivotedLu<T> {
    lu: DenseMatrix<T>,
    /// Row `j` was exchanged with row `swaps[j]` at step `j`.
    swaps: Vec<usize>,
}

impl<T: Scalar> PivotedLu<T> {
    pub fn factor(mut a: DenseMatrix<T>) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(HbsError::Dimension(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let mut swaps = Vec::with_capacity(n);

        for kb in (0..n).step_by(PANEL) {
            let kend = (kb + PANEL).min(n);

            for j in kb..kend {
                let (p, pmax) = (j..n).fold((j, -T::one()), |acc, i| {
                    let v = a[(i, j)].abs();
                    if v > acc.1 {
                        (i, v)
                    } else {
                        acc
                    }
                });
                if !(pmax > T::zero()) {
                    return Err(HbsError::Singular(format!("zero pivot in column {j}")));
                }
                swaps.push(p);
                if p != j {
                    for c in 0..n {
                        let col = a.column_mut(c);
                        col.swap(j, p);
                    }
                }
                let inv = T::one() / a[(j, j)];
                for i in j + 1..n {
                    a[(i, j)] *= inv;
                }
                for c in j + 1..kend {
                    let u = a[(j, c)];
                    if u == T::zero() {
                        continue;
                    }
                    let (head, tail) = a.as_mut_slice().split_at_mut(c * n);
                    let l = &head[j * n + j + 1..j * n + n];
                    for (x, &li) in tail[j + 1..n].iter_mut().zip(l) {
                        *x -= li * u;
                    }
                }
                flops::record((n - j) * (kend - j));
            }

            if kend == n {
                continue;
            }
            // U12 = L11^{-1} A12.
            for c in kend..n {
                for j in kb..kend {
                    let x = a[(j, c)];
                    for i in j + 1..kend {
                        let l = a[(i, j)];
                        a[(i, c)] -= l * x;
                    }
                }
            }
            flops::record((n - kend) * (kend - kb) * (kend - kb) / 2);

            // A22 -= L21 U12.
            let l21 = a.block(kend..n, kb..kend);
            let u12 = a.block(kb..kend, kend..n);
            gemm_strided(
                n - kend,
                kend - kb,
                n - kend,
                -T::one(),
                StridedRef::whole(&l21, Op::N),
                StridedRef::whole(&u12, Op::N),
                T::one(),
                a.as_mut_slice(),
                kend + kend * n,
                1,
                n as isize,
            );
        }
        Ok(Self { lu: a, swaps })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// `b <- A^{-1} b`.
    pub fn solve_in_place(&self, b: &mut DenseMatrix<T>) {
        assert_eq!(b.rows(), self.dim(), "right-hand side row mismatch");
        for c in 0..b.cols() {
            let col = b.column_mut(c);
            for (j, &p) in self.swaps.iter().enumerate() {
                col.swap(j, p);
            }
        }
        solve_triangular(&self.lu, Triangle::Lower, Op::N, Diag::Unit, b);
        solve_triangular(&self.lu, Triangle::Upper, Op::N, Diag::NonUnit, b);
    }

    /// `b <- A^{-T} b`.
    pub fn solve_transpose_in_place(&self, b: &mut DenseMatrix<T>) {
        assert_eq!(b.rows(), self.dim(), "right-hand side row mismatch");
        solve_triangular(&self.lu, Triangle::Upper, Op::T, Diag::NonUnit, b);
        solve_triangular(&self.lu, Triangle::Lower, Op::T, Diag::Unit, b);
        for c in 0..b.cols() {
            let col = b.column_mut(c);
            for (j, &p) in self.swaps.iter().enumerate().rev() {
                col.swap(j, p);
            }
        }
    }
}
