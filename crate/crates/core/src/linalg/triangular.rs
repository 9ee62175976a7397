use crate::flops;
use crate::linalg::matrix::{gemm_strided, DenseMatrix, Op, StridedRef};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Triangle {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diag {
    Unit,
    NonUnit,
}

const BLOCK: usize = 64;

/// Solves `op(tri) X = B` in place; only the named triangle of `tri` is read.
pub fn solve_triangular<T: Scalar>(
    tri: &DenseMatrix<T>,
    uplo: Triangle,
    op: Op,
    diag: Diag,
    b: &mut DenseMatrix<T>,
) {
    let n = tri.rows();
    assert_eq!(tri.cols(), n, "triangular factor must be square");
    assert_eq!(b.rows(), n, "right-hand side has {} rows, expected {n}", b.rows());
    let forward = (uplo == Triangle::Lower) == (op == Op::N);
    let e = |i: usize, j: usize| match op {
        Op::N => tri[(i, j)],
        Op::T => tri[(j, i)],
    };
    let nrhs = b.cols();

    let mut starts: Vec<usize> = (0..n).step_by(BLOCK).collect();
    if !forward {
        starts.reverse();
    }
    for kb in starts {
        let kend = (kb + BLOCK).min(n);
        // Diagonal block.
        for c in 0..nrhs {
            let col = b.column_mut(c);
            if forward {
                for j in kb..kend {
                    if diag == Diag::NonUnit {
                        col[j] /= e(j, j);
                    }
                    let x = col[j];
                    for i in j + 1..kend {
                        col[i] -= e(i, j) * x;
                    }
                }
            } else {
                for j in (kb..kend).rev() {
                    if diag == Diag::NonUnit {
                        col[j] /= e(j, j);
                    }
                    let x = col[j];
                    for i in kb..j {
                        col[i] -= e(i, j) * x;
                    }
                }
            }
        }
        flops::record(nrhs * (kend - kb) * (kend - kb) / 2);

        // Propagate the solved block to the rows still pending.
        let (rest_start, rest_len) = if forward { (kend, n - kend) } else { (0, kb) };
        if rest_len == 0 || nrhs == 0 {
            continue;
        }
        let solved = b.row_block(kb..kend);
        let coupling = match op {
            Op::N => StridedRef::sub(tri.as_slice(), n, rest_start, kb, Op::N),
            Op::T => StridedRef::sub(tri.as_slice(), n, kb, rest_start, Op::T),
        };
        let ldb = b.rows() as isize;
        gemm_strided(
            rest_len,
            kend - kb,
            nrhs,
            -T::one(),
            coupling,
            StridedRef::whole(&solved, Op::N),
            T::one(),
            b.as_mut_slice(),
            rest_start,
            1,
            ldb,
        );
    }
}
