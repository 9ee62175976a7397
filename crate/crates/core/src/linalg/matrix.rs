use std::fmt;
use std::ops::{Index, IndexMut, Range};

use crate::error::{HbsError, Result};
use crate::flops;
use crate::scalar::Scalar;

/// Whether an operand enters a product as-is or transposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    N,
    T,
}

/// Dense column-major matrix.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Wraps column-major storage.
    pub fn from_column_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(HbsError::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from row slices; convenient in tests.
    pub fn from_rows(rows: &[&[T]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| {
            assert_eq!(rows[i].len(), c, "ragged rows");
            rows[i][j]
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn column_vector(v: &[T]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn diagonal(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn column_mut(&mut self, j: usize) -> &mut [T] {
        let r = self.rows;
        &mut self.data[j * r..(j + 1) * r]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Copies the rows in `range`.
    pub fn row_block(&self, range: Range<usize>) -> Self {
        assert!(range.end <= self.rows, "row range out of bounds");
        let r = range.len();
        let mut data = Vec::with_capacity(r * self.cols);
        for j in 0..self.cols {
            data.extend_from_slice(&self.column(j)[range.clone()]);
        }
        Self {
            rows: r,
            cols: self.cols,
            data,
        }
    }

    /// Copies the columns in `range`.
    pub fn col_block(&self, range: Range<usize>) -> Self {
        assert!(range.end <= self.cols, "column range out of bounds");
        Self {
            rows: self.rows,
            cols: range.len(),
            data: self.data[range.start * self.rows..range.end * self.rows].to_vec(),
        }
    }

    /// Copies `A(rows, cols)`.
    pub fn block(&self, rows: Range<usize>, cols: Range<usize>) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| {
            self[(rows.start + i, cols.start + j)]
        })
    }

    /// Writes `src` with its top-left corner at `(i0, j0)`.
    pub fn set_block(&mut self, i0: usize, j0: usize, src: &Self) {
        assert!(i0 + src.rows <= self.rows && j0 + src.cols <= self.cols);
        for j in 0..src.cols {
            let dst = &mut self.column_mut(j0 + j)[i0..i0 + src.rows];
            dst.copy_from_slice(src.column(j));
        }
    }

    /// Stacks `top` over `bottom`.
    pub fn vstack(top: &Self, bottom: &Self) -> Result<Self> {
        if top.cols != bottom.cols {
            return Err(HbsError::Dimension(format!(
                "cannot stack {}x{} over {}x{}",
                top.rows, top.cols, bottom.rows, bottom.cols
            )));
        }
        let rows = top.rows + bottom.rows;
        let mut data = Vec::with_capacity(rows * top.cols);
        for j in 0..top.cols {
            data.extend_from_slice(top.column(j));
            data.extend_from_slice(bottom.column(j));
        }
        Ok(Self {
            rows,
            cols: top.cols,
            data,
        })
    }

    /// `self * rhs`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        self.product(Op::N, rhs, Op::N)
    }

    /// `self^T * rhs`.
    pub fn t_matmul(&self, rhs: &Self) -> Self {
        self.product(Op::T, rhs, Op::N)
    }

    /// `self * rhs^T`.
    pub fn matmul_t(&self, rhs: &Self) -> Self {
        self.product(Op::N, rhs, Op::T)
    }

    /// `op_a(self) * op_b(rhs)` into a fresh matrix.
    pub fn product(&self, op_a: Op, rhs: &Self, op_b: Op) -> Self {
        let m = if op_a == Op::N { self.rows } else { self.cols };
        let n = if op_b == Op::N { rhs.cols } else { rhs.rows };
        let mut out = Self::zeros(m, n);
        gemm(T::one(), self, op_a, rhs, op_b, T::zero(), &mut out);
        out
    }

    pub fn scale(&mut self, alpha: T) {
        self.data.iter_mut().for_each(|x| *x *= alpha);
    }

    pub fn scaled(&self, alpha: T) -> Self {
        let mut out = self.clone();
        out.scale(alpha);
        out
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: T, other: &Self) {
        assert_eq!(self.shape(), other.shape(), "axpy shape mismatch");
        flops::record(self.data.len());
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-T::one(), other);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(T::one(), other);
        out
    }

    pub fn norm_fro(&self) -> T {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Converts every entry to another scalar type.
    pub fn cast<U: Scalar>(&self) -> DenseMatrix<U> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| U::lit(x.as_f64())).collect(),
        }
    }
}

/// Euclidean norm with scaling against overflow.
pub fn norm2<T: Scalar>(x: &[T]) -> T {
    let scale = x.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    if scale == T::zero() || !scale.is_finite() {
        return scale;
    }
    flops::record(x.len());
    let ss: T = x.iter().map(|&v| (v / scale) * (v / scale)).sum();
    scale * ss.sqrt()
}

pub fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    assert_eq!(x.len(), y.len());
    flops::record(x.len());
    x.iter().zip(y).map(|(&a, &b)| a * b).sum()
}

/// `c = alpha * op_a(a) * op_b(b) + beta * c`.
pub fn gemm<T: Scalar>(
    alpha: T,
    a: &DenseMatrix<T>,
    op_a: Op,
    b: &DenseMatrix<T>,
    op_b: Op,
    beta: T,
    c: &mut DenseMatrix<T>,
) {
    let (m, k) = match op_a {
        Op::N => (a.rows, a.cols),
        Op::T => (a.cols, a.rows),
    };
    let (kb, n) = match op_b {
        Op::N => (b.rows, b.cols),
        Op::T => (b.cols, b.rows),
    };
    assert_eq!(k, kb, "inner dimensions differ: {k} vs {kb}");
    assert_eq!((c.rows, c.cols), (m, n), "output shape mismatch");
    let a_view = StridedRef::whole(a, op_a);
    let b_view = StridedRef::whole(b, op_b);
    let rows = c.rows;
    gemm_strided(
        m,
        k,
        n,
        alpha,
        a_view,
        b_view,
        beta,
        &mut c.data,
        0,
        1,
        rows as isize,
    );
}

/// Read-only strided window into a column-major buffer.
#[derive(Clone, Copy)]
pub(crate) struct StridedRef<'a, T> {
    pub data: &'a [T],
    pub offset: usize,
    pub rs: isize,
    pub cs: isize,
}

impl<'a, T: Scalar> StridedRef<'a, T> {
    pub fn whole(m: &'a DenseMatrix<T>, op: Op) -> Self {
        let ld = m.rows as isize;
        match op {
            Op::N => Self {
                data: &m.data,
                offset: 0,
                rs: 1,
                cs: ld,
            },
            Op::T => Self {
                data: &m.data,
                offset: 0,
                rs: ld,
                cs: 1,
            },
        }
    }

    /// Sub-block starting at `(i0, j0)` of a column-major buffer with leading
    /// dimension `ld`, optionally transposed.
    pub fn sub(data: &'a [T], ld: usize, i0: usize, j0: usize, op: Op) -> Self {
        let offset = i0 + j0 * ld;
        match op {
            Op::N => Self {
                data,
                offset,
                rs: 1,
                cs: ld as isize,
            },
            Op::T => Self {
                data,
                offset,
                rs: ld as isize,
                cs: 1,
            },
        }
    }

    fn last_index(&self, rows: usize, cols: usize) -> usize {
        self.offset
            + (rows.saturating_sub(1) as isize * self.rs + cols.saturating_sub(1) as isize * self.cs)
                as usize
    }
}

/// GEMM on strided windows: `C(m x n) = alpha A(m x k) B(k x n) + beta C`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn gemm_strided<T: Scalar>(
    m: usize,
    k: usize,
    n: usize,
    alpha: T,
    a: StridedRef<'_, T>,
    b: StridedRef<'_, T>,
    beta: T,
    c: &mut [T],
    c_offset: usize,
    rsc: isize,
    csc: isize,
) {
    if m == 0 || n == 0 {
        return;
    }
    let c_last = c_offset + ((m - 1) as isize * rsc + (n - 1) as isize * csc) as usize;
    assert!(c_last < c.len(), "gemm output window out of bounds");
    if k == 0 {
        for j in 0..n {
            for i in 0..m {
                let idx = c_offset + (i as isize * rsc + j as isize * csc) as usize;
                c[idx] = if beta == T::zero() { T::zero() } else { beta * c[idx] };
            }
        }
        return;
    }
    assert!(a.last_index(m, k) < a.data.len(), "gemm lhs window out of bounds");
    assert!(b.last_index(k, n) < b.data.len(), "gemm rhs window out of bounds");
    flops::record(m * n * k);
    // SAFETY: all three windows were bounds-checked above; `c` is a unique
    // borrow so it cannot alias `a` or `b`.
    unsafe {
        T::gemm_raw(
            m,
            k,
            n,
            alpha,
            a.data.as_ptr().add(a.offset),
            a.rs,
            a.cs,
            b.data.as_ptr().add(b.offset),
            b.rs,
            b.cs,
            beta,
            c.as_mut_ptr().add(c_offset),
            rsc,
            csc,
        );
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i + j * self.rows]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i + j * self.rows]
    }
}

impl<T: fmt::Debug> fmt::Debug for DenseMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{}", self.rows, self.cols)?;
        if self.rows * self.cols <= 64 {
            for i in 0..self.rows {
                let row: Vec<String> = (0..self.cols)
                    .map(|j| format!("{:?}", self.data[i + j * self.rows]))
                    .collect();
                writeln!(f, "  [{}]", row.join(", "))?;
            }
        }
        Ok(())
    }
}
