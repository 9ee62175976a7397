//! Schur complement of the 5-point Laplacian onto a separator line.

use hbs_core::linalg::LinearOperator;
use hbs_core::{HbsError, Matrix, Result};
use rayon::prelude::*;

/// Lower band of an SPD band matrix, factored as `L L^T`.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bandwidth: usize,
    /// Row `i` holds `L[i, i - bandwidth ..= i]`.
    band: Vec<f64>,
}

impl BandedCholesky {
    /// `entry(i, j)` is queried for `i - bandwidth <= j <= i` only.
    pub fn factor(n: usize, bandwidth: usize, entry: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let w = bandwidth + 1;
        let mut band = vec![0.0; n * w];
        let at = |i: usize, j: usize| i * w + (j + bandwidth - i);
        for i in 0..n {
            let lo = i.saturating_sub(bandwidth);
            for j in lo..=i {
                let k0 = lo.max(j.saturating_sub(bandwidth));
                let mut sum = entry(i, j);
                for k in k0..j {
                    sum -= band[at(i, k)] * band[at(j, k)];
                }
                if i == j {
                    if !(sum > 0.0) {
                        return Err(HbsError::Singular(format!(
                            "band matrix is not positive definite at row {i}"
                        )));
                    }
                    band[at(i, i)] = sum.sqrt();
                } else {
                    band[at(i, j)] = sum / band[at(j, j)];
                }
            }
        }
        Ok(Self { n, bandwidth, band })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n, "right-hand side length");
        let bw = self.bandwidth;
        let w = bw + 1;
        for i in 0..self.n {
            let lo = i.saturating_sub(bw);
            let row = &self.band[i * w..(i + 1) * w];
            let mut sum = b[i];
            for k in lo..i {
                sum -= row[k + bw - i] * b[k];
            }
            b[i] = sum / row[bw];
        }
        for i in (0..self.n).rev() {
            b[i] /= self.band[i * w + bw];
            let x = b[i];
            let lo = i.saturating_sub(bw);
            let row = &self.band[i * w..(i + 1) * w];
            for k in lo..i {
                b[k] -= row[k + bw - i] * x;
            }
        }
    }
}

/// A `width x height` grid split by its middle row.
///
/// Grid nodes are numbered column by column, `c * height + row`. The
/// separator `I3` is row `(height - 1) / 2`; `I1` and `I2` are the rows below
/// and above it, each numbered column by column within its own strip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridProblem {
    pub width: usize,
    pub height: usize,
}

impl GridProblem {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width < 8 {
            return Err(HbsError::Config(format!("grid width must be at least 8, got {width}")));
        }
        if height < 3 || height % 2 == 0 {
            return Err(HbsError::Config(format!(
                "grid height must be odd and at least 3, got {height}"
            )));
        }
        Ok(Self { width, height })
    }

    pub fn separator_row(&self) -> usize {
        (self.height - 1) / 2
    }

    /// Rows in each of the two strips.
    pub fn strip_height(&self) -> usize {
        self.separator_row()
    }

    /// Global grid indices of `I1`, `I2` and `I3`, each in its local order.
    pub fn partition(&self) -> [Vec<usize>; 3] {
        let (h, mid) = (self.height, self.separator_row());
        let strip = |rows: std::ops::Range<usize>| {
            (0..self.width)
                .flat_map(|c| rows.clone().map(move |r| c * h + r))
                .collect::<Vec<_>>()
        };
        [strip(0..mid), strip(mid + 1..h), (0..self.width).map(|c| c * h + mid).collect()]
    }

    /// Entry of the 5-point Laplacian between grid nodes `a` and `b`.
    pub fn laplacian(&self, a: usize, b: usize) -> f64 {
        let h = self.height;
        let (ca, ra) = (a / h, a % h);
        let (cb, rb) = (b / h, b % h);
        if a == b {
            4.0
        } else if (ca == cb && ra.abs_diff(rb) == 1) || (ra == rb && ca.abs_diff(cb) == 1) {
            -1.0
        } else {
            0.0
        }
    }
}

/// `C33 - C31 C11^{-1} C13 - C32 C22^{-1} C23` on the separator, applied matrix-free.
pub struct SchurComplement {
    grid: GridProblem,
    lower: BandedCholesky,
    upper: BandedCholesky,
}

impl SchurComplement {
    pub fn new(grid: GridProblem) -> Result<Self> {
        let h = grid.strip_height();
        let n = h * grid.width;
        // Column-by-column numbering puts horizontal neighbours `h` apart.
        let strip = |i: usize, j: usize| {
            if i == j {
                4.0
            } else if (i - j == 1 && i % h != 0) || i - j == h {
                -1.0
            } else {
                0.0
            }
        };
        Ok(Self {
            grid,
            lower: BandedCholesky::factor(n, h, strip)?,
            upper: BandedCholesky::factor(n, h, strip)?,
        })
    }

    pub fn grid(&self) -> GridProblem {
        self.grid
    }

    fn apply_vector(&self, q: &[f64], out: &mut [f64]) {
        let (w, h) = (self.grid.width, self.grid.strip_height());
        for c in 0..w {
            let left = if c > 0 { q[c - 1] } else { 0.0 };
            let right = if c + 1 < w { q[c + 1] } else { 0.0 };
            out[c] = 4.0 * q[c] - left - right;
        }
        // Strip rows adjacent to the separator: the top row of I1, the bottom row of I2.
        for (factor, adjacent) in [(&self.lower, h - 1), (&self.upper, 0)] {
            let mut z = vec![0.0; h * w];
            for c in 0..w {
                z[c * h + adjacent] = -q[c];
            }
            factor.solve_in_place(&mut z);
            for c in 0..w {
                out[c] += z[c * h + adjacent];
            }
        }
    }
}

impl LinearOperator<f64> for SchurComplement {
    fn dim(&self) -> usize {
        self.grid.width
    }

    fn apply_block(&self, x: &Matrix) -> Matrix {
        let w = self.grid.width;
        assert_eq!(x.rows(), w, "probe rows must match the separator length");
        let mut data = vec![0.0; w * x.cols()];
        data.par_chunks_mut(w)
            .enumerate()
            .for_each(|(j, out)| self.apply_vector(x.column(j), out));
        Matrix::from_column_major(w, x.cols(), data).expect("w * cols entries")
    }

    /// The operator is symmetric.
    fn apply_transpose_block(&self, x: &Matrix) -> Matrix {
        self.apply_block(x)
    }
}
