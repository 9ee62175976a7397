#![allow(dead_code)]

use hbs_core::{DenseMatrix, Matrix};

/// Singular values by one-sided Jacobi, descending. Slow but independent of the library's QR.
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    let (m, n) = a.shape();
    let mut w: Vec<Vec<f64>> = if m >= n {
        (0..n).map(|j| a.column(j).to_vec()).collect()
    } else {
        (0..m).map(|i| (0..n).map(|j| a[(i, j)]).collect()).collect()
    };
    let k = w.len();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha: f64 = w[p].iter().map(|x| x * x).sum();
                let beta: f64 = w[q].iter().map(|x| x * x).sum();
                let gamma: f64 = w[p].iter().zip(&w[q]).map(|(x, y)| x * y).sum();
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..w[p].len() {
                    let (x, y) = (w[p][i], w[q][i]);
                    w[p][i] = c * x - s * y;
                    w[q][i] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = w.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

pub fn spectral_norm(a: &Matrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Block-diagonal matrix from square or rectangular blocks placed corner to corner.
pub fn block_diag(blocks: &[&Matrix]) -> Matrix {
    let rows = blocks.iter().map(|b| b.rows()).sum();
    let cols = blocks.iter().map(|b| b.cols()).sum();
    let mut out = DenseMatrix::zeros(rows, cols);
    let (mut i, mut j) = (0, 0);
    for b in blocks {
        out.set_block(i, j, b);
        i += b.rows();
        j += b.cols();
    }
    out
}

pub fn rel_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.sub(b).norm_fro() / b.norm_fro().max(f64::MIN_POSITIVE)
}
