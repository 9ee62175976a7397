//! Nystrom discretizations of layer potentials on a closed contour.

use std::f64::consts::{E, PI};

use hbs_core::linalg::{LinearOperator, PivotedLu};
use hbs_core::{HbsError, Matrix, Result};
use rayon::prelude::*;

use crate::contour::{Contour, Discretization};

const MIN_NODES: usize = 16;
const DIAGONAL_STEPS: (f64, f64) = (1e-3, 5e-4);

/// Builds an `n x n` matrix column by column, in parallel.
pub(crate) fn assemble(n: usize, entry: impl Fn(usize, usize) -> f64 + Sync) -> Matrix {
    let mut data = vec![0.0; n * n];
    data.par_chunks_mut(n).enumerate().for_each(|(j, column)| {
        for (i, v) in column.iter_mut().enumerate() {
            *v = entry(i, j);
        }
    });
    Matrix::from_column_major(n, n, data).expect("n * n entries")
}

fn check_nodes(n: usize) -> Result<()> {
    if n < MIN_NODES {
        return Err(HbsError::Config(format!(
            "need at least {MIN_NODES} quadrature nodes, got {n}"
        )));
    }
    Ok(())
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// `(x - y) . n_y / (4 pi |x - y|^2)`.
fn double_layer_kernel(x: [f64; 2], y: [f64; 2], ny: [f64; 2]) -> f64 {
    let d = sub(x, y);
    dot(d, ny) / (4.0 * PI * dot(d, d))
}

/// Limit of the double-layer kernel at `x(t)` along the curve, by Richardson
/// extrapolation of symmetric evaluations at `t +- eps`.
pub fn double_layer_self_limit(contour: &Contour, t: f64) -> f64 {
    let x = contour.point(t);
    let sym = |eps: f64| {
        let side = |s: f64| double_layer_kernel(x, contour.point(t + s), contour.normal(t + s));
        0.5 * (side(eps) + side(-eps))
    };
    let (coarse, fine) = DIAGONAL_STEPS;
    (4.0 * sym(fine) - sym(coarse)) / 3.0
}

/// `A = I/2 + K` for the double-layer potential with trapezoidal weights.
pub fn double_layer_matrix(n: usize, contour: &Contour) -> Result<Matrix> {
    check_nodes(n)?;
    let disc = contour.discretize(n);
    let diag: Vec<f64> = disc
        .theta
        .iter()
        .zip(&disc.weights)
        .map(|(&t, &w)| 0.5 + w * double_layer_self_limit(contour, t))
        .collect();
    Ok(assemble(n, |i, j| {
        if i == j {
            diag[i]
        } else {
            disc.weights[j] * double_layer_kernel(disc.points[i], disc.points[j], disc.normals[j])
        }
    }))
}

/// Single layer `S(i, j) = -log|x_i - x_j| w_j / (2 pi)`.
///
/// The singular diagonal is replaced by `-w_i log(w_i / (2e)) / (2 pi)`, the
/// integral of the kernel over a straight panel of length `w_i` centred on the node.
pub fn single_layer_matrix(disc: &Discretization) -> Matrix {
    let n = disc.len();
    assemble(n, |i, j| {
        let w = disc.weights[j];
        if i == j {
            -w * (w / (2.0 * E)).ln() / (2.0 * PI)
        } else {
            let d = sub(disc.points[i], disc.points[j]);
            -0.5 * dot(d, d).ln() * w / (2.0 * PI)
        }
    })
}

/// Adjoint double layer `D*(i, j) = w_j n_i . (x_i - x_j) / (2 pi |x_i - x_j|^2)`,
/// with the smooth diagonal limit `w_i kappa_i / (4 pi)`.
pub fn adjoint_double_layer_matrix(disc: &Discretization) -> Matrix {
    let n = disc.len();
    assemble(n, |i, j| {
        if i == j {
            disc.weights[i] * disc.curvature[i] / (4.0 * PI)
        } else {
            let d = sub(disc.points[i], disc.points[j]);
            disc.weights[j] * dot(disc.normals[i], d) / (2.0 * PI * dot(d, d))
        }
    })
}

/// Neumann-to-Dirichlet map `T = S (I/2 + D*)^{-1}`, with the inner matrix factored once.
pub struct NeumannToDirichlet {
    single_layer: Matrix,
    inner: PivotedLu<f64>,
}

impl NeumannToDirichlet {
    pub fn new(n: usize, contour: &Contour) -> Result<Self> {
        check_nodes(n)?;
        let disc = contour.discretize(n);
        let mut inner = adjoint_double_layer_matrix(&disc);
        for i in 0..n {
            inner[(i, i)] += 0.5;
        }
        Ok(Self {
            single_layer: single_layer_matrix(&disc),
            inner: PivotedLu::factor(inner)?,
        })
    }
}

impl LinearOperator<f64> for NeumannToDirichlet {
    fn dim(&self) -> usize {
        self.single_layer.rows()
    }

    fn apply_block(&self, x: &Matrix) -> Matrix {
        let mut y = x.clone();
        self.inner.solve_in_place(&mut y);
        self.single_layer.matmul(&y)
    }

    fn apply_transpose_block(&self, x: &Matrix) -> Matrix {
        let mut y = self.single_layer.t_matmul(x);
        self.inner.solve_transpose_in_place(&mut y);
        y
    }
}
