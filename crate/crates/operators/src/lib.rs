//! Test operators for HBS compression, each exposed as a counted matvec oracle.
//!
//! - a double-layer boundary integral operator on a smooth star contour,
//! - the Neumann-to-Dirichlet map `S (I/2 + D*)^{-1}` on the same contour,
//! - the Schur complement of a 5-point Laplacian onto a separator line,
//! - synthetic matrices with exact HBS structure.

pub mod bie;
pub mod contour;
pub mod schur;

use hbs_core::{build_tree, random_hbs, Hbs, Matrix, Oracle, Result, RngSeed};

pub use bie::{double_layer_matrix, NeumannToDirichlet};
pub use contour::{default_contour, Contour, Discretization};
pub use schur::{BandedCholesky, GridProblem, SchurComplement};

/// Block rank of the synthetic problem for a compression rank `r`: five below `r`, at least one.
pub fn synthetic_block_rank(r: usize) -> usize {
    r.saturating_sub(5).max(1)
}

pub fn dense_oracle(a: Matrix) -> Oracle {
    Oracle::new(a)
}

pub fn bie_oracle(n: usize, contour: &Contour) -> Result<Oracle> {
    Ok(dense_oracle(double_layer_matrix(n, contour)?))
}

pub fn ntd_oracle(n: usize, contour: &Contour) -> Result<Oracle> {
    Ok(Oracle::new(NeumannToDirichlet::new(n, contour)?))
}

pub fn schur_oracle(width: usize, height: usize) -> Result<Oracle> {
    Ok(Oracle::new(SchurComplement::new(GridProblem::new(width, height)?)?))
}

/// Exact HBS matrix of block rank [`synthetic_block_rank`] on the tree `(n, m)`.
pub fn synthetic_hbs(n: usize, r: usize, m: usize, seed: RngSeed) -> Result<Hbs> {
    random_hbs(&build_tree(n, m)?, synthetic_block_rank(r), seed)
}

/// Oracle that applies [`synthetic_hbs`] in linear time, so large sizes stay cheap.
pub fn synthetic_oracle(n: usize, r: usize, m: usize, seed: RngSeed) -> Result<Oracle> {
    Ok(Oracle::new(synthetic_hbs(n, r, m, seed)?))
}
