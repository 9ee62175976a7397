//! Randomized black-box compression of hierarchically block separable matrices.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! unsuffixed aliases below fix it to `f64`.

pub mod compressor;
pub mod error;
pub mod flops;
pub mod hbs;
pub mod linalg;
pub mod oracle;
pub mod scalar;
pub mod tree;

pub use compressor::{compress, compress_with_stats, CompressionConfig, CompressionStats};
pub use error::{HbsError, Result};
pub use hbs::{random_hbs, HbsFactorization, NodeBlocks, StorageReport};
pub use linalg::random::RngSeed;
pub use linalg::{DenseMatrix, LinearOperator};
pub use oracle::{MatVecCount, MatVecOracle};
pub use scalar::Scalar;
pub use tree::{build_tree, ClusterTree, Node};

pub type Matrix = DenseMatrix<f64>;
pub type Hbs = HbsFactorization<f64>;
pub type Oracle = MatVecOracle<f64>;

pub type Matrix32 = DenseMatrix<f32>;
pub type Hbs32 = HbsFactorization<f32>;
pub type Oracle32 = MatVecOracle<f32>;
