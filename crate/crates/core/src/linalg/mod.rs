//! Dense kernels: matrix storage, QR and LU factorizations, triangular
//! solves, orthonormal bases, Gaussian test matrices and norm estimation.

pub mod lu;
pub mod matrix;
pub mod operator;
pub mod ortho;
pub mod power;
pub mod qr;
pub mod random;
pub mod triangular;

pub use lu::PivotedLu;
pub use matrix::{dot, gemm, norm2, DenseMatrix, Op};
pub use operator::{Difference, LinearOperator, Transposed};
pub use ortho::{col, lstsq_right, nullspace};
pub use power::{power_method_relnorm, spectral_norm_estimate, DEFAULT_POWER_ITERS};
pub use qr::HouseholderQr;
pub use random::{gaussian_matrix, stream, RngSeed};
