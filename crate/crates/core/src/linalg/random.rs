use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::matrix::DenseMatrix;
use crate::scalar::Scalar;

/// Seed for every random draw in a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RngSeed(pub u64);

/// Named substreams of one seed, so a single seed reproduces a whole run.
pub mod stream {
    pub const OMEGA: u64 = 0;
    pub const PSI: u64 = 1;
    pub const POWER_METHOD: u64 = 2;
    pub const SYNTHETIC: u64 = 3;
}

/// Deterministic generator for `(seed, stream)`.
pub fn rng_for(seed: RngSeed, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    rng.set_stream(stream);
    rng
}

/// `n x s` matrix of independent standard normal draws, filled column by column.
pub fn gaussian_matrix<T: Scalar>(n: usize, s: usize, seed: RngSeed, stream: u64) -> DenseMatrix<T> {
    let mut rng = rng_for(seed, stream);
    gaussian_from(&mut rng, n, s)
}

pub(crate) fn gaussian_from<T: Scalar>(rng: &mut impl Rng, n: usize, s: usize) -> DenseMatrix<T> {
    let data = (0..n * s)
        .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)))
        .collect();
    DenseMatrix::from_column_major(n, s, data).expect("length matches by construction")
}
