//! Measurement driver for HBS compression: problem set-up, timed runs,
//! CSV sweeps and a binary container for factorizations.

pub mod container;
pub mod error;
pub mod problem;
pub mod run;

pub use container::{load_factorization, save_factorization};
pub use error::{BenchError, Result};
pub use problem::Problem;
pub use run::{run_once, sweep, RunConfig, RunOutcome, RunRecord, CSV_HEADER};
