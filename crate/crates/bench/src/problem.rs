use std::fmt;
use std::str::FromStr;

use hbs_core::{Oracle, RngSeed};
use hbs_operators::{bie_oracle, default_contour, ntd_oracle, schur_oracle, synthetic_oracle};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

/// Grid height of the Schur complement problem; its width is the matrix size.
pub const SCHUR_HEIGHT: usize = 51;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    Synthetic,
    BieDl,
    BieNtd,
    Schur,
}

impl Problem {
    pub const ALL: [Problem; 4] = [Problem::Synthetic, Problem::BieDl, Problem::BieNtd, Problem::Schur];

    pub fn name(self) -> &'static str {
        match self {
            Problem::Synthetic => "synthetic",
            Problem::BieDl => "bie-dl",
            Problem::BieNtd => "bie-ntd",
            Problem::Schur => "schur",
        }
    }

    /// Builds the `n x n` oracle. `rank`, `leaf` and `seed` only shape the synthetic problem.
    pub fn oracle(self, n: usize, rank: usize, leaf: usize, seed: RngSeed) -> Result<Oracle> {
        let contour = default_contour();
        Ok(match self {
            Problem::Synthetic => synthetic_oracle(n, rank, leaf, seed)?,
            Problem::BieDl => bie_oracle(n, &contour)?,
            Problem::BieNtd => ntd_oracle(n, &contour)?,
            Problem::Schur => schur_oracle(n, SCHUR_HEIGHT)?,
        })
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Problem::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| BenchError::Config(format!("unknown problem {s:?}")))
    }
}
