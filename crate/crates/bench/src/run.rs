use std::io::Write;
use std::path::Path;
use std::time::Instant;

use hbs_core::linalg::{gaussian_matrix, power_method_relnorm, Difference, DEFAULT_POWER_ITERS};
use hbs_core::{compress_with_stats, CompressionConfig, CompressionStats, Hbs, Oracle, RngSeed};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::problem::Problem;

/// Compressed matvecs averaged into `t_apply`.
const APPLY_REPEATS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem: Problem,
    pub n: usize,
    pub r: usize,
    pub m: usize,
    pub s: usize,
    pub seed: u64,
    pub t_sample: f64,
    pub t_compress: f64,
    pub t_apply: f64,
    pub rel_err: f64,
    pub floats_per_dof: f64,
    pub matvecs_a: u64,
    pub matvecs_at: u64,
}

pub const CSV_HEADER: &str =
    "problem,n,r,m,s,seed,t_sample,t_compress,t_apply,rel_err,floats_per_dof,matvecs_a,matvecs_at";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub rank: usize,
    pub leaf: usize,
    pub probes: Option<usize>,
    pub seed: RngSeed,
    pub power_iters: usize,
}

impl RunConfig {
    pub fn new(rank: usize, leaf: usize) -> Self {
        Self {
            rank,
            leaf,
            probes: None,
            seed: RngSeed(0),
            power_iters: DEFAULT_POWER_ITERS,
        }
    }

    pub fn compression(&self) -> CompressionConfig {
        let cfg = CompressionConfig::new(self.rank, self.leaf).with_seed(self.seed);
        match self.probes {
            Some(s) => cfg.with_probes(s),
            None => cfg,
        }
    }
}

/// Everything a single run produces.
pub struct RunOutcome {
    pub record: RunRecord,
    pub factorization: Hbs,
    pub stats: CompressionStats,
    pub oracle: Oracle,
}

pub fn run_once(problem: Problem, n: usize, cfg: &RunConfig) -> Result<RunOutcome> {
    let oracle = problem.oracle(n, cfg.rank, cfg.leaf, cfg.seed)?;
    let (f, stats) = compress_with_stats(&oracle, &cfg.compression())?;
    let rel_err = relative_error(&oracle, &f, cfg.power_iters, cfg.seed)?;

    let q = gaussian_matrix::<f64>(n, 1, cfg.seed, 0);
    let start = Instant::now();
    for _ in 0..APPLY_REPEATS {
        f.apply(q.as_slice())?;
    }
    let t_apply = start.elapsed().as_secs_f64() / APPLY_REPEATS as f64;

    let record = RunRecord {
        problem,
        n,
        r: cfg.rank,
        m: cfg.leaf,
        s: stats.probes,
        seed: cfg.seed.0,
        t_sample: stats.sample_time.as_secs_f64(),
        t_compress: stats.compress_time.as_secs_f64(),
        t_apply,
        rel_err,
        floats_per_dof: f.storage().floats_per_dof,
        matvecs_a: stats.matvecs.forward,
        matvecs_at: stats.matvecs.adjoint,
    };
    Ok(RunOutcome {
        record,
        factorization: f,
        stats,
        oracle,
    })
}

/// `||A - F|| / ||A||` by power iteration; goes through the oracle, so it advances its counters.
pub fn relative_error(oracle: &Oracle, f: &Hbs, iters: usize, seed: RngSeed) -> Result<f64> {
    if oracle.n() != f.n() {
        return Err(BenchError::Config(format!(
            "factorization is {}x{}, problem is {}x{}",
            f.n(),
            f.n(),
            oracle.n(),
            oracle.n()
        )));
    }
    let e = Difference {
        minuend: oracle,
        subtrahend: f,
    };
    Ok(power_method_relnorm(&e, oracle, iters, seed)?)
}

/// Runs every size in `n_list`, flushing one CSV row per run to `out`.
///
/// `on_record` sees each record as soon as its row is written.
pub fn sweep(
    problem: Problem,
    n_list: &[usize],
    cfg: &RunConfig,
    out: &Path,
    mut on_record: impl FnMut(&RunRecord) -> Result<()>,
) -> Result<Vec<RunRecord>> {
    if n_list.is_empty() {
        return Err(BenchError::Config("empty size list".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(BenchError::Config(format!("sizes must be strictly ascending: {n_list:?}")));
    }
    let mut writer = csv::WriterBuilder::new().has_headers(true).from_path(out)?;
    let mut records = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let record = run_once(problem, n, cfg)?.record;
        writer.serialize(&record)?;
        writer.flush()?;
        on_record(&record)?;
        records.push(record);
    }
    Ok(records)
}

/// One JSON object per line.
pub fn write_json_line(w: &mut impl Write, record: &RunRecord) -> Result<()> {
    serde_json::to_writer(&mut *w, record)?;
    writeln!(w)?;
    Ok(())
}
