use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hbs_bench::run::{relative_error, write_json_line};
use hbs_bench::{load_factorization, run_once, save_factorization, sweep, BenchError, Problem, Result, RunConfig};
use hbs_core::linalg::DEFAULT_POWER_ITERS;
use hbs_core::RngSeed;

#[derive(Parser)]
#[command(name = "hbs", version, about = "Black-box HBS compression benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress one problem and report the run.
    Compress {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        n: usize,
        /// Write the factorization to this file.
        #[arg(long)]
        save: Option<PathBuf>,
        /// Print the record as JSON instead of CSV.
        #[arg(long)]
        json: bool,
    },
    /// Run a sequence of sizes and write one CSV row per size.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Also print each record as a JSON line on stdout.
        #[arg(long)]
        json: bool,
    },
    /// Recompute the relative error of a saved factorization.
    Verify {
        #[arg(long)]
        load: PathBuf,
        #[arg(long, value_parser = parse_problem)]
        problem: Problem,
        #[arg(long)]
        n: usize,
        /// Seed of the synthetic problem and of the power method.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_POWER_ITERS)]
        power_iters: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_parser = parse_problem)]
    problem: Problem,
    #[arg(long)]
    rank: usize,
    #[arg(long)]
    leaf: usize,
    /// Probe count; defaults to max(rank + largest leaf, 3 * rank).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_POWER_ITERS)]
    power_iters: usize,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            rank: self.rank,
            leaf: self.leaf,
            probes: self.samples,
            seed: RngSeed(self.seed),
            power_iters: self.power_iters,
        }
    }
}

fn parse_problem(s: &str) -> std::result::Result<Problem, String> {
    s.parse().map_err(|e: BenchError| e.to_string())
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("HBS_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| BenchError::Config(format!("HBS_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| BenchError::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let stdout = io::stdout();
    match cli.command {
        Command::Compress { run, n, save, json } => {
            let outcome = run_once(run.problem, n, &run.config())?;
            if let Some(path) = save {
                save_factorization(&outcome.factorization, &path)?;
            }
            if json {
                write_json_line(&mut stdout.lock(), &outcome.record)?;
            } else {
                let mut w = csv::Writer::from_writer(stdout.lock());
                w.serialize(&outcome.record)?;
                w.flush()?;
            }
        }
        Command::Sweep { run, n_list, out, json } => {
            sweep(run.problem, &n_list, &run.config(), &out, |record| {
                if json {
                    write_json_line(&mut stdout.lock(), record)?;
                }
                Ok(())
            })?;
        }
        Command::Verify {
            load,
            problem,
            n,
            seed,
            power_iters,
        } => {
            let f = load_factorization(&load)?;
            let seed = RngSeed(seed);
            let oracle = problem.oracle(n, f.rank(), f.tree().leaf_threshold(), seed)?;
            let err = relative_error(&oracle, &f, power_iters, seed)?;
            println!("rel_err={err:e}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
