//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::process::ExitCode;
use std::time::Instant;

use hbs_bench::container::{from_bytes, to_bytes};
use hbs_bench::{run_once, Problem, RunConfig, RunRecord};
use hbs_core::linalg::{
    col, gaussian_matrix, power_method_relnorm, spectral_norm_estimate, Difference, Transposed, DEFAULT_POWER_ITERS,
};
use hbs_core::{
    build_tree, compress_with_stats, random_hbs, CompressionConfig, DenseMatrix, MatVecCount, MatVecOracle, Matrix,
    RngSeed,
};
use hbs_operators::synthetic_oracle;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Every compression in the suite, checked against its probe count at the end.
#[derive(Default)]
struct Budget {
    runs: usize,
    violations: Vec<String>,
}

impl Budget {
    fn record(&mut self, label: &str, s: usize, used: MatVecCount) {
        self.runs += 1;
        if used.forward != s as u64 || used.adjoint != s as u64 {
            self.violations.push(format!("{label}: s={s}, used {}/{}", used.forward, used.adjoint));
        }
    }
}

fn sci(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.2e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::MIN, f64::max);
    let min = values.iter().copied().fold(f64::MAX, f64::min);
    max / min
}

fn exact_rank(budget: &mut Budget) -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for k in [1usize, 5, 10] {
        let (r, m) = (k + 5, 2 * (k + 5));
        for depth in 1..=4u32 {
            let n = (1 << depth) * (3 * m / 4);
            let tree = build_tree(n, m).expect("valid tree");
            assert_eq!(tree.depth(), depth as usize);
            let a = random_hbs::<f64>(&tree, k, RngSeed(1000 + cases)).unwrap().to_dense().unwrap();
            let oracle = MatVecOracle::new(a.clone());
            let cfg = CompressionConfig::new(r, m).with_probes(3 * r).with_seed(RngSeed(cases));
            let (f, stats) = compress_with_stats(&oracle, &cfg).unwrap();
            budget.record(&format!("exact-rank k={k} depth={depth}"), 3 * r, stats.matvecs);
            let e = Difference { minuend: &a, subtrahend: &f };
            worst = worst.max(power_method_relnorm(&e, &a, DEFAULT_POWER_ITERS, RngSeed(cases)).unwrap());
            cases += 1;
        }
    }
    outcome(worst <= 1e-9, format!("{cases} instances, worst rel_err {worst:.2e} (<= 1e-9)"))
}

fn apply_vs_dense() -> Outcome {
    let mut worst = 0.0f64;
    for t in 0..50u64 {
        let n = 64 + (t as usize * 397) % 1985;
        let m = 8 + (t as usize * 13) % 40;
        let tree = build_tree(n, m).unwrap();
        let k = (1 + t as usize % 8).min(tree.min_leaf_size());
        let f = random_hbs::<f64>(&tree, k, RngSeed(t)).unwrap();
        let dense = f.to_dense().unwrap();
        let norm = spectral_norm_estimate(&dense, DEFAULT_POWER_ITERS, RngSeed(t)).unwrap();
        for start in (0..n).step_by(256) {
            let cols = start..(start + 256).min(n);
            let probe = DenseMatrix::from_fn(n, cols.len(), |i, j| if i == start + j { 1.0 } else { 0.0 });
            let got = f.apply_matrix(&probe).unwrap();
            for (j, c) in cols.enumerate() {
                let err: f64 = got.column(j).iter().zip(dense.column(c)).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                worst = worst.max(err / norm);
            }
        }
    }
    outcome(worst <= 1e-12, format!("50 factorizations, worst column error / ||A|| {worst:.2e} (<= 1e-12)"))
}

fn problem_sweep(
    budget: &mut Budget,
    problem: Problem,
    sizes: &[usize],
    cfg: &RunConfig,
) -> Vec<(RunRecord, hbs_core::Hbs)> {
    sizes
        .iter()
        .map(|&n| {
            let out = run_once(problem, n, cfg).unwrap();
            let used = MatVecCount { forward: out.record.matvecs_a, adjoint: out.record.matvecs_at };
            budget.record(&format!("{problem} n={n}"), out.record.s, used);
            (out.record, out.factorization)
        })
        .collect()
}

fn bie_double_layer(budget: &mut Budget) -> Outcome {
    let cfg = RunConfig { probes: Some(90), ..RunConfig::new(30, 60) };
    let runs = problem_sweep(budget, Problem::BieDl, &[1200, 2400, 4800, 9600], &cfg);
    let errs: Vec<f64> = runs.iter().map(|(r, _)| r.rel_err).collect();
    let dofs: Vec<f64> = runs[1..].iter().map(|(r, _)| r.floats_per_dof).collect();
    let mean = dofs.iter().sum::<f64>() / dofs.len() as f64;
    let dof_dev = dofs.iter().map(|d| (d / mean - 1.0).abs()).fold(0.0, f64::max);
    let pass = errs.iter().all(|&e| e <= 1e-8) && spread(&errs) < 10.0 && dof_dev <= 0.10;
    outcome(
        pass,
        format!(
            "rel_err {} (<= 1e-8, spread {:.2} < 10), floats/dof {dofs:.1?} (max deviation {:.1}% <= 10%)",
            sci(&errs),
            spread(&errs),
            100.0 * dof_dev
        ),
    )
}

fn neumann_to_dirichlet(budget: &mut Budget) -> Outcome {
    let runs = problem_sweep(budget, Problem::BieNtd, &[1000, 2000, 4000], &RunConfig::new(40, 80));
    let errs: Vec<f64> = runs.iter().map(|(r, _)| r.rel_err).collect();
    let pass = errs.iter().all(|&e| e <= 1e-7) && spread(&errs) < 10.0;
    outcome(pass, format!("rel_err {} (<= 1e-7, spread {:.2} < 10)", sci(&errs), spread(&errs)))
}

fn schur_complement(budget: &mut Budget) -> Outcome {
    let runs = problem_sweep(budget, Problem::Schur, &[400, 800, 1600], &RunConfig::new(30, 60));
    let errs: Vec<f64> = runs.iter().map(|(r, _)| r.rel_err).collect();
    let asym: Vec<f64> = runs
        .iter()
        .map(|(_, f)| {
            let e = Difference { minuend: f, subtrahend: Transposed(f) };
            power_method_relnorm(&e, f, DEFAULT_POWER_ITERS, RngSeed(9)).unwrap()
        })
        .collect();
    let pass = errs.iter().all(|&e| e <= 1e-8) && asym.iter().all(|&a| a <= 1e-10);
    outcome(pass, format!("rel_err {} (<= 1e-8), ||F - F^T||/||F|| {} (<= 1e-10)", sci(&errs), sci(&asym)))
}

fn linear_complexity(budget: &mut Budget) -> Outcome {
    let (r, m) = (15, 30);
    let sizes = [16_384usize, 32_768, 65_536, 131_072];
    let mut per_n = Vec::new();
    let mut work = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let oracle = synthetic_oracle(n, r, m, RngSeed(i as u64)).unwrap();
        let cfg = CompressionConfig::new(r, m).with_seed(RngSeed(i as u64));
        let (_, stats) = compress_with_stats(&oracle, &cfg).unwrap();
        budget.record(&format!("synthetic n={n}"), stats.probes, stats.matvecs);
        work.push(stats.multiply_adds as f64);
        per_n.push(stats.multiply_adds as f64 / n as f64);
    }
    let ratios: Vec<f64> = work.windows(2).map(|w| w[1] / w[0]).collect();
    let drift = spread(&per_n);
    let pass = ratios.iter().all(|q| (1.8..=2.3).contains(q)) && drift <= 1.1;
    outcome(
        pass,
        format!("doubling ratios {ratios:.3?} (in [1.8, 2.3]), multiply-adds/N {per_n:.0?} (max/min {drift:.3} <= 1.1)"),
    )
}

fn serialization() -> Outcome {
    let mut failures = 0;
    for t in 0..100u64 {
        let n = 16 + (t as usize * 211) % 1500;
        let m = 4 + (t as usize * 7) % 60;
        let Ok(tree) = build_tree(n, m) else { continue };
        let k = (t as usize % 6).min(tree.min_leaf_size());
        let f = random_hbs::<f64>(&tree, k, RngSeed(t)).unwrap();
        let g = from_bytes(&to_bytes(&f)).unwrap();
        let same = f.tree() == g.tree()
            && f.blocks().iter().zip(g.blocks()).all(|(a, b)| {
                [(&a.u, &b.u), (&a.v, &b.v), (&a.d, &b.d)]
                    .iter()
                    .all(|(x, y)| x.shape() == y.shape() && x.as_slice().iter().zip(y.as_slice()).all(|(p, q)| p.to_bits() == q.to_bits()))
            })
            && f.root_discrepancy().as_slice().iter().zip(g.root_discrepancy().as_slice()).all(|(p, q)| p.to_bits() == q.to_bits());
        if !same {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("100 round trips, {failures} mismatches"))
}

fn power_method_sanity() -> Outcome {
    let mut ratios = Vec::new();
    for t in 0..10u64 {
        let n = 200;
        let u: Matrix = col(&gaussian_matrix(n, n, RngSeed(t), 10), n).unwrap();
        let v: Matrix = col(&gaussian_matrix(n, n, RngSeed(t), 11), n).unwrap();
        // Top singular value 2, the rest at most 1.
        let sigma: Vec<f64> = (0..n).map(|i| if i == 0 { 2.0 } else { 1.0 / (1.0 + i as f64).sqrt() }).collect();
        let e = u.matmul(&DenseMatrix::diagonal(&sigma)).matmul_t(&v);
        ratios.push(spectral_norm_estimate(&e, DEFAULT_POWER_ITERS, RngSeed(t)).unwrap() / 2.0);
    }
    let (lo, hi) = ratios.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
    outcome(
        lo >= 0.9 && hi <= 1.0 + 1e-12,
        format!("10 matrices, estimate / ||E|| in [{lo:.6}, {hi:.6}] (within [0.9, 1.0], lower-bound estimator)"),
    )
}

fn main() -> ExitCode {
    let mut budget = Budget::default();
    let mut failed = 0;
    let mut report = |name: &str, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("{status} {name}: {} [{:.1}s]", o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    };

    report("exact-rank oracle recovery", &mut || exact_rank(&mut budget));
    report("telescoping apply vs dense", &mut apply_vs_dense);
    report("bie double layer", &mut || bie_double_layer(&mut budget));
    report("neumann-to-dirichlet", &mut || neumann_to_dirichlet(&mut budget));
    report("schur complement", &mut || schur_complement(&mut budget));
    report("linear complexity", &mut || linear_complexity(&mut budget));
    report("serialization round trip", &mut serialization);
    report("power-method sanity", &mut power_method_sanity);
    report("probe budget exactness", &mut || {
        outcome(
            budget.violations.is_empty(),
            format!(
                "{} compressions used exactly (s, s) products{}; the oracle exposes no entry access",
                budget.runs - budget.violations.len(),
                if budget.violations.is_empty() { String::new() } else { format!(", violations: {:?}", budget.violations) }
            ),
        )
    });

    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
