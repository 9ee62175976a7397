//! Reconstruction of an HBS factorization from `s` products with `A` and `s` with `A^T`.
//!
//! Both probe blocks are drawn up front; everything after the two oracle
//! calls is local linear algebra on the samples, swept from the leaves up.

use std::time::{Duration, Instant};

use crate::error::{HbsError, Result};
use crate::flops;
use crate::hbs::{HbsFactorization, NodeBlocks};
use crate::linalg::matrix::{DenseMatrix, Op};
use crate::linalg::ortho::{col, lstsq_right, nullspace};
use crate::linalg::random::{gaussian_matrix, stream, RngSeed};
use crate::oracle::{MatVecCount, MatVecOracle};
use crate::scalar::Scalar;
use crate::tree::{build_tree, ClusterTree, Node};

pub const DEFAULT_ILL_CONDITIONING_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CompressionConfig {
    pub rank: usize,
    pub leaf_threshold: usize,
    /// Probe count; `None` picks `max(rank + largest leaf, 3 * rank)`.
    pub probes: Option<usize>,
    pub seed: RngSeed,
    pub ill_conditioning_tol: f64,
}

impl CompressionConfig {
    pub fn new(rank: usize, leaf_threshold: usize) -> Self {
        Self {
            rank,
            leaf_threshold,
            probes: None,
            seed: RngSeed::default(),
            ill_conditioning_tol: DEFAULT_ILL_CONDITIONING_TOL,
        }
    }

    pub fn with_probes(mut self, probes: usize) -> Self {
        self.probes = Some(probes);
        self
    }

    pub fn with_seed(mut self, seed: RngSeed) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.ill_conditioning_tol = tol;
        self
    }

    /// Smallest probe count the algorithm accepts on `tree`.
    pub fn min_probes(&self, tree: &ClusterTree) -> usize {
        (self.rank + tree.max_leaf_size()).max(3 * self.rank)
    }

    /// Builds the tree for an `n x n` problem and resolves the probe count.
    pub fn plan(&self, n: usize) -> Result<(ClusterTree, usize)> {
        if self.rank == 0 {
            return Err(HbsError::Config("rank must be at least 1".into()));
        }
        if self.leaf_threshold < self.rank {
            return Err(HbsError::Config(format!(
                "leaf threshold {} is below the rank {}",
                self.leaf_threshold, self.rank
            )));
        }
        if !(self.ill_conditioning_tol >= 0.0 && self.ill_conditioning_tol < 1.0) {
            return Err(HbsError::Config(format!(
                "ill-conditioning tolerance {} outside [0, 1)",
                self.ill_conditioning_tol
            )));
        }
        let tree = build_tree(n, self.leaf_threshold)?;
        if tree.min_leaf_size() < self.rank {
            return Err(HbsError::Config(format!(
                "smallest leaf has {} indices, fewer than the rank {}; raise the leaf threshold",
                tree.min_leaf_size(),
                self.rank
            )));
        }
        let min = self.min_probes(&tree);
        let s = self.probes.unwrap_or(min);
        if s < min {
            return Err(HbsError::Config(format!(
                "{s} probes is below the minimum {min} = max(rank + largest leaf, 3 * rank)"
            )));
        }
        Ok((tree, s))
    }
}

/// The global probes and their images: `y = A omega`, `z = A^T psi`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet<T> {
    pub omega: DenseMatrix<T>,
    pub psi: DenseMatrix<T>,
    pub y: DenseMatrix<T>,
    pub z: DenseMatrix<T>,
}

/// Probes and samples restricted to one node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSamples<T> {
    pub omega: DenseMatrix<T>,
    pub psi: DenseMatrix<T>,
    pub y: DenseMatrix<T>,
    pub z: DenseMatrix<T>,
}

/// Output of [`compress_node_bases`]: bases and the null-space probes used to find them.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeBases<T> {
    pub u: DenseMatrix<T>,
    pub v: DenseMatrix<T>,
    pub p: DenseMatrix<T>,
    pub q: DenseMatrix<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressionStats {
    pub sample_time: Duration,
    pub compress_time: Duration,
    /// Multiply-adds after the oracle calls returned.
    pub multiply_adds: u64,
    pub matvecs: MatVecCount,
    pub probes: usize,
}

/// Draws both probe blocks and pushes each through the oracle in one call.
pub fn draw_samples<T: Scalar>(oracle: &MatVecOracle<T>, s: usize, seed: RngSeed) -> Result<SampleSet<T>> {
    if s == 0 {
        return Err(HbsError::Config("at least one probe is required".into()));
    }
    let n = oracle.n();
    let omega = gaussian_matrix(n, s, seed, stream::OMEGA);
    let psi = gaussian_matrix(n, s, seed, stream::PSI);
    let y = oracle.apply_batch(&omega)?;
    let z = oracle.apply_transpose_batch(&psi)?;
    Ok(SampleSet { omega, psi, y, z })
}

pub fn leaf_node_samples<T: Scalar>(samples: &SampleSet<T>, node: &Node) -> NodeSamples<T> {
    let rows = node.range.clone();
    NodeSamples {
        omega: samples.omega.row_block(rows.clone()),
        psi: samples.psi.row_block(rows.clone()),
        y: samples.y.row_block(rows.clone()),
        z: samples.z.row_block(rows),
    }
}

/// Column and row bases of a node from samples of its off-diagonal block.
///
/// Probes in the null space of `omega` (resp. `psi`) cancel the diagonal
/// block, so `y P` only sees `A(I, I^c)`.
pub fn compress_node_bases<T: Scalar>(ns: &NodeSamples<T>, r: usize) -> Result<NodeBases<T>> {
    let (rows, s) = ns.omega.shape();
    if s < rows + r {
        return Err(HbsError::Config(format!(
            "{s} probes leave fewer than {r} null directions for a node with {rows} rows; increase the number of probes"
        )));
    }
    let p = nullspace(&ns.omega, r)?;
    let u = col(&ns.y.matmul(&p), r)?;
    let q = nullspace(&ns.psi, r)?;
    let v = col(&ns.z.matmul(&q), r)?;
    Ok(NodeBases { u, v, p, q })
}

/// `D = (I - U U^T) Y Omega^+ + U U^T ((I - V V^T) Z Psi^+)^T`.
pub fn compute_discrepancy<T: Scalar>(
    u: &DenseMatrix<T>,
    v: &DenseMatrix<T>,
    ns: &NodeSamples<T>,
    tol: T,
) -> Result<DenseMatrix<T>> {
    let mut left = lstsq_right(&ns.y, &ns.omega, tol)?;
    left.axpy(-T::one(), &u.matmul(&u.t_matmul(&left)));

    let mut right = lstsq_right(&ns.z, &ns.psi, tol)?;
    right.axpy(-T::one(), &v.matmul(&v.t_matmul(&right)));
    // U U^T W^T without forming W^T.
    let ut_wt = u.product(Op::T, &right, Op::T);
    left.axpy(T::one(), &u.matmul(&ut_wt));
    Ok(left)
}

/// Samples of the parent's `2r x 2r` problem, built from its two compressed children.
pub fn lift_to_parent<T: Scalar>(
    alpha: (&NodeSamples<T>, &NodeBlocks<T>),
    beta: (&NodeSamples<T>, &NodeBlocks<T>),
) -> NodeSamples<T> {
    let lift = |(ns, b): (&NodeSamples<T>, &NodeBlocks<T>)| {
        let omega = b.v.t_matmul(&ns.omega);
        let psi = b.u.t_matmul(&ns.psi);
        let mut y_res = ns.y.clone();
        y_res.axpy(-T::one(), &b.d.matmul(&ns.omega));
        let mut z_res = ns.z.clone();
        z_res.axpy(-T::one(), &b.d.t_matmul(&ns.psi));
        (omega, psi, b.u.t_matmul(&y_res), b.v.t_matmul(&z_res))
    };
    let (oa, pa, ya, za) = lift(alpha);
    let (ob, pb, yb, zb) = lift(beta);
    let stack = |a: &DenseMatrix<T>, b: &DenseMatrix<T>| {
        DenseMatrix::vstack(a, b).expect("siblings share the probe count")
    };
    NodeSamples {
        omega: stack(&oa, &ob),
        psi: stack(&pa, &pb),
        y: stack(&ya, &yb),
        z: stack(&za, &zb),
    }
}

/// `D_root = Y Omega^+`.
pub fn compute_root<T: Scalar>(ns: &NodeSamples<T>, tol: T) -> Result<DenseMatrix<T>> {
    lstsq_right(&ns.y, &ns.omega, tol)
}

/// Runs the leaf-to-root sweep on samples already drawn for `tree`.
pub fn compress_samples<T: Scalar>(
    samples: &SampleSet<T>,
    tree: &ClusterTree,
    rank: usize,
    tol: f64,
) -> Result<HbsFactorization<T>> {
    let n = tree.n();
    if samples.omega.rows() != n
        || samples.psi.shape() != samples.omega.shape()
        || samples.y.shape() != samples.omega.shape()
        || samples.z.shape() != samples.omega.shape()
    {
        return Err(HbsError::Dimension(format!(
            "sample set shapes do not match an {n}-row problem"
        )));
    }
    let tol = T::lit(tol);
    let nodes = tree.nodes();
    let mut blocks: Vec<Option<NodeBlocks<T>>> = vec![None; nodes.len()];
    let mut pending: Vec<Option<NodeSamples<T>>> = vec![None; nodes.len()];

    for level in (1..=tree.depth()).rev() {
        for node in tree.nodes_at_level(level)? {
            let ns = match node.children {
                None => leaf_node_samples(samples, node),
                Some((a, b)) => lift_children(&mut pending, &blocks, a, b),
            };
            let located = |e: HbsError| e.at_node(node.id, node.level);
            let bases = compress_node_bases(&ns, rank).map_err(located)?;
            let d = compute_discrepancy(&bases.u, &bases.v, &ns, tol).map_err(located)?;
            blocks[node.id] = Some(NodeBlocks {
                u: bases.u,
                v: bases.v,
                d,
            });
            pending[node.id] = Some(ns);
        }
    }
    let root_samples = lift_children(&mut pending, &blocks, 1, 2);
    let root = compute_root(&root_samples, tol).map_err(|e| e.at_node(0, 0))?;

    let blocks = blocks
        .into_iter()
        .skip(1)
        .map(|b| b.expect("every non-root node is compressed"))
        .collect();
    HbsFactorization::from_parts(tree.clone(), rank, blocks, root)
}

fn lift_children<T: Scalar>(
    pending: &mut [Option<NodeSamples<T>>],
    blocks: &[Option<NodeBlocks<T>>],
    a: usize,
    b: usize,
) -> NodeSamples<T> {
    let sa = pending[a].take().expect("children are compressed before parents");
    let sb = pending[b].take().expect("children are compressed before parents");
    let ba = blocks[a].as_ref().expect("children are compressed before parents");
    let bb = blocks[b].as_ref().expect("children are compressed before parents");
    lift_to_parent((&sa, ba), (&sb, bb))
}

pub fn compress<T: Scalar>(oracle: &MatVecOracle<T>, config: &CompressionConfig) -> Result<HbsFactorization<T>> {
    compress_with_stats(oracle, config).map(|(f, _)| f)
}

/// Compresses and reports timings, the post-sampling operation count and oracle usage.
pub fn compress_with_stats<T: Scalar>(
    oracle: &MatVecOracle<T>,
    config: &CompressionConfig,
) -> Result<(HbsFactorization<T>, CompressionStats)> {
    let (tree, s) = config.plan(oracle.n())?;
    let before = oracle.counts();

    let start = Instant::now();
    let samples = draw_samples(oracle, s, config.seed)?;
    let sample_time = start.elapsed();

    let start = Instant::now();
    let (f, multiply_adds) =
        flops::measure(|| compress_samples(&samples, &tree, config.rank, config.ill_conditioning_tol));
    let compress_time = start.elapsed();
    let f = f?;

    let after = oracle.counts();
    let stats = CompressionStats {
        sample_time,
        compress_time,
        multiply_adds,
        matvecs: MatVecCount {
            forward: after.forward - before.forward,
            adjoint: after.adjoint - before.adjoint,
        },
        probes: s,
    };
    Ok((f, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_probe_count() {
        let cfg = CompressionConfig::new(15, 30);
        let (tree, s) = cfg.plan(960).unwrap();
        assert_eq!(tree.max_leaf_size(), 30);
        assert_eq!(s, 45);
    }

    #[test]
    fn config_errors() {
        assert!(matches!(CompressionConfig::new(0, 10).plan(100), Err(HbsError::Config(_))));
        assert!(matches!(CompressionConfig::new(10, 8).plan(100), Err(HbsError::Config(_))));
        assert!(matches!(
            CompressionConfig::new(5, 10).with_probes(14).plan(100),
            Err(HbsError::Config(_))
        ));
        // Threshold 10 on 44 indices gives leaves of 5 or 6.
        assert!(matches!(CompressionConfig::new(6, 10).plan(44), Err(HbsError::Config(_))));
    }

    #[test]
    fn identity_oracle_samples() {
        let oracle = MatVecOracle::new(DenseMatrix::<f64>::identity(12));
        let s = draw_samples(&oracle, 4, RngSeed(2)).unwrap();
        assert_eq!(s.y, s.omega);
        assert_eq!(s.z, s.psi);
        assert_eq!(oracle.counts(), MatVecCount { forward: 4, adjoint: 4 });
    }
}
