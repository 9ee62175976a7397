//! Telescoping HBS factorizations and their linear-time application.

use crate::error::{HbsError, Result};
use crate::linalg::matrix::{DenseMatrix, Op};
use crate::linalg::operator::LinearOperator;
use crate::linalg::ortho::col;
use crate::linalg::random::{gaussian_from, rng_for, stream, RngSeed};
use crate::scalar::Scalar;
use crate::tree::ClusterTree;

/// Largest dimension [`HbsFactorization::to_dense`] will materialize.
pub const DEFAULT_DENSE_CAP: usize = 8192;

/// Basis and discrepancy blocks of one non-root node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeBlocks<T> {
    pub u: DenseMatrix<T>,
    pub v: DenseMatrix<T>,
    pub d: DenseMatrix<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HbsFactorization<T> {
    tree: ClusterTree,
    rank: usize,
    /// Indexed by node id minus one.
    blocks: Vec<NodeBlocks<T>>,
    root: DenseMatrix<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelStorage {
    pub level: usize,
    pub basis_floats: usize,
    pub discrepancy_floats: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StorageReport {
    pub total_floats: usize,
    pub floats_per_dof: f64,
    pub levels: Vec<LevelStorage>,
}

impl<T: Scalar> HbsFactorization<T> {
    /// Assembles a factorization, checking every block shape against the tree.
    pub fn from_parts(
        tree: ClusterTree,
        rank: usize,
        blocks: Vec<NodeBlocks<T>>,
        root: DenseMatrix<T>,
    ) -> Result<Self> {
        if blocks.len() + 1 != tree.nodes().len() {
            return Err(HbsError::Dimension(format!(
                "{} node blocks for a tree of {} nodes",
                blocks.len(),
                tree.nodes().len()
            )));
        }
        for (b, node) in blocks.iter().zip(&tree.nodes()[1..]) {
            let rows = if node.is_leaf() { node.size() } else { 2 * rank };
            let check = |name: &str, m: &DenseMatrix<T>, shape: (usize, usize)| {
                if m.shape() != shape {
                    return Err(HbsError::Dimension(format!(
                        "node {} {name} is {}x{}, expected {}x{}",
                        node.id,
                        m.rows(),
                        m.cols(),
                        shape.0,
                        shape.1
                    )));
                }
                if !m.is_finite() {
                    return Err(HbsError::Dimension(format!(
                        "node {} {name} has non-finite entries",
                        node.id
                    )));
                }
                Ok(())
            };
            check("U", &b.u, (rows, rank))?;
            check("V", &b.v, (rows, rank))?;
            check("D", &b.d, (rows, rows))?;
        }
        if root.shape() != (2 * rank, 2 * rank) || !root.is_finite() {
            return Err(HbsError::Dimension(format!(
                "root discrepancy is {}x{}, expected {r}x{r} and finite",
                root.rows(),
                root.cols(),
                r = 2 * rank
            )));
        }
        Ok(Self {
            tree,
            rank,
            blocks,
            root,
        })
    }

    pub fn into_parts(self) -> (ClusterTree, usize, Vec<NodeBlocks<T>>, DenseMatrix<T>) {
        (self.tree, self.rank, self.blocks, self.root)
    }

    pub fn tree(&self) -> &ClusterTree {
        &self.tree
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn n(&self) -> usize {
        self.tree.n()
    }

    /// Blocks of a non-root node.
    pub fn node_blocks(&self, id: usize) -> &NodeBlocks<T> {
        assert!(id > 0, "the root has no basis blocks");
        &self.blocks[id - 1]
    }

    pub fn blocks(&self) -> &[NodeBlocks<T>] {
        &self.blocks
    }

    pub fn root_discrepancy(&self) -> &DenseMatrix<T> {
        &self.root
    }

    /// Largest `||U^T U - I||_F` or `||V^T V - I||_F` over all nodes.
    pub fn max_basis_defect(&self) -> T {
        let eye = DenseMatrix::identity(self.rank);
        self.blocks
            .iter()
            .flat_map(|b| [&b.u, &b.v])
            .map(|m| m.t_matmul(m).sub(&eye).norm_fro())
            .fold(T::zero(), T::max)
    }

    pub fn apply(&self, q: &[T]) -> Result<Vec<T>> {
        self.check_len(q.len())?;
        Ok(self.sweep(&DenseMatrix::column_vector(q), false).into_vec())
    }

    pub fn apply_transpose(&self, q: &[T]) -> Result<Vec<T>> {
        self.check_len(q.len())?;
        Ok(self.sweep(&DenseMatrix::column_vector(q), true).into_vec())
    }

    pub fn apply_matrix(&self, q: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        self.check_len(q.rows())?;
        Ok(self.sweep(q, false))
    }

    pub fn apply_transpose_matrix(&self, q: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        self.check_len(q.rows())?;
        Ok(self.sweep(q, true))
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n() {
            return Err(HbsError::Dimension(format!(
                "input has {len} rows, factorization is {n}x{n}",
                n = self.n()
            )));
        }
        Ok(())
    }

    /// Upward then downward pass; `transpose` swaps the bases and transposes every `D`.
    fn sweep(&self, x: &DenseMatrix<T>, transpose: bool) -> DenseMatrix<T> {
        let nodes = self.tree.nodes();
        let c = x.cols();
        type Pick<T> = fn(&NodeBlocks<T>) -> &DenseMatrix<T>;
        let (out_basis, in_basis): (Pick<T>, Pick<T>) =
            if transpose {
                (|b| &b.v, |b| &b.u)
            } else {
                (|b| &b.u, |b| &b.v)
            };
        let d_op = if transpose { Op::T } else { Op::N };

        // Inputs seen by each node: the raw slice at leaves, stacked children above.
        let mut stacked: Vec<Option<DenseMatrix<T>>> = vec![None; nodes.len()];
        let mut qhat: Vec<Option<DenseMatrix<T>>> = vec![None; nodes.len()];
        for node in nodes.iter().rev() {
            let input = match node.children {
                None => x.row_block(node.range.clone()),
                Some((a, b)) => {
                    let top = qhat[a].take().expect("child visited first");
                    let bottom = qhat[b].take().expect("child visited first");
                    DenseMatrix::vstack(&top, &bottom).expect("children share a width")
                }
            };
            if node.id != 0 {
                let blocks = &self.blocks[node.id - 1];
                qhat[node.id] = Some(in_basis(blocks).t_matmul(&input));
            }
            stacked[node.id] = Some(input);
        }

        let mut out = DenseMatrix::zeros(self.n(), c);
        let r = self.rank;
        let mut uhat: Vec<Option<DenseMatrix<T>>> = vec![None; nodes.len()];
        for node in nodes {
            let input = stacked[node.id].take().expect("filled by the upward pass");
            let result = if node.id == 0 {
                self.root.product(d_op, &input, Op::N)
            } else {
                let blocks = &self.blocks[node.id - 1];
                let mut y = blocks.d.product(d_op, &input, Op::N);
                let up = uhat[node.id].take().expect("parent visited first");
                y.axpy(T::one(), &out_basis(blocks).matmul(&up));
                y
            };
            match node.children {
                None => out.set_block(node.range.start, 0, &result),
                Some((a, b)) => {
                    uhat[a] = Some(result.row_block(0..r));
                    uhat[b] = Some(result.row_block(r..2 * r));
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> Result<DenseMatrix<T>> {
        self.to_dense_with_cap(DEFAULT_DENSE_CAP)
    }

    /// Expands the telescoping factorization level by level.
    pub fn to_dense_with_cap(&self, cap: usize) -> Result<DenseMatrix<T>> {
        let n = self.n();
        if n > cap {
            return Err(HbsError::Resource(format!(
                "refusing to materialize a {n}x{n} matrix (cap {cap})"
            )));
        }
        let r = self.rank;
        // `core` is indexed by the rank-r coordinates of the nodes on `level`.
        let mut core = self.root.clone();
        for level in 1..=self.tree.depth() {
            let level_nodes = self.tree.nodes_at_level(level)?;
            let leaf_level = level == self.tree.depth();
            let offsets: Vec<usize> = if leaf_level {
                level_nodes.iter().map(|nd| nd.range.start).collect()
            } else {
                (0..level_nodes.len()).map(|i| 2 * r * i).collect()
            };
            let dim = if leaf_level { n } else { 2 * r * level_nodes.len() };
            let mut next = DenseMatrix::zeros(dim, dim);
            for (i, ni) in level_nodes.iter().enumerate() {
                let bi = &self.blocks[ni.id - 1];
                let left = bi.u.matmul(&core.block(i * r..(i + 1) * r, 0..core.cols()));
                for (j, nj) in level_nodes.iter().enumerate() {
                    let bj = &self.blocks[nj.id - 1];
                    let piece = left.col_block(j * r..(j + 1) * r).matmul_t(&bj.v);
                    next.set_block(offsets[i], offsets[j], &piece);
                }
                let mut diag = next.block(
                    offsets[i]..offsets[i] + bi.d.rows(),
                    offsets[i]..offsets[i] + bi.d.cols(),
                );
                diag.axpy(T::one(), &bi.d);
                next.set_block(offsets[i], offsets[i], &diag);
            }
            core = next;
        }
        Ok(core)
    }

    pub fn storage(&self) -> StorageReport {
        let mut levels = vec![LevelStorage {
            level: 0,
            basis_floats: 0,
            discrepancy_floats: self.root.len(),
        }];
        for level in 1..=self.tree.depth() {
            let mut entry = LevelStorage {
                level,
                basis_floats: 0,
                discrepancy_floats: 0,
            };
            for node in self.tree.nodes_at_level(level).expect("level within depth") {
                let b = &self.blocks[node.id - 1];
                entry.basis_floats += b.u.len() + b.v.len();
                entry.discrepancy_floats += b.d.len();
            }
            levels.push(entry);
        }
        let total_floats = levels
            .iter()
            .map(|l| l.basis_floats + l.discrepancy_floats)
            .sum();
        StorageReport {
            total_floats,
            floats_per_dof: total_floats as f64 / self.n() as f64,
            levels,
        }
    }
}

impl<T: Scalar> LinearOperator<T> for HbsFactorization<T> {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply_block(&self, x: &DenseMatrix<T>) -> DenseMatrix<T> {
        self.apply_matrix(x).expect("operator dimension mismatch")
    }

    fn apply_transpose_block(&self, x: &DenseMatrix<T>) -> DenseMatrix<T> {
        self.apply_transpose_matrix(x).expect("operator dimension mismatch")
    }
}

/// A random factorization whose off-diagonal blocks have rank at most `k`.
///
/// Bases are orthonormalized Gaussian blocks; each discrepancy is a Gaussian
/// block with its `U (.) V^T` component removed, which is the form the
/// compressor recovers.
pub fn random_hbs<T: Scalar>(tree: &ClusterTree, k: usize, seed: RngSeed) -> Result<HbsFactorization<T>> {
    let min_leaf = tree.min_leaf_size();
    if k > min_leaf {
        return Err(HbsError::Dimension(format!(
            "rank {k} exceeds the smallest leaf ({min_leaf} indices)"
        )));
    }
    let mut rng = rng_for(seed, stream::SYNTHETIC);
    let mut blocks = Vec::with_capacity(tree.nodes().len() - 1);
    for node in &tree.nodes()[1..] {
        let rows = if node.is_leaf() { node.size() } else { 2 * k };
        let u = col(&gaussian_from(&mut rng, rows, k), k)?;
        let v = col(&gaussian_from(&mut rng, rows, k), k)?;
        let g: DenseMatrix<T> = gaussian_from(&mut rng, rows, rows);
        let core = u.t_matmul(&g).matmul(&v);
        let d = g.sub(&u.matmul(&core).matmul_t(&v));
        blocks.push(NodeBlocks { u, v, d });
    }
    let root = gaussian_from(&mut rng, 2 * k, 2 * k);
    HbsFactorization::from_parts(tree.clone(), k, blocks, root)
}
