//! Binary container for factorizations.
//!
//! Layout, all integers little endian:
//!
//! ```text
//! "HBSF"  u32 version
//! u64 n, u64 rank, u64 depth, u64 leaf_threshold, u64 node_count
//! per non-root node in level order: u64 rows/cols of U, V, D   (6 x u64)
//! u64 rows/cols of the root discrepancy
//! f64 blocks, column-major: U, V, D per non-root node in level order, root D last
//! ```

use std::fs;
use std::path::Path;

use hbs_core::{build_tree, DenseMatrix, Hbs, HbsFactorization, NodeBlocks};

use crate::error::{BenchError, Result};

pub const MAGIC: &[u8; 4] = b"HBSF";
pub const VERSION: u32 = 1;

pub fn to_bytes(f: &Hbs) -> Vec<u8> {
    let tree = f.tree();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for v in [f.n(), f.rank(), tree.depth(), tree.leaf_threshold(), tree.nodes().len()] {
        out.extend_from_slice(&(v as u64).to_le_bytes());
    }
    for b in f.blocks() {
        for m in [&b.u, &b.v, &b.d] {
            out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
            out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
        }
    }
    let root = f.root_discrepancy();
    out.extend_from_slice(&(root.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(root.cols() as u64).to_le_bytes());
    for b in f.blocks() {
        for m in [&b.u, &b.v, &b.d] {
            m.as_slice().iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes()));
        }
    }
    root.as_slice().iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes()));
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, len: usize) -> Result<&[u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| BenchError::Format(format!("truncated at byte {}", self.pos)))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn usize(&mut self) -> Result<usize> {
        let v = u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes"));
        usize::try_from(v).map_err(|_| BenchError::Format(format!("value {v} does not fit in memory")))
    }

    fn shape(&mut self) -> Result<(usize, usize)> {
        Ok((self.usize()?, self.usize()?))
    }

    fn matrix(&mut self, (rows, cols): (usize, usize)) -> Result<DenseMatrix<f64>> {
        let len = rows
            .checked_mul(cols)
            .and_then(|l| l.checked_mul(8))
            .ok_or_else(|| BenchError::Format(format!("block {rows}x{cols} is too large")))?;
        let data = self
            .take(len)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Ok(DenseMatrix::from_column_major(rows, cols, data)?)
    }
}

pub fn from_bytes(bytes: &[u8]) -> Result<Hbs> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(BenchError::Format("bad magic bytes".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(BenchError::Format(format!("unsupported version {version}, expected {VERSION}")));
    }
    let (n, rank, depth, leaf_threshold, node_count) = (r.usize()?, r.usize()?, r.usize()?, r.usize()?, r.usize()?);
    // Check the header against the file size before allocating a tree.
    let header_bytes = node_count.saturating_mul(48);
    let plausible = (1..usize::BITS as usize - 1).contains(&depth)
        && node_count == (1usize << (depth + 1)) - 1
        && header_bytes <= bytes.len() - r.pos
        && n.div_ceil(1 << depth) <= leaf_threshold;
    if !plausible {
        return Err(BenchError::Format(format!(
            "implausible header: depth {depth}, {node_count} nodes in a {}-byte file",
            bytes.len()
        )));
    }
    let tree = build_tree(n, leaf_threshold).map_err(|e| BenchError::Format(format!("bad tree header: {e}")))?;
    if tree.depth() != depth || tree.nodes().len() != node_count {
        return Err(BenchError::Format(format!(
            "header says depth {depth} with {node_count} nodes, the tree for n = {n} has depth {} with {}",
            tree.depth(),
            tree.nodes().len()
        )));
    }
    let mut shapes = Vec::with_capacity(node_count - 1);
    for _ in 1..node_count {
        shapes.push([r.shape()?, r.shape()?, r.shape()?]);
    }
    let root_shape = r.shape()?;
    let mut blocks = Vec::with_capacity(shapes.len());
    for [su, sv, sd] in shapes {
        blocks.push(NodeBlocks {
            u: r.matrix(su)?,
            v: r.matrix(sv)?,
            d: r.matrix(sd)?,
        });
    }
    let root = r.matrix(root_shape)?;
    if r.pos != bytes.len() {
        return Err(BenchError::Format(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    HbsFactorization::from_parts(tree, rank, blocks, root).map_err(|e| BenchError::Format(e.to_string()))
}

pub fn save_factorization(f: &Hbs, path: &Path) -> Result<()> {
    fs::write(path, to_bytes(f))?;
    Ok(())
}

pub fn load_factorization(path: &Path) -> Result<Hbs> {
    from_bytes(&fs::read(path)?)
}
