//! Fully populated binary trees over contiguous index ranges.

use std::ops::Range;

use crate::error::{HbsError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: usize,
    pub level: usize,
    pub range: Range<usize>,
    pub parent: Option<usize>,
    pub children: Option<(usize, usize)>,
}

impl Node {
    pub fn size(&self) -> usize {
        self.range.len()
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }
}

/// Level-ordered tree: node `i` has children `2i + 1` and `2i + 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterTree {
    n: usize,
    depth: usize,
    leaf_threshold: usize,
    nodes: Vec<Node>,
}

/// Splits `[0, n)` evenly until every leaf holds at most `leaf_threshold` indices.
///
/// All leaves sit at one global depth, the smallest `L` with
/// `ceil(n / 2^L) <= leaf_threshold`. Left children take the larger half.
pub fn build_tree(n: usize, leaf_threshold: usize) -> Result<ClusterTree> {
    if n < 2 {
        return Err(HbsError::Config(format!("tree needs at least 2 indices, got {n}")));
    }
    if leaf_threshold < 2 {
        return Err(HbsError::Config(format!(
            "leaf threshold must be at least 2, got {leaf_threshold}"
        )));
    }
    if leaf_threshold >= n {
        return Err(HbsError::Config(format!(
            "tree would have no levels: leaf threshold {leaf_threshold} >= n = {n}"
        )));
    }

    let mut depth = 1;
    while n.div_ceil(1 << depth) > leaf_threshold {
        depth += 1;
    }

    let total = (1usize << (depth + 1)) - 1;
    let mut nodes = Vec::with_capacity(total);
    nodes.push(Node {
        id: 0,
        level: 0,
        range: 0..n,
        parent: None,
        children: None,
    });
    for id in 0..total {
        let level = nodes[id].level;
        if level == depth {
            continue;
        }
        let range = nodes[id].range.clone();
        let mid = range.start + range.len().div_ceil(2);
        let (left, right) = (2 * id + 1, 2 * id + 2);
        nodes[id].children = Some((left, right));
        for (child, r) in [(left, range.start..mid), (right, mid..range.end)] {
            nodes.push(Node {
                id: child,
                level: level + 1,
                range: r,
                parent: Some(id),
                children: None,
            });
        }
    }
    debug_assert_eq!(nodes.len(), total);

    Ok(ClusterTree {
        n,
        depth,
        leaf_threshold,
        nodes,
    })
}

impl ClusterTree {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn leaf_threshold(&self) -> usize {
        self.leaf_threshold
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    /// Nodes on `level`, in ascending range order.
    pub fn nodes_at_level(&self, level: usize) -> Result<&[Node]> {
        if level > self.depth {
            return Err(HbsError::Dimension(format!(
                "level {level} exceeds tree depth {}",
                self.depth
            )));
        }
        let start = (1 << level) - 1;
        Ok(&self.nodes[start..2 * start + 1])
    }

    pub fn leaves(&self) -> &[Node] {
        self.nodes_at_level(self.depth).expect("depth is a valid level")
    }

    pub fn max_leaf_size(&self) -> usize {
        self.leaves().iter().map(Node::size).max().unwrap_or(0)
    }

    pub fn min_leaf_size(&self) -> usize {
        self.leaves().iter().map(Node::size).min().unwrap_or(0)
    }
}
