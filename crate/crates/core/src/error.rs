use thiserror::Error;

/// Errors raised by the linear algebra layer, the tree and the compressor.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HbsError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// A probe matrix was numerically rank deficient.
    #[error(
        "ill-conditioned probe matrix{} (|r_min|/|r_max| = {ratio:.3e}); increase the number of probes",
        location(*.node, *.level)
    )]
    IllConditioned {
        node: Option<usize>,
        level: Option<usize>,
        ratio: f64,
    },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

fn location(node: Option<usize>, level: Option<usize>) -> String {
    match (node, level) {
        (Some(n), Some(l)) => format!(" at node {n} (level {l})"),
        (Some(n), None) => format!(" at node {n}"),
        _ => String::new(),
    }
}

impl HbsError {
    /// Attaches a tree location to an ill-conditioning error; other errors pass through.
    pub fn at_node(self, node: usize, level: usize) -> Self {
        match self {
            HbsError::IllConditioned { ratio, .. } => HbsError::IllConditioned {
                node: Some(node),
                level: Some(level),
                ratio,
            },
            HbsError::Dimension(msg) => {
                HbsError::Dimension(format!("{msg} (node {node}, level {level})"))
            }
            other => other,
        }
    }
}

pub type Result<T, E = HbsError> = std::result::Result<T, E>;
