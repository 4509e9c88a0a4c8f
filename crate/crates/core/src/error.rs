use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The hyperedge-list document violated the format.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A document or edge list with no hyperedges at all.
    #[error("hypergraph has no hyperedges")]
    NoHyperedges,

    /// A programmatically supplied hyperedge broke an invariant.
    #[error("invalid hyperedge: {0}")]
    InvalidHyperedge(String),

    /// A node has hyperdegree zero, so the walk is undefined there.
    #[error("node `{label}` has hyperdegree 0; the random walk is undefined there")]
    IsolatedNode { label: String },

    /// The walk requires a connected hypergraph.
    #[error("hypergraph walk is not connected ({detail}); restrict to the largest connected component first")]
    Connectivity { detail: String },

    /// Reset probability outside `[0, 1)` or reset node out of range.
    #[error("invalid reset specification: {0}")]
    InvalidReset(String),

    /// A numerical routine failed to converge or produced a singular system.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
