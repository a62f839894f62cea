//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid system shape: {0}")]
    InvalidShape(String),

    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),

    #[error("label {label} >= dim {dim} at party {party}")]
    LabelOutOfRange { party: usize, label: u32, dim: u32 },

    #[error("term has {got} labels, shape has {expected} parties")]
    ArityMismatch { got: usize, expected: usize },

    #[error("duplicate basis term {labels:?} cannot be merged exactly")]
    InexactMerge { labels: Vec<u32> },

    #[error("shape mismatch: {0:?} vs {1:?}")]
    ShapeMismatch(Vec<u32>, Vec<u32>),

    #[error("party index {party} out of range (set has {arity} parties)")]
    PartyOutOfRange { party: usize, arity: usize },

    #[error("state {index} is the zero state; zero states are not allowed in a set")]
    ZeroState { index: usize },

    #[error("{family} requires {hypothesis} (got {given})")]
    Hypothesis {
        family: &'static str,
        hypothesis: &'static str,
        given: String,
    },

    #[error("states {i} and {j} are not orthogonal (relative overlap {overlap:.3e})")]
    NotOrthogonal { i: usize, j: usize, overlap: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported format_version {0} (expected {1})")]
    UnsupportedFormatVersion(u32, u32),

    #[error("invalid document: {0}")]
    InvalidDocument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
