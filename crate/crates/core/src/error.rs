use alloc::string::String;
use alloc::vec::Vec;

use crate::perm::Label;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("label {0} does not occur in the order")]
    UnknownLabel(Label),
    #[error("a pairwise ordering needs two distinct labels, got {0} twice")]
    SameLabel(Label),
    #[error("dimension mismatch: expected {expected} components, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid group partition: {0}")]
    InvalidPartition(String),
    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),
    #[error("constraints are cyclic; no order satisfies them")]
    Cyclic,
    #[error("enumeration bound {bound} exceeds the cap {cap}")]
    CapExceeded { bound: u128, cap: u128 },
    #[error("closed form not applicable: {0}")]
    FormulaInapplicable(String),
    #[error("design measure has empty support")]
    EmptySupport,
    #[error("invalid design measure: {0}")]
    InvalidMeasure(String),
    #[error("singular moment matrix; null direction {direction:?}")]
    Singular { direction: Vec<f64> },
    #[error("model matrix is rank deficient at term {term}")]
    RankDeficient { term: String },
    #[error("not enough residual degrees of freedom: n={n}, p={p}")]
    InsufficientDf { n: usize, p: usize },
    #[error("no convergence after {iterations} iterations (gap {gap:e})")]
    NonConvergence { iterations: usize, gap: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid block design: {0}")]
    InvalidBlockDesign(String),
    #[error("component design search failed: {0}")]
    SearchExhausted(String),
    #[error("{0}")]
    InvalidArgument(String),
}
