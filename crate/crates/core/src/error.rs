use thiserror::Error;

use crate::exactmat::MatError;
use crate::framework::FrameworkError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Framework(#[from] FrameworkError),
    #[error("framework has {n} vertices but dimension {d} needs at least {d}")]
    TooFewVertices { n: usize, d: usize },
    #[error("stress is not in equilibrium (residual {residual})")]
    NotEquilibrium { residual: String },
    #[error("stress has {got} entries but the framework has {edges} edges")]
    StressLength { got: usize, edges: usize },
    #[error("framework has no edges")]
    NoEdges,
    #[error("affine span hypothesis fails: {0}")]
    SpanHypothesis(String),
    #[error("framework is not complete bipartite")]
    NotCompleteBipartite,
    #[error("invalid core parameters: {0}")]
    InvalidCoreSpec(String),
    #[error(
        "stress search out of scope: stress space has dimension {dim}, supply a stress explicitly"
    )]
    StressSearchOutOfScope { dim: usize },
    #[error("hypothesis gate failed: {}", reasons.join("; "))]
    GateFailure { reasons: Vec<String> },
    #[error("retry budget exhausted after {attempts} attempts (seed {seed})")]
    RetryExhausted { seed: u64, attempts: usize },
    #[error("construction check failed: {0}")]
    CheckFailed(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
