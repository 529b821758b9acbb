use alloc::string::String;

/// Errors raised by the polytope kernels.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("input contains NaN or infinite entries")]
    NonFinite,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix has rank {rank}, {required} required")]
    RankDeficient { rank: usize, required: usize },
    #[error("simplex iteration limit of {limit} pivots exceeded")]
    CycleLimit { limit: usize },
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("points span an affine subspace of dimension {dim}, {required} required")]
    DegenerateInput { dim: usize, required: usize },
    #[error("{candidates} candidates exceed the complexity guard of {limit}")]
    ComplexityGuard { candidates: u128, limit: u128 },
    #[error("half-space system does not describe a bounded full-dimensional region")]
    UnboundedRegion,
    #[error("torque bias is outside the achievable torque set")]
    InfeasibleTorque,
}

pub type Result<T> = core::result::Result<T, Error>;
