use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("incompatible grids")]
    IncompatibleGrids,
    #[error("non-finite kernel sample at ({row}, {col})")]
    NonFiniteKernel { row: usize, col: usize },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("kernel is not normal (commutator residual {residual:e})")]
    NotNormal { residual: f64 },
    #[error("family is not orthonormal (defect {defect:e})")]
    InvalidFamily { defect: f64 },
    #[error("spectrum does not fit a sector of angle < pi (eigenvalue {index} has rotated real part {real_part:e})")]
    SectorTooWide { index: usize, real_part: f64 },
    #[error("all eigenvalues are below the zero threshold")]
    ZeroOperator,
    #[error("truncation order {order} out of range 0..={count}")]
    OrderOutOfRange { order: usize, count: usize },
    #[error("eigenvalue {value:e} is negative beyond tolerance")]
    NotPositive { value: f64 },
    #[error("invalid index range {p}..={q}")]
    InvalidRange { p: usize, q: usize },
    #[error("a valid sector is required: {0}")]
    SectorRequired(String),
    #[error("symbol error: {0}")]
    Symbol(String),
    #[error("cutoff sequence must be non-empty, positive and strictly decreasing")]
    InvalidSequence,
    #[error("epsilons reversed: need 0 < eps_m <= eps_n, got {eps_m:e} and {eps_n:e}")]
    ReversedEpsilons { eps_m: f64, eps_n: f64 },
    #[error("unknown check id `{0}`")]
    UnknownCheck(String),
}
