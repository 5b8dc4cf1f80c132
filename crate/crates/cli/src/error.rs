use std::path::PathBuf;

use carleman_core::Error;

/// Process exit status.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const INVARIANT_FAIL: i32 = 1;
    pub const NOT_NORMAL: i32 = 2;
    pub const GRID_MISMATCH: i32 = 3;
    pub const UNKNOWN_SYMBOL: i32 = 4;
    pub const SECTOR_VIOLATION: i32 = 5;
    pub const USAGE: i32 = 64;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: malformed file: {msg}", path.display())]
    Malformed { path: PathBuf, msg: String },
    #[error("grid too coarse for the requested family: orthonormality defect {defect:e}")]
    GridTooCoarse { defect: f64 },
    #[error("kernel is not normal: commutator residual {residual:e}")]
    NotNormal { residual: f64 },
    #[error("kernel and eigensystem live on different grids")]
    GridMismatch,
    #[error("unknown symbol: {0}")]
    UnknownSymbol(String),
    #[error("sector hypothesis fails: {0}")]
    Sector(String),
    #[error("{} check(s) failed: {}", .0.len(), .0.join(", "))]
    InvariantFail(Vec<String>),
    #[error(transparent)]
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Malformed { .. } => exit::USAGE,
            CliError::GridTooCoarse { .. } | CliError::InvariantFail(_) | CliError::Core(_) => exit::INVARIANT_FAIL,
            CliError::NotNormal { .. } => exit::NOT_NORMAL,
            CliError::GridMismatch => exit::GRID_MISMATCH,
            CliError::UnknownSymbol(_) => exit::UNKNOWN_SYMBOL,
            CliError::Sector(_) => exit::SECTOR_VIOLATION,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotNormal { residual } => CliError::NotNormal { residual },
            Error::IncompatibleGrids => CliError::GridMismatch,
            Error::SectorTooWide { .. } | Error::SectorRequired(_) => CliError::Sector(e.to_string()),
            other => CliError::Core(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
