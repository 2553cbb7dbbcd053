use std::fmt;

/// Location of a cell in the structured grid (interior indexing).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellIndex {
    pub i: usize,
    pub j: usize,
}

impl CellIndex {
    pub fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }
}

impl fmt::Display for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("thermodynamic failure: {0}")]
    Thermodynamic(String),

    #[error("closure failure at cell {cell:?}: {reason}")]
    Closure {
        cell: Option<CellIndex>,
        reason: String,
    },

    #[error("root solve failed to bracket: {0}")]
    NoBracket(String),

    #[error("degenerate Riemann problem: {0}")]
    DegenerateWaves(String),

    #[error("vacuum generated by Riemann data: {0}")]
    Vacuum(String),

    #[error("iteration diverged: {0}")]
    Divergence(String),

    #[error("linear solver did not converge after {iterations} iterations (residual {residual:e})")]
    LinearSolver {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("Picard iteration did not converge after {iterations} iterations (last change {last_change:e})")]
    Picard { iterations: usize, last_change: f64 },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("stage '{stage}' failed at t = {time:e}: {source}")]
    Stage {
        stage: &'static str,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn closure(reason: impl Into<String>) -> Self {
        Error::Closure {
            cell: None,
            reason: reason.into(),
        }
    }

    /// Attach a cell index to closure errors that do not carry one yet.
    pub fn at_cell(self, cell: CellIndex) -> Self {
        match self {
            Error::Closure { cell: None, reason } => Error::Closure {
                cell: Some(cell),
                reason,
            },
            Error::Thermodynamic(reason) => Error::Closure {
                cell: Some(cell),
                reason,
            },
            Error::NoBracket(reason) => Error::Closure {
                cell: Some(cell),
                reason: format!("no bracket: {reason}"),
            },
            other => other,
        }
    }

    /// Exit status for the command-line driver: 2 for configuration problems,
    /// 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 2,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
