use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// `L(w) + J` is not positive definite.
    #[error("singular model: smallest eigenvalue of L(w)+J is {eigenvalue:e}{}", fmt_iter(.iteration))]
    SingularModel {
        eigenvalue: f64,
        iteration: Option<usize>,
    },

    #[error("internal assertion failed: {0}")]
    InternalAssertion(String),

    #[error("graph is disconnected: {zero_eigenvalues} near-zero Laplacian eigenvalues")]
    Disconnected { zero_eigenvalues: usize },

    #[error("graph generation failed: {0}")]
    Generation(String),

    #[error("cannot rescale a graph with zero trace")]
    ZeroTrace,

    #[error("row {row} has zero variance")]
    ZeroVariance { row: usize },

    #[error("metric undefined: true signal column {column} is zero")]
    UndefinedMetric { column: usize },

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {msg}", .path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("config: {0}")]
    Config(String),
}

fn fmt_iter(iteration: &Option<usize>) -> String {
    match iteration {
        Some(j) => format!(" (iteration {j})"),
        None => String::new(),
    }
}

impl Error {
    /// Process exit code: 1 for numerical/model failures, 2 for usage and file errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. }
            | Error::Parse { .. }
            | Error::Config(_)
            | Error::InvalidArgument(_)
            | Error::DimensionMismatch(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn at_iteration(self, j: usize) -> Self {
        match self {
            Error::SingularModel { eigenvalue, .. } => Error::SingularModel {
                eigenvalue,
                iteration: Some(j),
            },
            other => other,
        }
    }
}
