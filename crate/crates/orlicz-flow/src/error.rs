use std::fmt;

/// Crate-wide error type.
///
/// Variants map onto the CLI exit codes: `Config` exits 2, everything else
/// that reaches the top level exits 3.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A measure was rejected (empty grid, nonpositive weight, label/weight length mismatch).
    InvalidMeasure(String),
    /// A grid function had the wrong length for the measure it was paired with.
    ShapeMismatch { expected: usize, got: usize },
    /// An evaluation was requested outside a function's effective domain,
    /// or an input violated a documented precondition.
    Domain(String),
    /// An iterative routine failed to converge; the message carries the best bound reached.
    Numeric(String),
    /// A minimizing-movement step failed (non-convergence, or the time-step
    /// gate for nonconvex energies refused the step).
    Step { step: usize, message: String },
    /// Invalid run configuration (bad JSON, unknown keys, inconsistent parameters).
    Config(String),
    /// A query outside the time interval covered by a discrete solution.
    Range(String),
    /// Filesystem failure while reading configs or writing reports.
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidMeasure(msg) => write!(f, "invalid measure: {msg}"),
            Error::ShapeMismatch { expected, got } => {
                write!(f, "shape mismatch: expected {expected} nodes, got {got}")
            }
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Numeric(msg) => write!(f, "numeric error: {msg}"),
            Error::Step { step, message } => write!(f, "step {step} failed: {message}"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Range(msg) => write!(f, "range error: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
