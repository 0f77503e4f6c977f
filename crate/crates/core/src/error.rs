use thiserror::Error;

/// Failure modes shared across the crate.
///
/// Numerical checkers distinguish between *verdicts* (supported / refuted /
/// inconclusive, reported in band) and *errors* (the computation itself could
/// not be carried out as requested).
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A geometric request does not make sense for the given sector kind.
    #[error("geometry: {0}")]
    Geometry(String),

    /// A window or index sweep would read past the data actually present.
    #[error("horizon too small: {0}")]
    Horizon(String),

    /// Supports left the truncated domain; the caller must enlarge it.
    #[error("truncation: needed radius {needed}, grid covers {have}")]
    Truncation { needed: f64, have: f64 },

    /// Two grid functions live on incompatible grids.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Evaluation produced a non-finite number.
    #[error("non-finite data: {0}")]
    Data(String),

    /// A catalog lookup used a name that is not registered.
    #[error("unknown name: {0}")]
    UnknownName(String),

    /// A hypercyclic-vector construction aborted; diagnostics attached.
    #[error("construction failed: {0}")]
    Construction(String),

    /// I/O and serialization problems.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization problems.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
