use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// The cyclic eigensolver failed to reach the off-diagonal target.
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal {off:.3e})")]
    NonConvergence { sweeps: usize, off: f64 },

    /// Cholesky hit a pivot at or below the positivity floor.
    #[error("matrix is not safely positive definite: pivot {pivot:.6e} at column {index} is at or below the floor {floor:.6e}")]
    Positivity {
        index: usize,
        pivot: f64,
        floor: f64,
    },

    /// A rotation target fell outside the two-column norm bracket.
    #[error("rotation target {target:.6e} lies outside the column-norm bracket [{lo:.6e}, {hi:.6e}]")]
    Bracket { target: f64, lo: f64, hi: f64 },

    /// Prescribed squared norms are not majorized by the available spectrum.
    #[error("prescribed squared norms are not admissible for the target operator: {detail}")]
    Majorization { detail: String },

    /// A completion with the requested number of vectors does not exist.
    #[error("not completable with {r} vectors: {reason}")]
    Infeasible { r: usize, reason: String },

    /// A finite norm list ran out before the construction could close.
    #[error("norm budget exhausted: needed {needed} terms but only {available} are prescribed")]
    Budget { needed: usize, available: usize },

    /// Parameters outside the operation's domain.
    #[error("invalid parameters: {0}")]
    Domain(String),

    /// Malformed problem or certificate file.
    #[error("invalid input file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
