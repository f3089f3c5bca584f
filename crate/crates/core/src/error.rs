//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The (K, Q) combination is not one of the classification cases.
    #[error("unknown classification case: {0}")]
    UnknownCase(String),

    /// A model parameter is missing or outside its admissible range.
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),

    /// A coordinate left the overflow guard while integrating a group flow.
    #[error("group flow blew up for generator `{label}` at eps={eps}")]
    FlowBlowup { label: String, eps: f64 },

    /// Flowed nodes of one time layer no longer share a single time value.
    #[error("flowed stencil layers are skewed in time (max skew {skew:e})")]
    LayerSkew { skew: f64 },

    /// A flowed stencil left the admissible region of a scheme.
    #[error("flowed stencil is inadmissible for {scheme}: {reason}")]
    InadmissibleImage { scheme: String, reason: String },

    /// Nonpositive value where a power/log is taken, zero steps, or a
    /// transform evaluated outside its validity strip.
    #[error("domain error: {0}")]
    DomainError(String),

    /// An implicit solver failed to converge.
    #[error("solver diverged after {iterations} iterations (residual {residual:e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    /// An updated value left (0, overflow guard): the time step is too
    /// large for the explicit scheme, or node trajectories crossed.
    #[error("stability breach: {0}")]
    StabilityBreach(String),

    /// A layer does not carry the mass-coordinate data an operation needs.
    #[error("layer carries no mass grid: {0}")]
    MissingMassGrid(String),

    /// Two layers that must share grid data do not.
    #[error("layer mismatch: {0}")]
    LayerMismatch(String),

    /// The initial profile is nonpositive where a density is required.
    #[error("nonpositive density: u0({x}) = {value}")]
    NonpositiveDensity { x: f64, value: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed config, CSV, or CLI input.
    #[error("parse error: {0}")]
    Parse(String),
}
