use core::fmt;

/// Errors produced by the core algorithms.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Vector or matrix dimensions disagree.
    DimensionMismatch { expected: usize, found: usize },
    /// All centers coincide, so the spread-based width would be zero.
    DegenerateCenters,
    /// Hidden-node growth requested at the configured maximum.
    CapReached { max_hidden: usize },
    /// Every candidate vertex is forbidden.
    NoAdmissibleVertex,
    /// An ant produced a zero-cost solution; the search stops on it.
    ZeroCostSolution { ant: usize },
    /// The mass matrix is singular or too badly conditioned to invert.
    SingularMass { condition: f64 },
    /// Target position lies outside the reachable annulus.
    OutOfWorkspace { radius: f64 },
    /// Metric window selected no trace rows.
    EmptyWindow,
    /// A dataset, sample list or center list was empty.
    Empty(&'static str),
    /// A configuration value violates its invariant.
    InvalidConfig(&'static str),
    /// Training error became non-finite; the learning rate is too large
    /// for the current hidden layer.
    Diverged { epoch: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::DegenerateCenters => f.write_str("all centers coincide (zero spread)"),
            Error::CapReached { max_hidden } => {
                write!(f, "hidden node cap of {max_hidden} reached")
            }
            Error::NoAdmissibleVertex => f.write_str("no admissible vertex left"),
            Error::ZeroCostSolution { ant } => write!(f, "ant {ant} found a zero-cost solution"),
            Error::SingularMass { condition } => {
                write!(f, "mass matrix singular (condition number {condition:e})")
            }
            Error::OutOfWorkspace { radius } => {
                write!(f, "planar radius {radius} outside the reachable workspace")
            }
            Error::EmptyWindow => f.write_str("metric window contains no samples"),
            Error::Empty(what) => write!(f, "{what} must not be empty"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::Diverged { epoch } => write!(f, "training diverged at epoch {epoch}"),
        }
    }
}

impl core::error::Error for Error {}
