use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A Gamma-type integral diverges because an exponent is `<= -1`.
    #[error("divergent integral: exponent {value} at coordinate {index} must exceed -1")]
    Divergent { index: usize, value: f64 },

    #[error("unsupported dimension {dim} (maximum {max})")]
    UnsupportedDimension { dim: usize, max: usize },

    /// Successive refinements failed to agree within the requested tolerance.
    #[error("no convergence in {what}: last relative change {change:e} after {nodes} nodes")]
    NonConvergence { what: &'static str, change: f64, nodes: usize },

    /// A black-box function was asked for derivatives it cannot supply.
    #[error("derivative order {requested} exceeds the supported order {available}")]
    DerivativeCapability { requested: usize, available: usize },

    #[error("geometry error: {0}")]
    Geometry(String),

    /// A predictor was evaluated where its asymptotic regime is empty.
    #[error("outside validity: {0}")]
    OutsideValidity(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
