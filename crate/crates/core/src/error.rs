use thiserror::Error;

use crate::basis::{BasisKind, Domain};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {index} outside retained range {min}..={max}")]
    IndexOutOfRange { index: i64, min: i64, max: i64 },

    #[error("point {theta} lies outside the domain {domain}")]
    OutsideDomain { theta: f64, domain: Domain },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("{kind} basis cannot be used on domain {domain}")]
    BasisDomainMismatch { kind: BasisKind, domain: Domain },

    #[error("quadrature needs at least {required} nodes, got {nodes}")]
    InsufficientNodes { nodes: usize, required: usize },

    #[error("non-finite value {value} at x = {x}")]
    NonFinite { x: f64, value: f64 },

    #[error("coefficient vectors have different bases")]
    SpecMismatch,

    #[error("{op} is not supported for the {kind} basis")]
    Unsupported { op: &'static str, kind: BasisKind },

    #[error("invalid posterior: {0}")]
    InvalidPosterior(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension {index}: {source}")]
    Dimension {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures that come from the numbers rather than from the
    /// shape of the input (zero evidence, negative mass, complex evidence).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::InvalidPosterior(_) => true,
            Error::Dimension { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
