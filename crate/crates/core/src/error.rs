use thiserror::Error;

use crate::walk::EdgeState;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("interferometer needs at least 2 paths, got {0}")]
    TooFewPaths(usize),

    #[error("tail depth must be at least 4, got {0}")]
    TailTooShort(usize),

    #[error("amplitude on {0} would leave the truncated tail; increase tail_depth")]
    BoundaryViolation(EdgeState),

    #[error("edge state {0} is not part of the graph")]
    UnknownEdge(EdgeState),

    #[error("requested {steps} steps but tail depth {tail_depth} supports at most {}", tail_depth - 1)]
    TooManySteps { steps: usize, tail_depth: usize },

    #[error("invalid phase pattern: {0}")]
    InvalidPattern(String),

    #[error("ancilla qubit {index} is not normalized (|alpha|^2 + |beta|^2 = {norm})")]
    UnnormalizedAncilla { index: usize, norm: f64 },

    #[error("invalid ancilla specification: {0}")]
    InvalidAncilla(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("exit probability has imaginary part {0:e}; overlap matrix is not Hermitian")]
    NonHermitian(f64),

    #[error("exit probability {probability} exceeds coherence bound {bound}")]
    BoundViolated { probability: f64, bound: f64 },

    #[error("joint particle-ancilla simulation limited to {max} paths, got {got}")]
    OracleTooLarge { max: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty sample sequence")]
    EmptySamples,

    #[error("infeasible: {0}")]
    Infeasible(String),
}
