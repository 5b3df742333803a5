use thiserror::Error;

/// Errors raised by graph construction, solvers and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("unknown edge id {0}")]
    UnknownEdge(u64),
    #[error("unknown vertex id {0}")]
    UnknownVertex(u64),
    #[error("duplicate point on edge {edge} at x = {x}")]
    DuplicatePoint { edge: u64, x: f64 },
    #[error("point x = {x} outside [0, {length}] on edge {edge}")]
    PointOutOfRange { edge: u64, x: f64, length: f64 },
    #[error("vertex {vertex} has degree {degree}, expected {expected}")]
    UnsupportedDegree {
        vertex: u64,
        degree: usize,
        expected: &'static str,
    },
    #[error("vertex {0} needs one incoming and one outgoing edge")]
    Orientation(u64),
    #[error("function is not in the form domain at vertex {0}")]
    DomainViolation(u64),
    #[error("numerically singular vertex condition at vertex {0}")]
    SingularCondition(u64),
    #[error("incomplete spectrum slice: {reason}")]
    Incomplete {
        reason: String,
        found: Vec<f64>,
    },
    #[error("no kernel of I - U(k) at k = {0}")]
    StaleEigenvalue(f64),
    #[error("c = {0} lies in the hard-condition spectrum of a domain")]
    Resonance(f64),
    #[error("eigenfunction vanishes identically on edge {0}")]
    DegenerateEdge(u64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("spectral flow methods disagree: partition {partition}, crossings {crossings}")]
    FlowMismatch { partition: i64, crossings: i64 },
}

/// Coarse error classes, used by the command line driver for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Parse,
    Incomplete,
    Precondition,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse(_) => ErrorClass::Parse,
            Error::Incomplete { .. }
            | Error::StaleEigenvalue(_)
            | Error::FlowMismatch { .. }
            | Error::SingularCondition(_) => ErrorClass::Incomplete,
            _ => ErrorClass::Precondition,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
