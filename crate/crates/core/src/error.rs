use alloc::string::String;
use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("no pointwise Hessian for a non-smooth weight")]
    NoPointwiseHessian,
    #[error("degree too large: {requested} exceeds cap {cap}")]
    DegreeTooLarge { requested: usize, cap: usize },
    #[error("non-finite integrand at node {index}")]
    NonFiniteIntegrand { index: usize },
    #[error("quadrature not converged: last relative delta {last_delta:e} at degree {degree}")]
    QuadratureNotConverged { last_delta: f64, degree: usize },
    #[error("basis numerically dependent at column {column}; reduce N")]
    RankDeficient { column: usize },
    #[error("probe too close to boundary: distance {distance:e} < offset {offset:e}")]
    ProbeTooCloseToBoundary { distance: f64, offset: f64 },
    #[error("point outside the domain of definition")]
    OutsideDomain,
    #[error("insufficient probes: {skipped} of {total} segments skipped")]
    InsufficientProbes { skipped: usize, total: usize },
    #[error("empty interior grid")]
    EmptyGrid,
    #[error("grid smaller than mollifier support")]
    GridTooSmall,
    #[error("t = {re}{im:+}i is outside the base locus")]
    OutsideBaseLocus { re: f64, im: f64 },
    #[error("derivative vanishes; map not locally univalent there")]
    DerivativeVanishes,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
