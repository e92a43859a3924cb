use thiserror::Error;

/// Errors produced by graph construction, discretisation and the search routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(u64),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(u64),
    #[error("unknown vertex id {0}")]
    UnknownVertex(u64),
    #[error("unknown edge id {0}")]
    UnknownEdge(u64),
    #[error("edge {id} has invalid length {length}")]
    InvalidLength { id: u64, length: f64 },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has no edges")]
    NoEdges,
    #[error("offset {offset} outside edge {edge} of length {length}")]
    InvalidPoint { edge: u64, offset: f64, length: f64 },
    #[error("invalid potential on edge {edge}: {reason}")]
    InvalidPotential { edge: u64, reason: String },
    #[error("invalid radius: {0}")]
    InvalidRadius(String),
    #[error("subgraph is empty")]
    EmptySubgraph,
    #[error("mesh size must be positive, got {0}")]
    InvalidMesh(f64),
    #[error("requested {requested} eigenvalues but only {available} discrete modes exist")]
    TooManyModes { requested: usize, available: usize },
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("truncation reach {reach} is below the required {required} for radius {radius}")]
    TruncationTooSmall { radius: f64, required: f64, reach: f64 },
    #[error("target energy {target} does not exceed the essential-spectrum estimate {sigma}")]
    TargetBelowSigma { target: f64, sigma: f64 },
    #[error("bisection failed to bracket: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    NoBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("k = {k} exceeds the largest component count reachable with {max_cuts} cuts")]
    KUnreachable { k: usize, max_cuts: usize },
    #[error("cut-topology search space has {count} candidates, above the cap of {cap}")]
    SearchTooLarge { count: usize, cap: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
