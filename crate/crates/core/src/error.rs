use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("field exponent {0} is outside 1..=16")]
    UnsupportedExponent(u32),
    #[error("field size {0} is not a power of two in 2..=65536")]
    NotPowerOfTwo(u32),
    #[error("value {value} is not an element of GF({q})")]
    OutOfRange { value: u32, q: u32 },
    #[error("operands belong to different fields: GF({left}) and GF({right})")]
    Mismatch { left: u32, right: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("symbol history for time {needed} is missing (have {have})")]
    MissingHistory { needed: usize, have: usize },
    #[error("decoder system has no solution")]
    NoSolution,
    #[error("received stream too short: need {needed} symbols, have {have}")]
    StreamUnderflow { needed: usize, have: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("node {0} is out of range")]
    UnknownNode(usize),
    #[error("the source may not have incoming edges")]
    SourceHasInput,
    #[error("sink {0} is not reachable from the source")]
    Unreachable(usize),
    #[error("the source cannot be a sink")]
    SourceIsSink,
    #[error("no sinks given")]
    NoSinks,
    #[error("invalid topology parameters: {0}")]
    InvalidParams(String),
    #[error("gave up after {0} rejected random graphs")]
    RejectionLimit(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("requested rate {requested} exceeds the multicast capacity {capacity}")]
    RateMismatch { requested: usize, capacity: usize },
    #[error("zero mask leaves a directed cycle without delay")]
    CycleWithoutDelay,
    #[error("scripted coefficient refers to {0}")]
    Script(String),
    #[error("the one-shot baseline needs an acyclic network")]
    CyclicNetwork,
    #[error("end-to-end decoding check failed at sink {sink}: {detail}")]
    Validation { sink: usize, detail: String },
    #[error("invariant violated at t={t}: {detail}")]
    Invariant { t: usize, detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("parameter out of domain: {0}")]
    Domain(String),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("line {line}: expected key=value, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("no traces to average")]
    Empty,
    #[error("trace {0} did not succeed")]
    Unsuccessful(usize),
    #[error("trace has {have} node lengths, network has {want} nodes")]
    MissingLengths { have: usize, want: usize },
    #[error("enumeration needs {0} branches, above the limit")]
    StateSpace(u128),
    #[error(transparent)]
    Engine(#[from] EngineError),
}
