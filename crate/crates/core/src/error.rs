use thiserror::Error;

/// Failures from the closed-form constant formulas and the fixed-point solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstantsError {
    #[error("invalid quasi-geodesic parameters: {0}")]
    InvalidParams(String),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("κₙ estimate requires q, D ≥ 1 (got q = {q}, D = {d})")]
    KappaHypothesis { q: f64, d: f64 },
    #[error("fixed-point search did not converge within {iterations} iterations; last bracket [{lo}, {hi}]")]
    NoConvergence { iterations: usize, lo: f64, hi: f64 },
    #[error("numerical certificate failed: f({kappa}) = {value} exceeds κ")]
    CertificateFailed { kappa: f64, value: f64 },
}

/// Failures while loading or querying finite metric instances.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("distance matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("label count {labels} does not match matrix size {size}")]
    LabelMismatch { labels: usize, size: usize },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("invalid distance d({0}, {1}) = {2}")]
    InvalidDistance(String, String, f64),
    #[error("nonzero self-distance d({0}, {0}) = {1}")]
    NonzeroDiagonal(String, f64),
    #[error("asymmetric distances between {0} and {1}")]
    Asymmetric(String, String),
    #[error("triangle inequality violated: d({x}, {z}) > d({x}, {y}) + d({y}, {z})")]
    Triangle { x: String, y: String, z: String },
    #[error("unknown point {0:?}")]
    UnknownPoint(String),
    #[error("point index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("path system has no path for the pair ({0}, {1})")]
    MissingPath(String, String),
    #[error("path for ({key_from}, {key_to}) runs from {from} to {to}")]
    EndpointMismatch { key_from: String, key_to: String, from: String, to: String },
    #[error("path for the pair ({0}, {1}) given twice")]
    DuplicatePath(String, String),
    #[error("malformed path key {0:?}, expected \"x|y\"")]
    BadKey(String),
    #[error("empty path")]
    EmptyPath,
    #[error("path system is empty")]
    EmptySystem,
    #[error("length mismatch: {path} path points, {params} parameters")]
    LengthMismatch { path: usize, params: usize },
    #[error("parametrization must be strictly increasing")]
    NotIncreasing,
    #[error(transparent)]
    Constants(#[from] ConstantsError),
}

/// Failures in curtain-model constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurtainError {
    #[error("invalid backend: {0}")]
    InvalidBackend(String),
    #[error("point does not belong to the backend: {0}")]
    PointOutsideBackend(String),
    #[error("pole [{lo}, {hi}] is not in the interior of [0, {len}]")]
    PoleOutsideInterior { lo: f64, hi: f64, len: f64 },
    #[error("curtains are not disjoint")]
    NotDisjoint,
    #[error("curtains on different tree geodesics cannot be compared")]
    IncomparableBases,
    #[error("points must be distinct")]
    CoincidentPoints,
    #[error("no sample realises curtain-model distance in [{t}, {t} + 1]")]
    DensityFailure { t: usize },
    #[error("invalid weight sequence: {0}")]
    InvalidWeights(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Errors from the JSON schemas.
#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Curtain(#[from] CurtainError),
    #[error("{0}")]
    Invalid(String),
}
