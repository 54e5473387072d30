use thiserror::Error;

/// Broad failure classes. The CLI maps each class onto its own exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    ResourceLimit,
    Internal,
    Output,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Input => 2,
            ErrorKind::ResourceLimit => 3,
            ErrorKind::Internal => 4,
            ErrorKind::Output => 5,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("space must contain at least one point")]
    EmptySpace,

    #[error("non-finite coordinate at row {row}, column {col}")]
    NonFiniteCoordinate { row: usize, col: usize },

    #[error("row {row} has {found} coordinates, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("negative weight {value} at index {index}")]
    NegativeWeight { index: usize, value: f64 },

    #[error("non-finite weight at index {index}")]
    NonFiniteWeight { index: usize },

    #[error("weights sum to {sum}, expected 1")]
    WeightsNotNormalized { sum: f64 },

    #[error("{what}: expected length {expected}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("distance matrix is not square: row {row} has {found} entries, expected {expected}")]
    NotSquare {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("non-finite distance at ({i}, {j})")]
    NonFiniteDistance { i: usize, j: usize },

    #[error("negative distance {value} at ({i}, {j})")]
    NegativeDistance { i: usize, j: usize, value: f64 },

    #[error("nonzero diagonal entry {value} at ({i}, {i})")]
    NonzeroDiagonal { i: usize, value: f64 },

    #[error("asymmetric distance at ({i}, {j}): {dij} vs {dji}")]
    Asymmetric {
        i: usize,
        j: usize,
        dij: f64,
        dji: f64,
    },

    #[error("triangle inequality violated at ({i}, {j}, {k}): d({i},{k}) = {dik} > d({i},{j}) + d({j},{k}) = {via}")]
    TriangleViolation {
        i: usize,
        j: usize,
        k: usize,
        dik: f64,
        via: f64,
    },

    #[error("invalid parameter {name} = {value}: {expected}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        expected: &'static str,
    },

    #[error("anchor set is empty")]
    EmptyAnchorSet,

    #[error("point index {index} out of range for a space of {n} points")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("feature is not 1-Lipschitz (Lipschitz constant {lipschitz})")]
    UncertifiedFeature { lipschitz: f64 },

    #[error("exact {what} is limited to n <= {limit} points (got {n}); use {alternative} instead")]
    OracleTooLarge {
        what: &'static str,
        n: usize,
        limit: usize,
        alternative: &'static str,
    },

    #[error("resource limit exceeded: {what} = {requested} exceeds the limit {limit}")]
    ResourceLimit {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    #[error("covering profile does not reach radius {needed}; smallest available radius is {available}")]
    CoverageGap { needed: f64, available: f64 },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("unknown experiment {0:?}")]
    UnknownExperiment(String),

    #[error("cannot write output {path}: {source}")]
    Output {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot read input {path}: {source}")]
    Input {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::OracleTooLarge { .. } | Error::ResourceLimit { .. } => ErrorKind::ResourceLimit,
            Error::Invariant(_) => ErrorKind::Internal,
            Error::Output { .. } => ErrorKind::Output,
            _ => ErrorKind::Input,
        }
    }

    pub(crate) fn param(name: &'static str, value: impl ToString, expected: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value: value.to_string(),
            expected,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
