use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("cannot parse Pauli word {0:?}")]
    ParsePauli(String),

    #[error("{n} qubits exceeds the dense cap of {cap}")]
    QubitCap { n: usize, cap: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("generators {0} and {1} anticommute")]
    Anticommuting(String, String),

    #[error("generators are not independent")]
    DependentGenerators,

    #[error("{gens} generators cannot fix a state on {n} qubits")]
    IncompleteGroup { gens: usize, n: usize },

    #[error("stabilizer projector has rank {0}, expected 1")]
    ProjectorRank(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operation requires a pure state")]
    NotPure,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("noise parameter {0} is outside [0, 1]")]
    NoiseOutOfRange(f64),

    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("outcome labels differ between distributions")]
    LabelMismatch,

    #[error("observable list is empty")]
    EmptyObservables,

    #[error("combined observable has zero expectation on the reference state")]
    NoSignal,

    #[error("invalid optimizer config: {0}")]
    InvalidConfig(String),

    #[error("invalid noise grid: {0}")]
    InvalidGrid(String),

    #[error("{runs} runs cannot cover {observables} observables")]
    TooFewRuns { runs: usize, observables: usize },

    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },

    #[error("line {line}: expectation {value} is outside [-1, 1]")]
    ExpectationRange { line: usize, value: f64 },

    #[error("duplicate correlation label {0}")]
    DuplicateLabel(String),

    #[error("state is not a stabilizer state")]
    NotStabilizerState,

    #[error("graph has no two-point stabilizing operators")]
    NoTwoPoint,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
