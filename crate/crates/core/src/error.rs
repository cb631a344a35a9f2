use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{requested} qubits exceeds the simulator cap of {cap}")]
    Capacity { requested: usize, cap: usize },

    #[error("qubit {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("gate acts on qubit {0} more than once")]
    RepeatedQubit(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("post-selected branch has zero probability")]
    ZeroProbability,

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("gamma = {0} is outside (0, 1)")]
    GammaOutOfRange(f64),

    #[error("gamma = 1/sqrt(2) is a singular point of the first-order expansion")]
    GammaSingular,

    #[error("operator norm {0} exceeds 1; shift the spectrum or lower gamma")]
    NotContraction(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no decomposition for {0}")]
    Undecomposable(String),

    #[error("polynomial degree {0} is not supported")]
    UnsupportedDegree(usize),

    #[error("optimal gamma {0} is not admissible")]
    InadmissibleGamma(f64),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
