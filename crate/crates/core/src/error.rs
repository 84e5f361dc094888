use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("letter {letter} at position {position} is outside the alphabet [1..{m}]")]
    LetterOutOfRange { letter: u32, position: usize, m: usize },

    #[error("alphabet sizes differ: {0} vs {1}")]
    AlphabetMismatch(usize, usize),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("{what} = {value} is outside its domain {domain}")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid composition: {0}")]
    InvalidComposition(String),

    #[error("{what}: size {size} exceeds the cap {cap}")]
    TooLarge {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("inconsistent shape: {0}")]
    InconsistentShape(String),

    #[error("gap lemma vacuous: Δ = 0")]
    GapVacuous,

    #[error("matrix is not Hermitian (asymmetry {0:e})")]
    NonHermitian(f64),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("covariance factorization failed: {0}")]
    Factorization(String),

    #[error("empty sample")]
    EmptySample,

    #[error("sample contains a non-finite value")]
    NonFiniteSample,

    #[error("rate fit needs at least two points with distinct n and positive distances")]
    DegenerateFit,

    #[error("invalid configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    #[error("sample {index} failed: {source}")]
    Sample {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("no rows")]
    NoRows,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
