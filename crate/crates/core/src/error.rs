use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("balance violation: sum of indices is {sum}, expected {expected_twice}/2")]
    BalanceViolation { sum: usize, expected_twice: usize },

    #[error("index {lambda} at point {index} is outside [0, {n}]")]
    RangeViolation { index: usize, lambda: usize, n: usize },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("no multigraph satisfies the degree constraints of this profile")]
    ProfileUnrealizable,

    #[error("profile is not symmetric under reversal (N_p != N_(n-p))")]
    NotReversible,

    #[error("pairing mismatch: slot ({0}, {1}) is paired with a weight that is not its negative")]
    PairingMismatch(usize, usize),

    #[error("magnitude-sum formula is not an integer for this profile")]
    NonIntegralSum,

    #[error("degenerate weights: top elementary symmetric function vanishes at point {0}")]
    DegenerateWeights(usize),

    #[error("shape precondition: {0}")]
    ShapePrecondition(String),

    #[error("sum is not a Laurent polynomial")]
    NotLaurent,

    #[error("consistency failure: {0}")]
    ConsistencyFailure(String),

    #[error("precondition: {0}")]
    Precondition(String),

    #[error("ineffective parameters: {0}")]
    IneffectiveParameters(String),

    #[error("nonnegative mode needs a minimal profile or a nonnegative magnitude target")]
    ModeRefused,

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
