use crate::qmath::Factor;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("factor {0} appears more than once in the layout")]
    DuplicateFactor(Factor),

    #[error("factor {0} is not part of layout {1}")]
    UnknownFactor(Factor, String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("layout mismatch: {0} vs {1}")]
    LayoutMismatch(String, String),

    #[error("state vector has zero norm")]
    ZeroNorm,

    #[error("non-finite amplitude at index {0}")]
    NonFinite(usize),

    #[error("operator is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("incomplete basis specification: {0}")]
    IncompleteBasis(String),

    #[error("sampled eigenvalue {eigenvalue} has probability {probability:e}; state is corrupted")]
    NegligibleOutcome { eigenvalue: f64, probability: f64 },

    #[error("invalid geometry, failed checks: {}", .0.join(", "))]
    InvalidGeometry(Vec<String>),

    #[error("no subluminal simultaneity frame: {0}")]
    NoSubluminalFrame(String),

    #[error("simultaneous events {0} and {1} act on overlapping factors")]
    OverlappingRound(String, String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}
