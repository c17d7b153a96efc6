use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MrfError {
    #[error("site {site} is uncommitted")]
    Uncommitted { site: usize },
    #[error("site {site}: label {label} is outside 0..{count}")]
    LabelOutOfRange { site: usize, label: u32, count: u32 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("stability is undefined for fields with a single label")]
    SingleLabel,
    #[error("no termination within {cap} iterations")]
    IterationCap { cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{labels}^{sites} configurations exceed the exhaustive-search limit of {limit}")]
    TooLarge { labels: u32, sites: usize, limit: u64 },
    #[error("field is not a chain: {0}")]
    NotAChain(String),
}

pub type Result<T, E = MrfError> = std::result::Result<T, E>;
