use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("requested {requested} modes but the numerical rank is {rank}")]
    RankDeficient { requested: usize, rank: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("divergence: {0}")]
    Divergence(String),
    #[error("preset error: {0}")]
    Preset(String),
    #[error("linear algebra failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
