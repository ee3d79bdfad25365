use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is rank deficient: {0}")]
    RankDeficient(String),

    /// The effective uplink noise-plus-interference matrix of `user` is not
    /// positive semidefinite.
    #[error(
        "noise-plus-interference matrix of user {user} is not PSD (min eigenvalue {min_eig:e})"
    )]
    NonPsdNoise { user: usize, min_eig: f64 },

    #[error("SINR targets are infeasible: {0}")]
    Infeasible(String),

    #[error("{what} did not converge within {iterations} iterations")]
    Convergence {
        what: &'static str,
        iterations: usize,
    },

    /// The downlink coupling matrix has spectral radius >= 1.
    #[error("uplink-to-downlink power mapping failed: spectral radius {0}")]
    Mapping(f64),

    #[error("design not applicable: {0}")]
    Applicability(String),

    #[error("matrix is not rank one (dominant ratio {ratio})")]
    NotRankOne { ratio: f64 },

    #[error("SDP solver: {0}")]
    Sdp(String),

    #[error("region classification: {0}")]
    Classification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}
