//! Least squares with coefficient inference, plus Student's t and Fisher's F
//! survival functions. Shared by the RDD and Granger estimators.

mod dist;
mod ols;

pub use dist::{f_sf, regularized_incomplete_beta, t_sf_two_sided};
pub use ols::{ols_fit, Design, OlsFit};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("design has {rows} rows but {cols} columns")]
    Underdetermined { rows: usize, cols: usize },
    #[error("design is rank deficient (numerical rank {rank} of {cols})")]
    RankDeficient { rank: usize, cols: usize },
    #[error("response has {got} rows, design has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite entry in regression input")]
    NonFinite,
    #[error("domain error: {0}")]
    DomainError(String),
}
