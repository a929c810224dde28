use thiserror::Error;

use crate::model::SolutionError;

/// Refusals and failures shared by the solvers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("parameter too large: (f+1)^k = {states} vector states exceeds the limit of {limit}")]
    ParameterTooLarge { states: u128, limit: u128 },
    #[error("vertex cover number {tau} exceeds the limit of {limit}; use the dp method instead")]
    CoverTooLarge { tau: usize, limit: usize },
    #[error("local search neighborhood n^(2b) = {evaluations} exceeds the budget of {budget}")]
    NeighborhoodTooLarge { evaluations: u128, budget: u128 },
    #[error("instance too large for exact BDS: {combinations} combinations exceed {limit}")]
    SearchSpaceTooLarge { combinations: u128, limit: u128 },
    #[error("f must be at least 1")]
    ZeroBalance,
    #[error("b must be at least 1")]
    ZeroRadius,
    #[error("invalid solution: {0}")]
    InvalidSolution(String),
    #[error(transparent)]
    Solution(#[from] SolutionError),
}
