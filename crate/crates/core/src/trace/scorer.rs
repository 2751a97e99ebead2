use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScorerError {
    #[error("scorer unavailable: {0}")]
    Unavailable(String),
    #[error("scorer returned {got} scores for {expected} candidates")]
    LengthMismatch { expected: usize, got: usize },
    #[error("scorer returned a non-finite score for candidate {index}")]
    NonFinite { index: usize },
}

/// Scores every candidate of a pool against one query; higher is more relevant.
pub trait Scorer: Send + Sync {
    fn name(&self) -> &str;

    fn score_pool(&self, query: &str, candidates: &[&str]) -> Result<Vec<f64>, ScorerError>;
}

/// Checks length and finiteness of a scorer response.
pub fn check_scores(expected: usize, scores: Vec<f64>) -> Result<Vec<f64>, ScorerError> {
    if scores.len() != expected {
        return Err(ScorerError::LengthMismatch { expected, got: scores.len() });
    }
    if let Some(index) = scores.iter().position(|s| !s.is_finite()) {
        return Err(ScorerError::NonFinite { index });
    }
    Ok(scores)
}
