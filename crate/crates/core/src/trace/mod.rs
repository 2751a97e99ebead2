//! Tracing sentences to diff lines through a pluggable scorer, and the
//! TopK metrics over the resulting rankings.

mod lexical;
mod metrics;
mod ranking;
mod scorer;

use thiserror::Error;

use crate::corpus::LineKey;

pub use lexical::{identifier_parts, index_terms, LexicalScorer, B, K1};
pub use metrics::{
    macro_average, pair_topk_end_to_end, pair_topk_gold, topk_single, GroupHit, PairCounts, PairKind, SingleCounts,
};
pub use ranking::{first_hit_rank, hit_at_k, rank_candidates, rank_pool, ScoredCandidate, SentenceRanking, TraceQuery};
pub use scorer::{check_scores, Scorer, ScorerError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error(transparent)]
    Scorer(#[from] ScorerError),
    #[error("gold line `{0}` is not in the candidate pool")]
    GoldOutsidePool(LineKey),
    #[error("k must be at least 1")]
    ZeroK,
}
