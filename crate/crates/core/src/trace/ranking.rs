use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::scorer::{check_scores, Scorer};
use super::TraceError;
use crate::corpus::{CodeLine, LineKey, SentenceKey};
use crate::label::EntityLabel;

/// One query: a semantic-equivalence group of sentences for one entity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceQuery {
    pub cve_id: String,
    pub entity: EntityLabel,
    /// Group members with their text, sorted by key.
    pub sentences: Vec<(SentenceKey, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredCandidate {
    pub line: LineKey,
    pub score: f64,
}

/// Ranking of the whole pool for one sentence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceRanking {
    pub sentence: SentenceKey,
    pub ranked: Vec<ScoredCandidate>,
}

/// Scores the pool and sorts by descending score, ties by line key.
pub fn rank_pool<S: Scorer + ?Sized>(scorer: &S, query: &str, pool: &[CodeLine]) -> Result<Vec<ScoredCandidate>, TraceError> {
    let contents: Vec<&str> = pool.iter().map(|l| l.content.as_str()).collect();
    let scores = check_scores(pool.len(), scorer.score_pool(query, &contents)?)?;
    let mut ranked: Vec<ScoredCandidate> =
        pool.iter().zip(scores).map(|(l, score)| ScoredCandidate { line: l.key(), score }).collect();
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.line.cmp(&b.line)));
    Ok(ranked)
}

/// One ranking per sentence of the group, in group order.
pub fn rank_candidates<S: Scorer + ?Sized>(
    scorer: &S,
    query: &TraceQuery,
    pool: &[CodeLine],
) -> Result<Vec<SentenceRanking>, TraceError> {
    query
        .sentences
        .iter()
        .map(|(key, text)| Ok(SentenceRanking { sentence: *key, ranked: rank_pool(scorer, text, pool)? }))
        .collect()
}

/// True iff some ranking has a gold line within its first `k` entries.
///
/// Every gold line must appear in the rankings' pool.
pub fn hit_at_k(gold: &BTreeSet<LineKey>, rankings: &[SentenceRanking], k: usize) -> Result<bool, TraceError> {
    if k == 0 {
        return Err(TraceError::ZeroK);
    }
    for r in rankings {
        if let Some(missing) = gold.iter().find(|g| !r.ranked.iter().any(|c| c.line == **g)) {
            return Err(TraceError::GoldOutsidePool(missing.clone()));
        }
    }
    Ok(rankings.iter().any(|r| r.ranked.iter().take(k).any(|c| gold.contains(&c.line))))
}

/// Smallest k at which [`hit_at_k`] holds, if any.
pub fn first_hit_rank(gold: &BTreeSet<LineKey>, rankings: &[SentenceRanking]) -> Option<usize> {
    rankings
        .iter()
        .filter_map(|r| r.ranked.iter().position(|c| gold.contains(&c.line)))
        .min()
        .map(|p| p + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::{ChangeKind, Side};
    use crate::trace::scorer::ScorerError;
    use crate::trace::LexicalScorer;
    use alloc::string::ToString;
    use alloc::vec;

    struct Fixed(Vec<f64>);

    impl Scorer for Fixed {
        fn name(&self) -> &str {
            "fixed"
        }

        fn score_pool(&self, _: &str, _: &[&str]) -> Result<Vec<f64>, ScorerError> {
            Ok(self.0.clone())
        }
    }

    fn line(n: u32, content: &str) -> CodeLine {
        CodeLine { file: "f.c".into(), side: Side::New, line_no: n, content: content.into(), change: ChangeKind::Added }
    }

    fn query(n: usize) -> TraceQuery {
        TraceQuery {
            cve_id: "C".into(),
            entity: EntityLabel::Af,
            sentences: (0..n).map(|i| (SentenceKey::new(crate::ArtifactKind::CommitMessage, i), "q".to_string())).collect(),
        }
    }

    fn gold(ns: &[u32]) -> BTreeSet<LineKey> {
        ns.iter().map(|&n| LineKey::new("f.c", Side::New, n)).collect()
    }

    #[test]
    fn single_candidate() {
        let pool = [line(1, "x")];
        let r = rank_candidates(&LexicalScorer, &query(1), &pool).unwrap();
        assert_eq!(r[0].ranked.len(), 1);
        assert!(hit_at_k(&gold(&[1]), &r, 1).unwrap());
    }

    #[test]
    fn ties_break_by_key() {
        let pool = [line(3, "a"), line(1, "b"), line(2, "c")];
        let r = rank_pool(&Fixed(vec![1.0, 1.0, 2.0]), "q", &pool).unwrap();
        let order: Vec<u32> = r.iter().map(|c| c.line.line_no).collect();
        assert_eq!(order, vec![2, 1, 3]);
    }

    #[test]
    fn thresholds() {
        let pool = [line(1, "a"), line(2, "b"), line(3, "c")];
        let r = rank_candidates(&Fixed(vec![3.0, 2.0, 1.0]), &query(2), &pool).unwrap();
        assert_eq!(r.len(), 2);
        assert!(!hit_at_k(&gold(&[3]), &r, 2).unwrap());
        assert!(hit_at_k(&gold(&[3]), &r, 3).unwrap());
        assert_eq!(first_hit_rank(&gold(&[3]), &r), Some(3));
        assert_eq!(hit_at_k(&gold(&[9]), &r, 1), Err(TraceError::GoldOutsidePool(LineKey::new("f.c", Side::New, 9))));
        assert_eq!(hit_at_k(&gold(&[1]), &r, 0), Err(TraceError::ZeroK));
    }

    #[test]
    fn any_sentence_may_hit() {
        let r = vec![
            SentenceRanking {
                sentence: SentenceKey::new(crate::ArtifactKind::BugReport, 0),
                ranked: vec![
                    ScoredCandidate { line: LineKey::new("f.c", Side::New, 2), score: 1.0 },
                    ScoredCandidate { line: LineKey::new("f.c", Side::New, 1), score: 0.0 },
                ],
            },
            SentenceRanking {
                sentence: SentenceKey::new(crate::ArtifactKind::BugReport, 1),
                ranked: vec![
                    ScoredCandidate { line: LineKey::new("f.c", Side::New, 1), score: 1.0 },
                    ScoredCandidate { line: LineKey::new("f.c", Side::New, 2), score: 0.0 },
                ],
            },
        ];
        assert!(hit_at_k(&gold(&[1]), &r, 1).unwrap());
    }

    #[test]
    fn scorer_errors_propagate() {
        let pool = [line(1, "a"), line(2, "b")];
        assert_eq!(
            rank_pool(&Fixed(vec![1.0]), "q", &pool),
            Err(TraceError::Scorer(ScorerError::LengthMismatch { expected: 2, got: 1 }))
        );
        assert_eq!(
            rank_pool(&Fixed(vec![1.0, f64::NAN]), "q", &pool),
            Err(TraceError::Scorer(ScorerError::NonFinite { index: 1 }))
        );
    }
}
