use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::corpus::{candidate_pool, CveRecord, LineKey, SentenceKey};
use crate::label::EntityLabel;
use crate::trace::{
    hit_at_k, macro_average, rank_pool, GroupHit, PairCounts, PairKind, Scorer, SentenceRanking, SingleCounts,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceMode {
    /// Queries are the gold sentence groups.
    Gold,
    /// Queries are the extractor's positive sentences.
    EndToEnd,
}

impl TraceMode {
    pub const ALL: [TraceMode; 2] = [TraceMode::Gold, TraceMode::EndToEnd];

    pub fn as_str(self) -> &'static str {
        match self {
            TraceMode::Gold => "gold",
            TraceMode::EndToEnd => "end_to_end",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingRow {
    pub cve_id: String,
    pub entity: EntityLabel,
    pub sentence: SentenceKey,
    /// 1-based.
    pub rank: usize,
    pub line: LineKey,
    pub score: f64,
}

/// A CVE (or one of its entities when `entity` is set) left out of the trace metrics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub cve_id: String,
    pub entity: Option<EntityLabel>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CveTrace {
    pub cve_id: String,
    pub project: String,
    pub rankings: Vec<RankingRow>,
    /// Group outcomes, one list per k value.
    pub hits: Vec<Vec<GroupHit>>,
    pub false_positives: BTreeMap<EntityLabel, u64>,
    pub excluded: Vec<Exclusion>,
}

impl CveTrace {
    pub fn aborted(&self) -> bool {
        self.excluded.iter().any(|e| e.entity.is_none())
    }

    pub fn includes(&self, entity: EntityLabel) -> bool {
        !self.excluded.iter().any(|e| e.entity.is_none() || e.entity == Some(entity))
    }

    fn fp(&self, entity: EntityLabel) -> u64 {
        self.false_positives.get(&entity).copied().unwrap_or(0)
    }
}

/// Ranks the pool for every gold group sentence and every sentence the
/// extractor labeled positive, then records group hits at each k.
///
/// `predicted` gives the extractor's decision; pass the gold labels for a
/// perfect extractor.
pub fn trace_cve<S: Scorer + ?Sized>(
    record: &CveRecord,
    scorer: &S,
    predicted: &dyn Fn(&SentenceKey, EntityLabel) -> bool,
    k_values: &[usize],
) -> Result<CveTrace, EvalError> {
    super::check_k_values(k_values)?;
    let gold = record.gold.as_ref().ok_or_else(|| EvalError::MissingGold(record.id.clone()))?;
    let mut out = CveTrace {
        cve_id: record.id.clone(),
        project: record.project.clone(),
        rankings: Vec::new(),
        hits: k_values.iter().map(|_| Vec::new()).collect(),
        false_positives: BTreeMap::new(),
        excluded: Vec::new(),
    };

    let pools: BTreeMap<EntityLabel, _> =
        EntityLabel::ALL.into_iter().map(|e| (e, candidate_pool(&record.diff, e))).collect();
    for m in &gold.mappings {
        if let Ok(pool) = &pools[&m.entity] {
            if let Some(line) = m.lines.iter().find(|l| !pool.iter().any(|c| c.key() == **l)) {
                out.excluded.push(Exclusion {
                    cve_id: record.id.clone(),
                    entity: None,
                    reason: format!("gold line `{line}` is not in the {} candidate pool", m.entity),
                });
                return Ok(out);
            }
        }
    }

    for entity in EntityLabel::ALL {
        let groups: Vec<_> = gold.mappings_for(entity).collect();
        let positives: BTreeSet<SentenceKey> =
            record.sentences().iter().map(|s| s.key()).filter(|k| predicted(k, entity)).collect();
        let fp = positives.iter().filter(|k| !gold.has_label(k, entity)).count() as u64;
        out.false_positives.insert(entity, fp);

        let pool = match &pools[&entity] {
            Ok(pool) => pool,
            Err(e) => {
                if !groups.is_empty() {
                    out.excluded.push(Exclusion { cve_id: record.id.clone(), entity: Some(entity), reason: format!("{e}") });
                }
                continue;
            }
        };
        let mut to_rank: BTreeSet<SentenceKey> = positives.clone();
        for g in &groups {
            to_rank.extend(g.sentences.iter().copied());
        }
        let mut rankings: BTreeMap<SentenceKey, SentenceRanking> = BTreeMap::new();
        for key in to_rank {
            let text = record.sentence(&key).map(|s| s.text.as_str()).unwrap_or_default();
            let ranked = rank_pool(scorer, text, pool)?;
            for (i, c) in ranked.iter().enumerate() {
                out.rankings.push(RankingRow {
                    cve_id: record.id.clone(),
                    entity,
                    sentence: key,
                    rank: i + 1,
                    line: c.line.clone(),
                    score: c.score,
                });
            }
            rankings.insert(key, SentenceRanking { sentence: key, ranked });
        }

        for g in &groups {
            let all: Vec<SentenceRanking> = g.sentences.iter().map(|k| rankings[k].clone()).collect();
            let tp: Vec<SentenceRanking> =
                g.sentences.iter().filter(|k| positives.contains(k)).map(|k| rankings[k].clone()).collect();
            for (i, &k) in k_values.iter().enumerate() {
                out.hits[i].push(GroupHit {
                    entity,
                    sentences: g.sentences.clone(),
                    gold_hit: hit_at_k(&g.lines, &all, k)?,
                    e2e_hit: hit_at_k(&g.lines, &tp, k)?,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectSingle {
    pub project: String,
    pub counts: SingleCounts,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleTraceRow {
    pub mode: TraceMode,
    pub scorer: String,
    pub entity: EntityLabel,
    pub k: usize,
    pub projects: Vec<ProjectSingle>,
    /// Macro average over projects with a defined value.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectPair {
    pub project: String,
    pub numerator: u64,
    pub denominator: u64,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTraceRow {
    pub mode: TraceMode,
    pub scorer: String,
    pub kind: PairKind,
    pub k: usize,
    pub projects: Vec<ProjectPair>,
    pub value: Option<f64>,
}

/// Per-project and macro-averaged TopK tables for both modes.
pub fn aggregate_trace(
    traces: &[CveTrace],
    k_values: &[usize],
    scorer: &str,
) -> (Vec<SingleTraceRow>, Vec<PairTraceRow>) {
    let projects: BTreeSet<&str> = traces.iter().map(|t| t.project.as_str()).collect();
    let mut singles = Vec::new();
    let mut pairs = Vec::new();
    for mode in TraceMode::ALL {
        for entity in EntityLabel::ALL {
            for (ki, &k) in k_values.iter().enumerate() {
                let per_project: Vec<ProjectSingle> = projects
                    .iter()
                    .map(|&p| {
                        let mut counts = SingleCounts::default();
                        for t in traces.iter().filter(|t| t.project == p && t.includes(entity)) {
                            counts.merge(&SingleCounts::from_groups(entity, &t.hits[ki], t.fp(entity)));
                        }
                        let value = match mode {
                            TraceMode::Gold => counts.gold(),
                            TraceMode::EndToEnd => counts.end_to_end(),
                        };
                        ProjectSingle { project: p.into(), counts, value }
                    })
                    .collect();
                let value = macro_average(per_project.iter().map(|p| p.value));
                singles.push(SingleTraceRow { mode, scorer: scorer.into(), entity, k, projects: per_project, value });
            }
        }
        for kind in PairKind::ALL {
            for (ki, &k) in k_values.iter().enumerate() {
                let per_project: Vec<ProjectPair> = projects
                    .iter()
                    .map(|&p| {
                        let (mut num, mut den) = (0, 0);
                        for t in traces
                            .iter()
                            .filter(|t| t.project == p && t.includes(kind.left()) && t.includes(EntityLabel::Cp))
                        {
                            let c = PairCounts::for_cve(kind, &t.hits[ki], t.fp(kind.left()), t.fp(EntityLabel::Cp));
                            let (n, d) = match mode {
                                TraceMode::Gold => c.gold_terms(),
                                TraceMode::EndToEnd => c.end_to_end_terms(),
                            };
                            num += n;
                            den += d;
                        }
                        let value = (den > 0).then(|| num as f64 / den as f64);
                        ProjectPair { project: p.into(), numerator: num, denominator: den, value }
                    })
                    .collect();
                let value = macro_average(per_project.iter().map(|p| p.value));
                pairs.push(PairTraceRow { mode, scorer: scorer.into(), kind, k, projects: per_project, value });
            }
        }
    }
    (singles, pairs)
}
