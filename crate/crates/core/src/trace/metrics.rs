//! TopK accuracy for single entities and for VT/CP and AF/CP pairs.
//!
//! Hits are counted per gold mapping group. For the pair metrics, an AF (or
//! VT) group and a CP group that share a sentence are not paired.

use alloc::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corpus::SentenceKey;
use crate::label::EntityLabel;

/// Outcome of one gold mapping group at a fixed k.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupHit {
    pub entity: EntityLabel,
    pub sentences: BTreeSet<SentenceKey>,
    /// Hit when querying with every sentence of the group.
    pub gold_hit: bool,
    /// Hit when querying only with sentences the extractor labeled positive.
    pub e2e_hit: bool,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Fraction of groups hit; absent when there are no groups.
pub fn topk_single(hits: u64, groups: u64) -> Option<f64> {
    ratio(hits, groups)
}

/// Mean of the defined values; absent when none are defined.
pub fn macro_average<I: IntoIterator<Item = Option<f64>>>(values: I) -> Option<f64> {
    let (sum, n) = values.into_iter().flatten().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingleCounts {
    pub groups: u64,
    pub hits_gold: u64,
    pub hits_e2e: u64,
    /// Extractor false-positive sentences, each an extra miss end to end.
    pub false_positives: u64,
}

impl SingleCounts {
    pub fn from_groups(entity: EntityLabel, groups: &[GroupHit], false_positives: u64) -> Self {
        let mine = groups.iter().filter(|g| g.entity == entity);
        let mut c = SingleCounts { false_positives, ..Default::default() };
        for g in mine {
            c.groups += 1;
            c.hits_gold += u64::from(g.gold_hit);
            c.hits_e2e += u64::from(g.e2e_hit);
        }
        c
    }

    pub fn merge(&mut self, o: &SingleCounts) {
        self.groups += o.groups;
        self.hits_gold += o.hits_gold;
        self.hits_e2e += o.hits_e2e;
        self.false_positives += o.false_positives;
    }

    pub fn gold(&self) -> Option<f64> {
        topk_single(self.hits_gold, self.groups)
    }

    pub fn end_to_end(&self) -> Option<f64> {
        topk_single(self.hits_e2e, self.groups + self.false_positives)
    }
}

/// The two reported pairings. There is deliberately no AF/VT pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PairKind {
    #[serde(rename = "VT/CP_Code")]
    VtCp,
    #[serde(rename = "AF/CP_Code")]
    AfCp,
}

impl PairKind {
    pub const ALL: [PairKind; 2] = [PairKind::VtCp, PairKind::AfCp];

    pub fn left(self) -> EntityLabel {
        match self {
            PairKind::VtCp => EntityLabel::Vt,
            PairKind::AfCp => EntityLabel::Af,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PairKind::VtCp => "VT/CP_Code",
            PairKind::AfCp => "AF/CP_Code",
        }
    }
}

/// Per-CVE counters for one pairing at one k.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCounts {
    /// Left-entity groups hit end to end.
    pub a: u64,
    /// CP groups hit end to end.
    pub cp: u64,
    /// Left-entity groups hit with gold input.
    pub a_t: u64,
    /// CP groups hit with gold input.
    pub cp_t: u64,
    /// Gold left-entity groups.
    pub a_total: u64,
    /// Extractor false positives for the left entity.
    pub a_false: u64,
    /// Gold CP groups.
    pub cp_total: u64,
    /// Extractor false positives for CP.
    pub cp_false: u64,
    /// (left, CP) group pairs sharing a sentence.
    pub self_pairs: u64,
    /// Self pairs with both groups hit on gold input.
    pub self_hits_gold: u64,
    /// Self pairs with both groups hit end to end.
    pub self_hits_e2e: u64,
}

impl PairCounts {
    pub fn for_cve(kind: PairKind, groups: &[GroupHit], a_false: u64, cp_false: u64) -> Self {
        let left: alloc::vec::Vec<&GroupHit> = groups.iter().filter(|g| g.entity == kind.left()).collect();
        let right: alloc::vec::Vec<&GroupHit> = groups.iter().filter(|g| g.entity == EntityLabel::Cp).collect();
        let mut c = PairCounts { a_false, cp_false, ..Default::default() };
        for g in &left {
            c.a_total += 1;
            c.a_t += u64::from(g.gold_hit);
            c.a += u64::from(g.e2e_hit);
        }
        for g in &right {
            c.cp_total += 1;
            c.cp_t += u64::from(g.gold_hit);
            c.cp += u64::from(g.e2e_hit);
        }
        for l in &left {
            for r in &right {
                if l.sentences.intersection(&r.sentences).next().is_some() {
                    c.self_pairs += 1;
                    c.self_hits_gold += u64::from(l.gold_hit && r.gold_hit);
                    c.self_hits_e2e += u64::from(l.e2e_hit && r.e2e_hit);
                }
            }
        }
        c
    }

    /// Numerator and denominator terms of the gold-input formula.
    pub fn gold_terms(&self) -> (u64, u64) {
        (self.a_t * self.cp_t - self.self_hits_gold, self.a_total * self.cp_total - self.self_pairs)
    }

    /// Numerator and denominator terms of the end-to-end formula.
    pub fn end_to_end_terms(&self) -> (u64, u64) {
        (
            self.a * self.cp - self.self_hits_e2e,
            (self.a_total + self.a_false) * (self.cp_total + self.cp_false) - self.self_pairs,
        )
    }
}

fn summed(counts: &[PairCounts], terms: fn(&PairCounts) -> (u64, u64)) -> Option<f64> {
    let (num, den) = counts.iter().map(terms).fold((0, 0), |(n, d), (a, b)| (n + a, d + b));
    ratio(num, den)
}

/// Σ aᵀ·cpᵀ / Σ Aᵀ·CPᵀ over CVEs.
pub fn pair_topk_gold(counts: &[PairCounts]) -> Option<f64> {
    summed(counts, PairCounts::gold_terms)
}

/// Σ a·cp / Σ (Aᵀ + Aᶠ)·(CPᵀ + CPᶠ) over CVEs.
pub fn pair_topk_end_to_end(counts: &[PairCounts]) -> Option<f64> {
    summed(counts, PairCounts::end_to_end_terms)
}
