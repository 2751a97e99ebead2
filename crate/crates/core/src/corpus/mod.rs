//! CVE records: natural-language artifacts split into sentences, the fix
//! diff, candidate code-line pools and gold annotations.

pub mod diff;
pub mod pool;
pub mod segment;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::{ArtifactKind, EntityLabel, ParseEnumError};
use crate::pattern::token::{tokenize, Token};

pub use diff::{parse_unified_diff, CodeDiff, CodeLine, DiffError, FileDiff, Hunk, HunkLine, LineKey};
pub use pool::{candidate_pool, EmptyPool};
pub use segment::{normalize_whitespace, segment};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub kind: ArtifactKind,
    pub raw_text: String,
}

/// Identifies a sentence within one CVE: `<kind>:<index>`.
///
/// Indices count sentences per artifact kind, so a second bug report
/// continues numbering where the first stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SentenceKey {
    pub kind: ArtifactKind,
    pub index: usize,
}

impl SentenceKey {
    pub fn new(kind: ArtifactKind, index: usize) -> Self {
        SentenceKey { kind, index }
    }
}

impl fmt::Display for SentenceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseSentenceKeyError {
    #[error("sentence key `{0}` is not `<kind>:<index>`")]
    Shape(String),
    #[error(transparent)]
    Kind(#[from] ParseEnumError),
}

impl FromStr for SentenceKey {
    type Err = ParseSentenceKeyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, index) = s.split_once(':').ok_or_else(|| ParseSentenceKeyError::Shape(s.into()))?;
        let index = index.parse().map_err(|_| ParseSentenceKeyError::Shape(s.into()))?;
        Ok(SentenceKey { kind: kind.parse()?, index })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub cve_id: String,
    pub artifact_kind: ArtifactKind,
    pub index: usize,
    pub text: String,
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn new(cve_id: &str, artifact_kind: ArtifactKind, index: usize, text: String) -> Self {
        let tokens = tokenize(&text);
        Sentence { cve_id: cve_id.to_string(), artifact_kind, index, text, tokens }
    }

    pub fn key(&self) -> SentenceKey {
        SentenceKey { kind: self.artifact_kind, index: self.index }
    }
}

/// Sentences of one artifact, numbered from `first_index`.
pub fn segment_sentences(cve_id: &str, artifact: &Artifact, first_index: usize) -> Vec<Sentence> {
    segment(&artifact.raw_text)
        .into_iter()
        .enumerate()
        .map(|(i, text)| Sentence::new(cve_id, artifact.kind, first_index + i, text))
        .collect()
}

/// A semantic-equivalence group of sentences and the code lines it maps to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldMapping {
    pub entity: EntityLabel,
    pub sentences: BTreeSet<SentenceKey>,
    pub lines: BTreeSet<LineKey>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldAnnotations {
    pub sentence_labels: BTreeMap<SentenceKey, BTreeSet<EntityLabel>>,
    pub mappings: Vec<GoldMapping>,
}

impl GoldAnnotations {
    pub fn has_label(&self, key: &SentenceKey, entity: EntityLabel) -> bool {
        self.sentence_labels.get(key).is_some_and(|s| s.contains(&entity))
    }

    pub fn mappings_for(&self, entity: EntityLabel) -> impl Iterator<Item = &GoldMapping> {
        self.mappings.iter().filter(move |m| m.entity == entity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{cve_id}: {field}: {reason}")]
pub struct RecordError {
    pub cve_id: String,
    /// Path of the offending field in the record schema, e.g. `gold.mappings[0].lines`.
    pub field: String,
    pub reason: String,
}

impl RecordError {
    pub fn new(cve_id: &str, field: impl Into<String>, reason: impl Into<String>) -> Self {
        RecordError { cve_id: cve_id.to_string(), field: field.into(), reason: reason.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CveRecord {
    pub id: String,
    pub project: String,
    pub artifacts: Vec<Artifact>,
    /// The diff exactly as supplied.
    pub diff_text: String,
    pub diff: CodeDiff,
    pub gold: Option<GoldAnnotations>,
    sentences: Vec<Sentence>,
}

impl CveRecord {
    /// Parses the diff, segments artifacts and validates gold annotations.
    pub fn new(
        id: &str,
        project: &str,
        artifacts: Vec<Artifact>,
        diff_text: &str,
        gold: Option<GoldAnnotations>,
    ) -> Result<Self, RecordError> {
        let err = |field: &str, reason: String| RecordError::new(id, field, reason);
        if id.trim().is_empty() {
            return Err(err("id", "empty CVE id".into()));
        }
        if project.trim().is_empty() {
            return Err(err("project", "empty project name".into()));
        }
        if artifacts.is_empty() {
            return Err(err("artifacts", "at least one artifact is required".into()));
        }
        let mut sentences = Vec::new();
        let mut next_index: BTreeMap<ArtifactKind, usize> = BTreeMap::new();
        for (i, artifact) in artifacts.iter().enumerate() {
            if normalize_whitespace(&artifact.raw_text).is_empty() {
                return Err(err(&format!("artifacts[{i}].text"), "text is empty".into()));
            }
            let first = next_index.entry(artifact.kind).or_insert(0);
            let segmented = segment_sentences(id, artifact, *first);
            *first += segmented.len();
            sentences.extend(segmented);
        }
        let diff = parse_unified_diff(diff_text).map_err(|e| err("diff", e.to_string()))?;

        let record = CveRecord {
            id: id.to_string(),
            project: project.to_string(),
            artifacts,
            diff_text: diff_text.to_string(),
            diff,
            gold,
            sentences,
        };
        record.validate_gold()?;
        Ok(record)
    }

    fn validate_gold(&self) -> Result<(), RecordError> {
        let Some(gold) = &self.gold else { return Ok(()) };
        let err = |field: String, reason: String| RecordError::new(&self.id, field, reason);
        let known: BTreeSet<SentenceKey> = self.sentences.iter().map(Sentence::key).collect();

        for key in gold.sentence_labels.keys() {
            if !known.contains(key) {
                return Err(err(format!("gold.sentence_labels.{key}"), format!("no sentence `{key}` in artifacts")));
            }
        }
        let mut claimed: BTreeMap<(EntityLabel, SentenceKey), usize> = BTreeMap::new();
        for (i, m) in gold.mappings.iter().enumerate() {
            if m.sentences.is_empty() {
                return Err(err(format!("gold.mappings[{i}].sentences"), "empty sentence group".into()));
            }
            if m.lines.is_empty() {
                return Err(err(format!("gold.mappings[{i}].lines"), "no gold lines".into()));
            }
            for key in &m.sentences {
                if !known.contains(key) {
                    return Err(err(format!("gold.mappings[{i}].sentences"), format!("no sentence `{key}` in artifacts")));
                }
                if !gold.has_label(key, m.entity) {
                    return Err(err(
                        format!("gold.mappings[{i}].sentences"),
                        format!("sentence `{key}` is not labeled {}", m.entity),
                    ));
                }
                if let Some(other) = claimed.insert((m.entity, *key), i) {
                    return Err(err(
                        format!("gold.mappings[{i}].sentences"),
                        format!("sentence `{key}` already belongs to {} group mappings[{other}]", m.entity),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn sentence(&self, key: &SentenceKey) -> Option<&Sentence> {
        self.sentences.iter().find(|s| s.key() == *key)
    }

    /// Gold lines that do not resolve to a line of the entity's candidate
    /// pool. These are annotation problems rather than load errors.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        let Some(gold) = &self.gold else { return out };
        for (i, m) in gold.mappings.iter().enumerate() {
            let pool: BTreeSet<LineKey> = match candidate_pool(&self.diff, m.entity) {
                Ok(p) => p.iter().map(CodeLine::key).collect(),
                Err(e) => {
                    out.push(format!("{}: gold.mappings[{i}]: {e}", self.id));
                    continue;
                }
            };
            for line in &m.lines {
                if !pool.contains(line) {
                    out.push(format!("{}: gold.mappings[{i}].lines: `{line}` is outside the {} pool", self.id, m.entity));
                }
            }
        }
        for s in &self.sentences {
            let labels: Vec<_> = EntityLabel::ALL
                .into_iter()
                .filter(|e| gold.mappings.iter().any(|m| m.entity == *e && m.sentences.contains(&s.key())))
                .collect();
            if labels.contains(&EntityLabel::Cp) && labels.len() > 1 {
                out.push(format!(
                    "{}: sentence `{}` is mapped as both CP and another entity; it is not paired with itself",
                    self.id,
                    s.key()
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("duplicate CVE id `{0}`")]
    DuplicateId(String),
    #[error("{} invalid record(s); first: {}", .0.len(), .0[0])]
    Invalid(Vec<RecordError>),
}

/// Records ordered by (project, id), ids unique.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    records: Vec<CveRecord>,
}

impl Corpus {
    pub fn new(mut records: Vec<CveRecord>) -> Result<Self, CorpusError> {
        let mut ids = BTreeSet::new();
        for r in &records {
            if !ids.insert(r.id.as_str()) {
                return Err(CorpusError::DuplicateId(r.id.clone()));
            }
        }
        records.sort_by(|a, b| (&a.project, &a.id).cmp(&(&b.project, &b.id)));
        Ok(Corpus { records })
    }

    pub fn records(&self) -> &[CveRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&CveRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    /// Distinct project names, sorted.
    pub fn projects(&self) -> Vec<&str> {
        let set: BTreeSet<&str> = self.records.iter().map(|r| r.project.as_str()).collect();
        set.into_iter().collect()
    }

    pub fn project_counts(&self) -> BTreeMap<&str, usize> {
        let mut counts = BTreeMap::new();
        for r in &self.records {
            *counts.entry(r.project.as_str()).or_insert(0) += 1;
        }
        counts
    }

    pub fn by_project<'a>(&'a self, project: &'a str) -> impl Iterator<Item = &'a CveRecord> + 'a {
        self.records.iter().filter(move |r| r.project == project)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn artifact(kind: ArtifactKind, text: &str) -> Artifact {
        Artifact { kind, raw_text: text.into() }
    }

    const DIFF: &str = "--- a/x.c\n+++ b/x.c\n@@ -1,1 +1,2 @@\n keep();\n+check(len);\n";

    fn labels(pairs: &[(&str, &[EntityLabel])]) -> BTreeMap<SentenceKey, BTreeSet<EntityLabel>> {
        pairs.iter().map(|(k, ls)| (k.parse().unwrap(), ls.iter().copied().collect())).collect()
    }

    #[test]
    fn minimal_record() {
        let r = CveRecord::new("CVE-1", "p", vec![artifact(ArtifactKind::CommitMessage, "Add a check. Done.")], DIFF, None)
            .unwrap();
        assert_eq!(r.sentences().len(), 2);
        assert_eq!(r.sentences()[1].key().to_string(), "commit_message:1");
    }

    #[test]
    fn same_kind_artifacts_continue_numbering() {
        let arts = vec![
            artifact(ArtifactKind::BugReport, "One. Two."),
            artifact(ArtifactKind::CveSummary, "Summary."),
            artifact(ArtifactKind::BugReport, "Three."),
        ];
        let r = CveRecord::new("CVE-1", "p", arts, "", None).unwrap();
        let keys: Vec<String> = r.sentences().iter().map(|s| s.key().to_string()).collect();
        assert_eq!(keys, vec!["bug_report:0", "bug_report:1", "cve_summary:0", "bug_report:2"]);
    }

    #[test]
    fn label_for_missing_sentence_is_rejected() {
        let gold = GoldAnnotations {
            sentence_labels: labels(&[("commit_message:5", &[EntityLabel::Af])]),
            mappings: vec![],
        };
        let err = CveRecord::new("CVE-9", "p", vec![artifact(ArtifactKind::CommitMessage, "Only one.")], DIFF, Some(gold))
            .unwrap_err();
        assert_eq!(err.cve_id, "CVE-9");
        assert_eq!(err.field, "gold.sentence_labels.commit_message:5");
    }

    #[test]
    fn mapping_checks() {
        let arts = || vec![artifact(ArtifactKind::CommitMessage, "Add check. Also check.")];
        let line: LineKey = "x.c|new|2".parse().unwrap();
        let unlabeled = GoldAnnotations {
            sentence_labels: labels(&[("commit_message:0", &[EntityLabel::Cp])]),
            mappings: vec![GoldMapping {
                entity: EntityLabel::Af,
                sentences: ["commit_message:0".parse().unwrap()].into_iter().collect(),
                lines: [line.clone()].into_iter().collect(),
            }],
        };
        let err = CveRecord::new("C", "p", arts(), DIFF, Some(unlabeled)).unwrap_err();
        assert!(err.reason.contains("not labeled AF"));

        let group = |k: &str| GoldMapping {
            entity: EntityLabel::Af,
            sentences: [k.parse().unwrap()].into_iter().collect(),
            lines: [line.clone()].into_iter().collect(),
        };
        let overlapping = GoldAnnotations {
            sentence_labels: labels(&[("commit_message:0", &[EntityLabel::Af])]),
            mappings: vec![group("commit_message:0"), group("commit_message:0")],
        };
        let err = CveRecord::new("C", "p", arts(), DIFF, Some(overlapping)).unwrap_err();
        assert_eq!(err.field, "gold.mappings[1].sentences");

        let ok = GoldAnnotations {
            sentence_labels: labels(&[("commit_message:0", &[EntityLabel::Af])]),
            mappings: vec![group("commit_message:0")],
        };
        let r = CveRecord::new("C", "p", arts(), DIFF, Some(ok)).unwrap();
        assert!(r.diagnostics().is_empty());
    }

    #[test]
    fn record_level_errors() {
        assert_eq!(CveRecord::new("", "p", vec![], "", None).unwrap_err().field, "id");
        assert_eq!(CveRecord::new("C", "p", vec![], "", None).unwrap_err().field, "artifacts");
        let blank = vec![artifact(ArtifactKind::BugReport, " \n ")];
        assert_eq!(CveRecord::new("C", "p", blank, "", None).unwrap_err().field, "artifacts[0].text");
        let bad_diff = vec![artifact(ArtifactKind::BugReport, "x")];
        let err = CveRecord::new("C", "p", bad_diff, "--- a\n+++ b\n@@ -1,2 +1 @@\n a\n", None).unwrap_err();
        assert_eq!(err.field, "diff");
    }

    #[test]
    fn corpus_orders_and_rejects_duplicates() {
        let rec = |id: &str, project: &str| {
            CveRecord::new(id, project, vec![artifact(ArtifactKind::CveSummary, "x")], "", None).unwrap()
        };
        let corpus = Corpus::new(vec![rec("B", "zeta"), rec("C", "alpha"), rec("A", "zeta")]).unwrap();
        let ids: Vec<&str> = corpus.records().iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, vec!["C", "A", "B"]);
        assert_eq!(corpus.projects(), vec!["alpha", "zeta"]);
        assert_eq!(Corpus::new(vec![rec("A", "x"), rec("A", "y")]), Err(CorpusError::DuplicateId("A".into())));
    }

    #[test]
    fn sentence_text_is_substring_of_normalized_artifact() {
        let a = artifact(ArtifactKind::BugReport, "First  line.\nSecond\tline?  third");
        let norm = normalize_whitespace(&a.raw_text);
        for s in segment_sentences("C", &a, 0) {
            assert!(norm.contains(&s.text));
        }
    }
}
