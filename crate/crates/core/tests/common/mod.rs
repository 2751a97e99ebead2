#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use vulntrace_core::corpus::{Artifact, Corpus, CveRecord, GoldAnnotations, GoldMapping, LineKey, SentenceKey};
use vulntrace_core::{ArtifactKind, EntityLabel};

pub const AF_SENTENCE: &str = "Add a bounds check on the buffer.";
pub const CP_SENTENCE: &str = "This fixes a buffer over-read when reading the header.";
pub const VT_SENTENCE: &str = "The buffer copy did not check the length.";
pub const NOISE_SENTENCE: &str = "Thanks to the reporter.";

pub fn diff(file: &str) -> String {
    format!(
        "--- a/{file}\n+++ b/{file}\n@@ -10,4 +10,5 @@\n int handler(const u_char *cp) {{\n-    copy(buf, cp, length);\n\
         +    if (!bounds_check(length)) return -1;\n+    copy(buf, cp, length);\n     return read_header(cp);\n }}\n"
    )
}

pub fn key(s: &str) -> SentenceKey {
    s.parse().unwrap()
}

pub fn line(s: &str) -> LineKey {
    s.parse().unwrap()
}

pub fn mapping(entity: EntityLabel, sentences: &[&str], lines: &[&str]) -> GoldMapping {
    GoldMapping {
        entity,
        sentences: sentences.iter().map(|s| key(s)).collect(),
        lines: lines.iter().map(|l| line(l)).collect(),
    }
}

/// A CVE whose three entity sentences match one built-in pattern each and
/// whose gold lines share terms only with their own query.
pub fn standard_record(id: &str, project: &str, with_vt: bool) -> CveRecord {
    let file = format!("{}.c", id.to_lowercase());
    let commit = Artifact { kind: ArtifactKind::CommitMessage, raw_text: format!("{AF_SENTENCE} {CP_SENTENCE}") };
    let report_text = if with_vt { format!("{VT_SENTENCE} {NOISE_SENTENCE}") } else { NOISE_SENTENCE.to_string() };
    let report = Artifact { kind: ArtifactKind::BugReport, raw_text: report_text };
    let mut labels: BTreeMap<SentenceKey, BTreeSet<EntityLabel>> = BTreeMap::new();
    labels.insert(key("commit_message:0"), [EntityLabel::Af].into());
    labels.insert(key("commit_message:1"), [EntityLabel::Cp].into());
    let mut mappings = vec![
        mapping(EntityLabel::Af, &["commit_message:0"], &[&format!("{file}|new|11")]),
        mapping(EntityLabel::Cp, &["commit_message:1"], &[&format!("{file}|new|13")]),
    ];
    if with_vt {
        labels.insert(key("bug_report:0"), [EntityLabel::Vt].into());
        mappings.push(mapping(EntityLabel::Vt, &["bug_report:0"], &[&format!("{file}|old|11")]));
    }
    let gold = GoldAnnotations { sentence_labels: labels, mappings };
    CveRecord::new(id, project, vec![commit, report], &diff(&file), Some(gold)).unwrap()
}

pub fn standard_corpus(projects: &[&str], per_project: usize) -> Corpus {
    let mut records = Vec::new();
    for p in projects {
        for i in 0..per_project {
            records.push(standard_record(&format!("CVE-{p}-{i}"), p, true));
        }
    }
    Corpus::new(records).unwrap()
}
