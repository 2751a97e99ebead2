#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use vulntrace::corpus_io::write_corpus;
use vulntrace_core::corpus::{Artifact, Corpus, CveRecord, GoldAnnotations, GoldMapping, SentenceKey};
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

pub fn mapping(entity: EntityLabel, sentences: &[&str], lines: &[&str]) -> GoldMapping {
    GoldMapping {
        entity,
        sentences: sentences.iter().map(|s| key(s)).collect(),
        lines: lines.iter().map(|l| l.parse().unwrap()).collect(),
    }
}

/// Commit message with an AF and a CP sentence; the bug report carries
/// the VT sentence when `with_vt` is set.
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

pub fn write_standard_corpus(dir: &Path, projects: &[&str], per_project: usize) -> PathBuf {
    let path = dir.join("corpus");
    write_corpus(&standard_corpus(projects, per_project), &path).unwrap();
    path
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}
