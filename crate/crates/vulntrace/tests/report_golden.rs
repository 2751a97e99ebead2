mod common;

use std::fs;
use std::path::PathBuf;

use vulntrace::corpus_io::write_corpus;
use vulntrace::run::{run, write_bundle_tables, ReportFormat, RunConfig};
use vulntrace_core::corpus::{Artifact, Corpus, CveRecord, GoldAnnotations};
use vulntrace_core::eval::ReportBundle;
use vulntrace_core::{ArtifactKind, EntityLabel};

fn golden(name: &str) -> PathBuf {
    common::fixture("golden").join(name)
}

/// Standard records plus one per project that no pattern recognizes and
/// whose gold lines share no terms with the query.
fn mixed_corpus() -> Corpus {
    let mut records = Vec::new();
    for p in ["alpha", "beta", "gamma"] {
        for i in 0..2 {
            records.push(common::standard_record(&format!("CVE-{p}-{i}"), p, p != "alpha" || i == 0));
        }
        let id = format!("CVE-{p}-hard");
        let text = "Tighten the loop in the walker. The process went down. Thanks to the reporter.";
        let commit = Artifact { kind: ArtifactKind::CommitMessage, raw_text: text.into() };
        let file = format!("{p}.c");
        let gold = GoldAnnotations {
            sentence_labels: [
                (common::key("commit_message:0"), [EntityLabel::Af].into()),
                (common::key("commit_message:1"), [EntityLabel::Cp].into()),
            ]
            .into(),
            mappings: vec![
                common::mapping(EntityLabel::Af, &["commit_message:0"], &[&format!("{file}|new|12")]),
                common::mapping(EntityLabel::Cp, &["commit_message:1"], &[&format!("{file}|new|10")]),
            ],
        };
        records.push(CveRecord::new(&id, p, vec![commit], &common::diff(&file), Some(gold)).unwrap());
    }
    Corpus::new(records).unwrap()
}

#[test]
fn tables_match_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    write_corpus(&mixed_corpus(), &corpus).unwrap();
    let mut cfg = RunConfig::new(corpus, dir.path().join("out"));
    cfg.k_values = vec![1, 2];
    run(&cfg, 1).unwrap();
    for name in ["extraction_table.md", "extraction_table.csv", "trace_tables.md", "trace_tables.csv"] {
        let got = fs::read_to_string(cfg.output_dir.join(name)).unwrap();
        if std::env::var_os("VULNTRACE_BLESS").is_some() {
            fs::write(golden(name), &got).unwrap();
        }
        assert_eq!(got, fs::read_to_string(golden(name)).unwrap(), "{name}");
    }
}

#[test]
fn empty_bundle_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = ReportBundle { k_values: vec![1, 2, 3], ..Default::default() };
    write_bundle_tables(&bundle, dir.path(), ReportFormat::Both).unwrap();
    assert_eq!(fs::read_to_string(dir.path().join("trace_tables.csv")).unwrap(), "table,mode,scorer,target,top1,top2,top3\n");
    assert_eq!(
        fs::read_to_string(dir.path().join("trace_tables.md")).unwrap(),
        "| table | mode | scorer | target | top1 | top2 | top3 |\n| --- | --- | --- | --- | --- | --- | --- |\n"
    );
}
