mod common;

use common::*;
use vulntrace_core::corpus::{Corpus, SentenceKey};
use vulntrace_core::eval::{
    aggregate_trace, make_folds, predict_fold, run_extraction_eval, trace_cve, CveTrace, TraceMode,
};
use vulntrace_core::extract::{ClassifierChoice, ExtractionMetrics};
use vulntrace_core::pattern::Catalog;
use vulntrace_core::trace::{LexicalScorer, PairKind};
use vulntrace_core::EntityLabel;

const K: [usize; 5] = [1, 2, 3, 4, 5];

fn trace_all(corpus: &Corpus, predicted: &dyn Fn(&str, &SentenceKey, EntityLabel) -> bool) -> Vec<CveTrace> {
    corpus
        .records()
        .iter()
        .map(|r| trace_cve(r, &LexicalScorer, &|k, e| predicted(&r.id, k, e), &K).unwrap())
        .collect()
}

fn gold_predictor(corpus: &Corpus) -> impl Fn(&str, &SentenceKey, EntityLabel) -> bool + '_ {
    move |id, k, e| corpus.get(id).unwrap().gold.as_ref().unwrap().has_label(k, e)
}

#[test]
fn heuristic_recall_is_total_on_pattern_corpus() {
    let corpus = standard_corpus(&["alpha", "beta", "gamma"], 2);
    let (rows, _) = run_extraction_eval(&corpus, &Catalog::builtin(), &[ClassifierChoice::Heuristic], None, 0).unwrap();
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert_eq!(r.recall, 1.0, "{:?}", r.entity);
        assert_eq!(r.precision, 1.0);
    }
}

#[test]
fn extraction_table_recomputes_from_prediction_rows() {
    let corpus = standard_corpus(&["alpha", "beta"], 3);
    let choices = [ClassifierChoice::Heuristic, ClassifierChoice::LinearBoth];
    let (rows, folds) = run_extraction_eval(&corpus, &Catalog::builtin(), &choices, None, 3).unwrap();
    for row in &rows {
        let mut per_fold = Vec::new();
        for f in folds.iter().filter(|f| f.classifier == row.classifier && f.entity == row.entity) {
            let (mut tp, mut fp, mut fn_) = (0.0, 0.0, 0.0);
            for r in &f.rows {
                match (r.predicted, r.gold) {
                    (true, true) => tp += 1.0,
                    (true, false) => fp += 1.0,
                    (false, true) => fn_ += 1.0,
                    _ => {}
                }
            }
            let p = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
            let r = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 };
            let f1 = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
            per_fold.push((p, r, f1));
        }
        let n = per_fold.len() as f64;
        let avg_p: f64 = per_fold.iter().map(|x| x.0).sum::<f64>() / n;
        let avg_f1: f64 = per_fold.iter().map(|x| x.2).sum::<f64>() / n;
        assert!((row.precision - avg_p).abs() < 1e-12);
        assert!((row.f1 - avg_f1).abs() < 1e-12);
    }
}

#[test]
fn degenerate_fold_is_annotated_zero() {
    let mut records = vec![standard_record("CVE-A-0", "alpha", true), standard_record("CVE-A-1", "alpha", true)];
    records.push(standard_record("CVE-B-0", "beta", false));
    records.push(standard_record("CVE-B-1", "beta", false));
    let corpus = Corpus::new(records).unwrap();
    let folds = make_folds(&corpus).unwrap();
    let alpha = folds.iter().find(|f| f.test_project == "alpha").unwrap();
    let fp = predict_fold(&corpus, &Catalog::builtin(), alpha, EntityLabel::Vt, ClassifierChoice::LinearNgram, None, 0)
        .unwrap();
    assert!(fp.annotation.as_deref().unwrap().contains("0 positive"));
    let m = fp.metrics();
    assert_eq!((m.precision(), m.recall(), m.f1()), (0.0, 0.0, 0.0));
    assert!(fp.rows.iter().all(|r| !r.predicted));
}

#[test]
fn lexical_scorer_ranks_gold_first_everywhere() {
    let corpus = standard_corpus(&["alpha", "beta"], 2);
    let traces = trace_all(&corpus, &gold_predictor(&corpus));
    let (singles, pairs) = aggregate_trace(&traces, &K, "lexical");
    for r in singles.iter().filter(|r| r.mode == TraceMode::Gold) {
        assert_eq!(r.value, Some(1.0), "{:?} k={}", r.entity, r.k);
    }
    for r in pairs.iter().filter(|r| r.mode == TraceMode::Gold) {
        assert_eq!(r.value, Some(1.0));
    }
}

#[test]
fn perfect_extractor_matches_gold_mode_and_fp_lowers_pairs() {
    let corpus = standard_corpus(&["alpha", "beta"], 2);
    let gold = gold_predictor(&corpus);
    let traces = trace_all(&corpus, &gold);
    let (singles, pairs) = aggregate_trace(&traces, &K, "lexical");
    for k in K {
        for e in EntityLabel::ALL {
            let get = |m| singles.iter().find(|r| r.mode == m && r.entity == e && r.k == k).unwrap().value;
            assert_eq!(get(TraceMode::Gold), get(TraceMode::EndToEnd));
        }
        for kind in PairKind::ALL {
            let get = |m| pairs.iter().find(|r| r.mode == m && r.kind == kind && r.k == k).unwrap().value;
            assert_eq!(get(TraceMode::Gold), get(TraceMode::EndToEnd));
        }
    }

    // the noise sentence becomes an AF and CP false positive
    let noisy = |id: &str, k: &SentenceKey, e: EntityLabel| gold(id, k, e) || k.to_string() == "bug_report:1";
    let traces = trace_all(&corpus, &noisy);
    let (_, pairs) = aggregate_trace(&traces, &K, "lexical");
    for kind in PairKind::ALL {
        for k in K {
            let get = |m| pairs.iter().find(|r| r.mode == m && r.kind == kind && r.k == k).unwrap().value.unwrap();
            assert!(get(TraceMode::EndToEnd) < get(TraceMode::Gold));
        }
    }
    assert!(traces.iter().all(|t| t.rankings.iter().any(|r| r.sentence.to_string() == "bug_report:1")));
}

#[test]
fn k_prefix_runs_agree() {
    let corpus = standard_corpus(&["alpha", "beta"], 2);
    let gold = gold_predictor(&corpus);
    let short: Vec<CveTrace> = corpus
        .records()
        .iter()
        .map(|r| trace_cve(r, &LexicalScorer, &|k, e| gold(&r.id, k, e), &[1, 2, 3]).unwrap())
        .collect();
    let (s5, p5) = aggregate_trace(&trace_all(&corpus, &gold), &K, "lexical");
    let (s3, p3) = aggregate_trace(&short, &[1, 2, 3], "lexical");
    for r in &s3 {
        assert!(s5.contains(r));
    }
    for r in &p3 {
        assert!(p5.contains(r));
    }
}

#[test]
fn gold_outside_pool_aborts_only_that_cve() {
    use vulntrace_core::corpus::{Artifact, CveRecord, GoldAnnotations};
    use vulntrace_core::ArtifactKind;
    let good = standard_record("CVE-1", "alpha", true);
    let a = Artifact { kind: ArtifactKind::CommitMessage, raw_text: AF_SENTENCE.into() };
    let gold = GoldAnnotations {
        sentence_labels: [(key("commit_message:0"), [EntityLabel::Af].into())].into(),
        mappings: vec![mapping(EntityLabel::Af, &["commit_message:0"], &["x.c|new|99"])],
    };
    let bad = CveRecord::new("CVE-2", "alpha", vec![a], &diff("x.c"), Some(gold)).unwrap();
    assert_eq!(bad.diagnostics().len(), 1);
    let t_bad = trace_cve(&bad, &LexicalScorer, &|_, _| false, &K).unwrap();
    assert!(t_bad.aborted());
    let t_good = trace_cve(&good, &LexicalScorer, &|_, _| false, &K).unwrap();
    let (singles, _) = aggregate_trace(&[t_good, t_bad], &K, "lexical");
    let af = singles.iter().find(|r| r.mode == TraceMode::Gold && r.entity == EntityLabel::Af && r.k == 1).unwrap();
    assert_eq!(af.projects[0].counts.groups, 1);
}

#[test]
fn confusion_counts_merge() {
    let mut a = ExtractionMetrics { tp: 1, fp: 2, fn_: 3, tn: 4 };
    a.merge(&ExtractionMetrics { tp: 1, fp: 1, fn_: 1, tn: 1 });
    assert_eq!(a, ExtractionMetrics { tp: 2, fp: 3, fn_: 4, tn: 5 });
}
