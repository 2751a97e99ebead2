use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{make_folds, EvalError, Fold};
use crate::corpus::{Corpus, CveRecord, SentenceKey};
use crate::extract::{ClassifierChoice, ExtractError, ExtractionMetrics, TrainedClassifier};
use crate::label::EntityLabel;
use crate::pattern::{Catalog, Token};
use crate::trace::ScorerError;

/// An external sentence classifier, such as a process behind the plugin protocol.
pub trait SentenceClassifier: Sync {
    fn classify(&self, text: &str, entity: EntityLabel) -> Result<bool, ScorerError>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub fold: String,
    pub cve_id: String,
    pub sentence: SentenceKey,
    pub entity: EntityLabel,
    pub classifier: ClassifierChoice,
    pub predicted: bool,
    pub gold: bool,
    /// Codes of the entity's patterns matching the sentence.
    pub patterns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPredictions {
    pub fold: Fold,
    pub entity: EntityLabel,
    pub classifier: ClassifierChoice,
    pub rows: Vec<PredictionRow>,
    /// Set when training was impossible and every prediction defaulted to negative.
    pub annotation: Option<String>,
}

impl FoldPredictions {
    pub fn metrics(&self) -> ExtractionMetrics {
        let mut m = ExtractionMetrics::default();
        for r in &self.rows {
            m.record(r.predicted, r.gold);
        }
        m
    }
}

fn gold_records<'a>(corpus: &'a Corpus, projects: &'a [String]) -> impl Iterator<Item = &'a CveRecord> + 'a {
    corpus.records().iter().filter(move |r| projects.contains(&r.project))
}

fn require_gold(record: &CveRecord) -> Result<&crate::corpus::GoldAnnotations, EvalError> {
    record.gold.as_ref().ok_or_else(|| EvalError::MissingGold(record.id.clone()))
}

/// Predictions for every sentence of the fold's test project, from a
/// classifier that saw only the training projects.
pub fn predict_fold(
    corpus: &Corpus,
    catalog: &Catalog,
    fold: &Fold,
    entity: EntityLabel,
    classifier: ClassifierChoice,
    plugin: Option<&dyn SentenceClassifier>,
    seed: u64,
) -> Result<FoldPredictions, EvalError> {
    let mut annotation = None;
    let trained = match classifier.feature_config() {
        Some(config) => {
            let mut train: Vec<(&[Token], bool)> = Vec::new();
            for r in gold_records(corpus, &fold.train_projects) {
                let gold = require_gold(r)?;
                for s in r.sentences() {
                    train.push((&s.tokens, gold.has_label(&s.key(), entity)));
                }
            }
            match TrainedClassifier::train(&train, catalog, entity, config, seed) {
                Ok(t) => Some(t),
                Err(ExtractError::DegenerateTraining { positives, negatives, .. }) => {
                    annotation = Some(format!(
                        "degenerate training: {positives} positive / {negatives} negative {entity} instances; all predictions negative"
                    ));
                    None
                }
                Err(e) => return Err(e.into()),
            }
        }
        None => None,
    };
    if classifier == ClassifierChoice::Plugin && plugin.is_none() {
        return Err(EvalError::PluginRequired);
    }

    let test = [fold.test_project.clone()];
    let mut rows = Vec::new();
    for r in gold_records(corpus, &test) {
        let gold = require_gold(r)?;
        for s in r.sentences() {
            let matches = catalog.match_entity(&s.tokens, entity);
            let predicted = match classifier {
                ClassifierChoice::Heuristic => !matches.is_empty(),
                ClassifierChoice::Plugin => plugin.ok_or(EvalError::PluginRequired)?.classify(&s.text, entity)?,
                _ => match &trained {
                    Some(t) => t.predict(&s.tokens, catalog)?,
                    None => false,
                },
            };
            rows.push(PredictionRow {
                fold: fold.test_project.clone(),
                cve_id: r.id.clone(),
                sentence: s.key(),
                entity,
                classifier,
                predicted,
                gold: gold.has_label(&s.key(), entity),
                patterns: matches.into_iter().map(|m| m.pattern_code).collect(),
            });
        }
    }
    Ok(FoldPredictions { fold: fold.clone(), entity, classifier, rows, annotation })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionFold {
    pub project: String,
    pub counts: ExtractionMetrics,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub annotation: Option<String>,
}

/// One (classifier, entity) cell group of the extraction table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionRow {
    pub classifier: ClassifierChoice,
    pub entity: EntityLabel,
    pub folds: Vec<ExtractionFold>,
    /// Macro averages over folds.
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl ExtractionRow {
    pub fn annotations(&self) -> impl Iterator<Item = (&str, &str)> {
        self.folds.iter().filter_map(|f| f.annotation.as_deref().map(|a| (f.project.as_str(), a)))
    }
}

pub fn extraction_row(classifier: ClassifierChoice, entity: EntityLabel, folds: &[FoldPredictions]) -> ExtractionRow {
    let folds: Vec<ExtractionFold> = folds
        .iter()
        .filter(|f| f.classifier == classifier && f.entity == entity)
        .map(|f| {
            let m = f.metrics();
            ExtractionFold {
                project: f.fold.test_project.clone(),
                counts: m,
                precision: m.precision(),
                recall: m.recall(),
                f1: m.f1(),
                annotation: f.annotation.clone(),
            }
        })
        .collect();
    let n = folds.len().max(1) as f64;
    let avg = |g: fn(&ExtractionFold) -> f64| folds.iter().map(g).sum::<f64>() / n;
    ExtractionRow {
        classifier,
        entity,
        precision: avg(|f| f.precision),
        recall: avg(|f| f.recall),
        f1: avg(|f| f.f1),
        folds,
    }
}

/// Sequential LOOCV over every (classifier, entity, fold).
pub fn run_extraction_eval(
    corpus: &Corpus,
    catalog: &Catalog,
    classifiers: &[ClassifierChoice],
    plugin: Option<&dyn SentenceClassifier>,
    seed: u64,
) -> Result<(Vec<ExtractionRow>, Vec<FoldPredictions>), EvalError> {
    let folds = make_folds(corpus)?;
    let mut all = Vec::new();
    for &c in classifiers {
        for entity in EntityLabel::ALL {
            for fold in &folds {
                all.push(predict_fold(corpus, catalog, fold, entity, c, plugin, seed)?);
            }
        }
    }
    let rows = classifiers
        .iter()
        .flat_map(|&c| EntityLabel::ALL.into_iter().map(move |e| (c, e)))
        .map(|(c, e)| extraction_row(c, e, &all))
        .collect();
    Ok((rows, all))
}
