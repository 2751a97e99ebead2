//! Project-wise leave-one-out evaluation of extraction and tracing, and
//! the report tables built from it.

mod extraction;
mod report;
mod tracing;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;
use crate::extract::ExtractError;
use crate::label::EntityLabel;
use crate::trace::{ScorerError, TraceError};

pub use extraction::{
    extraction_row, predict_fold, run_extraction_eval, ExtractionFold, ExtractionRow, FoldPredictions, PredictionRow,
    SentenceClassifier,
};
pub use report::{
    extraction_table, format_percent, render_markdown, trace_table, Provenance, ReportBundle, Table,
};
pub use tracing::{
    aggregate_trace, trace_cve, CveTrace, Exclusion, PairTraceRow, ProjectPair, ProjectSingle, RankingRow,
    SingleTraceRow, TraceMode,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("leave-one-project-out needs at least 2 projects, found {0}")]
    TooFewProjects(usize),
    #[error("{0} has no gold annotations")]
    MissingGold(String),
    #[error("classifier `plugin` selected but no plugin classifier supplied")]
    PluginRequired,
    #[error("k values must be ascending and at least 1")]
    BadK,
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Scorer(#[from] ScorerError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub test_project: String,
    pub train_projects: Vec<String>,
}

/// One fold per project, in project-name order.
pub fn make_folds(corpus: &Corpus) -> Result<Vec<Fold>, EvalError> {
    let projects = corpus.projects();
    if projects.len() < 2 {
        return Err(EvalError::TooFewProjects(projects.len()));
    }
    Ok(projects
        .iter()
        .map(|&test| Fold {
            test_project: test.into(),
            train_projects: projects.iter().filter(|&&p| p != test).map(|&p| p.into()).collect(),
        })
        .collect())
}

/// Default end-to-end classifiers: heuristic for VT, SVM with patterns for AF and CP.
pub fn default_end_to_end(entity: EntityLabel) -> crate::extract::ClassifierChoice {
    match entity {
        EntityLabel::Vt => crate::extract::ClassifierChoice::Heuristic,
        EntityLabel::Af | EntityLabel::Cp => crate::extract::ClassifierChoice::LinearPatterns,
    }
}

/// Checks that k values are ascending, distinct and at least 1.
pub fn check_k_values(k_values: &[usize]) -> Result<(), EvalError> {
    if k_values.is_empty() || k_values[0] == 0 || k_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EvalError::BadK);
    }
    Ok(())
}
