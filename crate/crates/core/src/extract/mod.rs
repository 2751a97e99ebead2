//! Sentence classification into VT, AF and CP.
//!
//! Each entity is an independent binary problem. The heuristic classifier
//! fires when any pattern of the entity matches; the linear classifier is a
//! hinge-loss SVM over n-gram presence and pattern bits.

mod features;
mod linear;
mod metrics;
mod vocab;

use alloc::string::String;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::EntityLabel;
use crate::pattern::{Catalog, Token};

pub use features::{FeatureConfig, FeatureSpace, FeatureVector};
pub use linear::{c_grid, train_linear, LinearModel, TrainedClassifier, C_GRID_LEN, C_MAX, C_MIN};
pub use metrics::{evaluate_extraction, ExtractionMetrics};
pub use vocab::{ngrams, Vocabulary, MAX_NGRAM};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("{entity} training data has {positives} positive and {negatives} negative instances")]
    DegenerateTraining { entity: EntityLabel, positives: usize, negatives: usize },
    #[error("model vocabulary fingerprint {expected:016x} does not match {found:016x}")]
    VocabMismatch { expected: u64, found: u64 },
    #[error("model has {weights} weights but the feature space has {dim} dimensions")]
    DimensionMismatch { weights: usize, dim: usize },
    #[error("prediction and gold keys differ at `{0}`")]
    KeyMismatch(String),
}

/// Sentence classifiers, one row each in the extraction table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierChoice {
    Heuristic,
    LinearNgram,
    LinearPatterns,
    LinearBoth,
    /// An external process speaking the scorer protocol.
    Plugin,
}

impl ClassifierChoice {
    pub const BUILTIN: [ClassifierChoice; 4] = [
        ClassifierChoice::Heuristic,
        ClassifierChoice::LinearNgram,
        ClassifierChoice::LinearPatterns,
        ClassifierChoice::LinearBoth,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierChoice::Heuristic => "heuristic",
            ClassifierChoice::LinearNgram => "linear_ngram",
            ClassifierChoice::LinearPatterns => "linear_patterns",
            ClassifierChoice::LinearBoth => "linear_both",
            ClassifierChoice::Plugin => "plugin",
        }
    }

    /// Feature blocks for the linear variants.
    pub fn feature_config(self) -> Option<FeatureConfig> {
        match self {
            ClassifierChoice::LinearNgram => Some(FeatureConfig { ngrams: true, patterns: false }),
            ClassifierChoice::LinearPatterns => Some(FeatureConfig { ngrams: false, patterns: true }),
            ClassifierChoice::LinearBoth => Some(FeatureConfig { ngrams: true, patterns: true }),
            ClassifierChoice::Heuristic | ClassifierChoice::Plugin => None,
        }
    }
}

impl core::fmt::Display for ClassifierChoice {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for ClassifierChoice {
    type Err = crate::label::ParseEnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "heuristic" => ClassifierChoice::Heuristic,
            "linear_ngram" => ClassifierChoice::LinearNgram,
            "linear_patterns" => ClassifierChoice::LinearPatterns,
            "linear_both" => ClassifierChoice::LinearBoth,
            "plugin" => ClassifierChoice::Plugin,
            _ => return Err(crate::label::ParseEnumError { what: "classifier", value: s.into() }),
        })
    }
}

/// True iff at least one pattern of `entity` applies to the sentence.
pub fn heuristic_classify(catalog: &Catalog, tokens: &[Token], entity: EntityLabel) -> bool {
    catalog.patterns_for(entity).any(|p| catalog.match_pattern(p, tokens).is_some())
}
