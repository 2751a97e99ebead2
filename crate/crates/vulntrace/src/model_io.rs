//! Trained linear classifiers as JSON, one file per entity.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use vulntrace_core::extract::{FeatureConfig, FeatureSpace, LinearModel, TrainedClassifier, Vocabulary};
use vulntrace_core::pattern::Catalog;
use vulntrace_core::EntityLabel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub entity: EntityLabel,
    pub c: f64,
    pub bias: f64,
    /// Non-zero weights by feature id.
    pub weights: BTreeMap<u32, f64>,
    pub dim: usize,
    pub vocab_fingerprint: String,
    pub catalog_fingerprint: String,
    pub feature_config: FeatureConfig,
    pub pattern_codes: Vec<String>,
    pub vocab: Vocabulary,
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
}

fn hex64(v: u64) -> String {
    format!("{v:016x}")
}

impl ModelFile {
    pub fn from_trained(t: &TrainedClassifier) -> Self {
        ModelFile {
            entity: t.model.entity,
            c: t.model.c,
            bias: t.model.bias,
            weights: t
                .model
                .weights
                .iter()
                .enumerate()
                .filter(|(_, w)| **w != 0.0)
                .map(|(i, w)| (i as u32, *w))
                .collect(),
            dim: t.model.weights.len(),
            vocab_fingerprint: hex64(t.model.vocab_fingerprint),
            catalog_fingerprint: hex64(t.model.catalog_fingerprint),
            feature_config: t.space.config,
            pattern_codes: t.space.pattern_codes.clone(),
            vocab: t.space.vocab.clone(),
        }
    }

    /// Rebuilds the classifier, checking both fingerprints against the
    /// stored vocabulary and the catalog in use.
    pub fn into_trained(self, catalog: &Catalog) -> Result<TrainedClassifier, String> {
        let vocab_fp = self.vocab.fingerprint();
        if hex64(vocab_fp) != self.vocab_fingerprint {
            return Err(format!("vocabulary fingerprint {} does not match its vocabulary", self.vocab_fingerprint));
        }
        let catalog_fp = hex64(catalog.fingerprint());
        if catalog_fp != self.catalog_fingerprint {
            return Err(format!(
                "model was trained with catalog {} but the loaded catalog is {catalog_fp}",
                self.catalog_fingerprint
            ));
        }
        let space = FeatureSpace {
            entity: self.entity,
            config: self.feature_config,
            vocab: self.vocab,
            pattern_codes: self.pattern_codes,
        };
        if space.dim() != self.dim {
            return Err(format!("model declares {} features but its space has {}", self.dim, space.dim()));
        }
        let mut weights = vec![0.0; self.dim];
        for (i, w) in self.weights {
            *weights.get_mut(i as usize).ok_or_else(|| format!("weight id {i} out of range"))? = w;
        }
        let model = LinearModel {
            entity: self.entity,
            c: self.c,
            bias: self.bias,
            weights,
            vocab_fingerprint: vocab_fp,
            catalog_fingerprint: catalog.fingerprint(),
        };
        Ok(TrainedClassifier { space, model })
    }
}

pub fn model_path(dir: &Path, entity: EntityLabel) -> PathBuf {
    dir.join(format!("{entity}.model.json"))
}

pub fn save_model(dir: &Path, t: &TrainedClassifier) -> Result<PathBuf, ModelError> {
    let path = model_path(dir, t.model.entity);
    let io = |e: std::io::Error| ModelError::Io { path: path.clone(), message: e.to_string() };
    fs::create_dir_all(dir).map_err(io)?;
    let mut text = serde_json::to_string_pretty(&ModelFile::from_trained(t)).expect("model serializes");
    text.push('\n');
    fs::write(&path, text).map_err(io)?;
    Ok(path)
}

pub fn load_model(dir: &Path, entity: EntityLabel, catalog: &Catalog) -> Result<TrainedClassifier, ModelError> {
    let path = model_path(dir, entity);
    let text = fs::read_to_string(&path).map_err(|e| ModelError::Io { path: path.clone(), message: e.to_string() })?;
    let file: ModelFile =
        serde_json::from_str(&text).map_err(|e| ModelError::Format { path: path.clone(), message: e.to_string() })?;
    if file.entity != entity {
        return Err(ModelError::Format { path, message: format!("file holds a {} model", file.entity) });
    }
    file.into_trained(catalog).map_err(|message| ModelError::Format { path, message })
}
