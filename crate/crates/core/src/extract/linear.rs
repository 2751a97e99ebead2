//! L2-regularized hinge-loss SVM trained by dual coordinate descent.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{FeatureConfig, FeatureSpace, FeatureVector};
use super::metrics::ExtractionMetrics;
use super::vocab::Vocabulary;
use super::ExtractError;
use crate::fingerprint;
use crate::label::EntityLabel;
use crate::pattern::{Catalog, Token};

pub const C_MIN: f64 = 0.001;
pub const C_MAX: f64 = 100.0;
pub const C_GRID_LEN: usize = 20;

const MAX_PASSES: usize = 1000;
const DUAL_TOL: f64 = 1e-8;
const TUNE_FRACTION: f64 = 0.2;

/// Evenly spaced penalty values over `[C_MIN, C_MAX]`, endpoints exact.
pub fn c_grid() -> [f64; C_GRID_LEN] {
    let step = (C_MAX - C_MIN) / (C_GRID_LEN - 1) as f64;
    let mut grid = [0.0; C_GRID_LEN];
    for (k, c) in grid.iter_mut().enumerate() {
        *c = C_MIN + k as f64 * step;
    }
    grid[C_GRID_LEN - 1] = C_MAX;
    grid
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub entity: EntityLabel,
    pub c: f64,
    pub bias: f64,
    pub weights: Vec<f64>,
    pub vocab_fingerprint: u64,
    pub catalog_fingerprint: u64,
}

impl LinearModel {
    pub fn decision(&self, x: &FeatureVector) -> f64 {
        x.dot(&self.weights) + self.bias
    }

    /// Positive iff the decision value is strictly above zero.
    pub fn predict(&self, space: &FeatureSpace, x: &FeatureVector) -> Result<bool, ExtractError> {
        let found = space.vocab.fingerprint();
        if found != self.vocab_fingerprint {
            return Err(ExtractError::VocabMismatch { expected: self.vocab_fingerprint, found });
        }
        if self.weights.len() != space.dim() {
            return Err(ExtractError::DimensionMismatch { weights: self.weights.len(), dim: space.dim() });
        }
        Ok(self.decision(x) > 0.0)
    }
}

/// Solves the dual of min ½‖w‖² + C Σ max(0, 1 − yᵢ(w·xᵢ + b)) with the
/// bias as a constant extra feature. Instances are visited in the given order.
fn solve(data: &[(FeatureVector, bool)], dim: usize, c: f64) -> (Vec<f64>, f64) {
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut alpha = vec![0.0; data.len()];
    for _ in 0..MAX_PASSES {
        let mut dual_change = 0.0;
        for (i, (x, label)) in data.iter().enumerate() {
            let y = if *label { 1.0 } else { -1.0 };
            let q = x.nnz() as f64 + 1.0;
            let g = y * (x.dot(&w) + b) - 1.0;
            let new_alpha = (alpha[i] - g / q).clamp(0.0, c);
            let d = new_alpha - alpha[i];
            if d != 0.0 {
                alpha[i] = new_alpha;
                for &j in x.indices() {
                    w[j as usize] += d * y;
                }
                b += d * y;
                dual_change += -(g * d + 0.5 * q * d * d);
            }
        }
        if dual_change.abs() < DUAL_TOL {
            break;
        }
    }
    (w, b)
}

fn f1_on(w: &[f64], b: f64, data: &[(FeatureVector, bool)]) -> f64 {
    let mut m = ExtractionMetrics::default();
    for (x, label) in data {
        m.record(x.dot(w) + b > 0.0, *label);
    }
    m.f1()
}

/// Stratified 80/20 split; `None` when a class is too small to split.
fn tuning_split(data: &[(FeatureVector, bool)], seed: u64) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fit = Vec::new();
    let mut tune = Vec::new();
    for class in [true, false] {
        let mut idx: Vec<usize> = (0..data.len()).filter(|&i| data[i].1 == class).collect();
        if idx.len() < 2 {
            return None;
        }
        idx.shuffle(&mut rng);
        let n_tune = libm::ceil(idx.len() as f64 * TUNE_FRACTION) as usize;
        tune.extend_from_slice(&idx[..n_tune]);
        fit.extend_from_slice(&idx[n_tune..]);
    }
    fit.sort_unstable();
    tune.sort_unstable();
    Some((fit, tune))
}

/// Trains on feature vectors: picks C from [`c_grid`] by F1 on a tuning
/// split (smaller C on ties), then refits on every instance.
pub fn train_linear(
    instances: &[(FeatureVector, bool)],
    dim: usize,
    entity: EntityLabel,
    seed: u64,
) -> Result<(Vec<f64>, f64, f64), ExtractError> {
    if instances.is_empty() {
        return Err(ExtractError::EmptyTrainingSet);
    }
    let positives = instances.iter().filter(|(_, y)| *y).count();
    let negatives = instances.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(ExtractError::DegenerateTraining { entity, positives, negatives });
    }
    let mut data = instances.to_vec();
    data.sort();

    let split_seed = fingerprint::of_str(entity.as_str()) ^ seed;
    let (fit, tune): (Vec<_>, Vec<_>) = match tuning_split(&data, split_seed) {
        Some((f, t)) => (f.iter().map(|&i| data[i].clone()).collect(), t.iter().map(|&i| data[i].clone()).collect()),
        None => (data.clone(), data.clone()),
    };

    let mut best: Option<(f64, f64)> = None;
    for c in c_grid() {
        let (w, b) = solve(&fit, dim, c);
        let f1 = f1_on(&w, b, &tune);
        if best.is_none_or(|(best_f1, _)| f1 > best_f1) {
            best = Some((f1, c));
        }
    }
    let c = best.map(|(_, c)| c).unwrap_or(C_MIN);
    let (w, b) = solve(&data, dim, c);
    Ok((w, b, c))
}

/// A linear model together with the feature space it was trained in.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedClassifier {
    pub space: FeatureSpace,
    pub model: LinearModel,
}

impl TrainedClassifier {
    pub fn train(
        sentences: &[(&[Token], bool)],
        catalog: &Catalog,
        entity: EntityLabel,
        config: FeatureConfig,
        seed: u64,
    ) -> Result<Self, ExtractError> {
        let vocab = if config.ngrams {
            Vocabulary::build(sentences.iter().map(|(t, _)| *t))?
        } else {
            Vocabulary::empty()
        };
        let space = FeatureSpace::new(entity, config, vocab, catalog);
        let instances: Vec<(FeatureVector, bool)> =
            sentences.iter().map(|(t, y)| (space.extract(t, catalog), *y)).collect();
        let (weights, bias, c) = train_linear(&instances, space.dim(), entity, seed)?;
        let model = LinearModel {
            entity,
            c,
            bias,
            weights,
            vocab_fingerprint: space.vocab.fingerprint(),
            catalog_fingerprint: catalog.fingerprint(),
        };
        Ok(TrainedClassifier { space, model })
    }

    pub fn predict(&self, tokens: &[Token], catalog: &Catalog) -> Result<bool, ExtractError> {
        self.model.predict(&self.space, &self.space.extract(tokens, catalog))
    }
}
