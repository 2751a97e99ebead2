use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::vocab::{ngrams, Vocabulary};
use crate::label::EntityLabel;
use crate::pattern::{Catalog, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub ngrams: bool,
    pub patterns: bool,
}

/// Sorted ids of the features set to 1.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureVector {
    indices: Vec<u32>,
}

impl FeatureVector {
    pub fn from_indices(mut indices: Vec<u32>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        FeatureVector { indices }
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn dot(&self, weights: &[f64]) -> f64 {
        self.indices.iter().map(|&i| weights[i as usize]).sum()
    }
}

/// N-gram block followed by one bit per pattern of the entity, in code order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpace {
    pub entity: EntityLabel,
    pub config: FeatureConfig,
    pub vocab: Vocabulary,
    pub pattern_codes: Vec<String>,
}

impl FeatureSpace {
    /// `vocab` is ignored (replaced by an empty one) when n-grams are off.
    pub fn new(entity: EntityLabel, config: FeatureConfig, vocab: Vocabulary, catalog: &Catalog) -> Self {
        let vocab = if config.ngrams { vocab } else { Vocabulary::empty() };
        let pattern_codes =
            if config.patterns { catalog.patterns_for(entity).map(|p| p.code.clone()).collect() } else { Vec::new() };
        FeatureSpace { entity, config, vocab, pattern_codes }
    }

    pub fn dim(&self) -> usize {
        self.vocab.len() + self.pattern_codes.len()
    }

    /// Out-of-vocabulary grams and patterns missing from `catalog` are ignored.
    pub fn extract(&self, tokens: &[Token], catalog: &Catalog) -> FeatureVector {
        let mut indices = Vec::new();
        if self.config.ngrams {
            indices.extend(ngrams(tokens).iter().filter_map(|g| self.vocab.id(g)).map(|i| i as u32));
        }
        let offset = self.vocab.len();
        for (j, code) in self.pattern_codes.iter().enumerate() {
            if catalog.get(code).is_some_and(|p| catalog.match_pattern(p, tokens).is_some()) {
                indices.push((offset + j) as u32);
            }
        }
        FeatureVector::from_indices(indices)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::tokenize;
    use alloc::vec;

    const BOTH: FeatureConfig = FeatureConfig { ngrams: true, patterns: true };

    fn space(train: &[&str], config: FeatureConfig, entity: EntityLabel) -> FeatureSpace {
        let toks: Vec<Vec<Token>> = train.iter().map(|t| tokenize(t)).collect();
        let vocab = Vocabulary::build(toks.iter().map(Vec::as_slice)).unwrap();
        FeatureSpace::new(entity, config, vocab, &Catalog::builtin())
    }

    #[test]
    fn pattern_block_follows_vocab() {
        let s = space(&["check x"], BOTH, EntityLabel::Af);
        assert_eq!(s.pattern_codes, vec!["AFBC", "AFa", "AFr"]);
        assert_eq!(s.dim(), 3 + 3);
        let fv = s.extract(&tokenize("Add a bounds check in name_len()."), &Catalog::builtin());
        // "check" is in vocab (id 0); AFBC is pattern bit 0
        assert_eq!(fv.indices(), &[0, 3]);
    }

    #[test]
    fn hand_traced_sparse_vector() {
        // vocab: avoid, avoid the, avoid the overflow, overflow, the, the overflow
        let s = space(&["avoid the overflow"], BOTH, EntityLabel::Af);
        assert_eq!(s.vocab.len(), 6);
        let fv = s.extract(&tokenize("Avoid overflow."), &Catalog::builtin());
        // avoid=0, overflow=3, AFa bit = 6 + 1
        assert_eq!(fv.indices(), &[0, 3, 7]);
    }

    #[test]
    fn all_oov_and_no_match_is_zero() {
        let s = space(&["alpha beta"], BOTH, EntityLabel::Vt);
        assert_eq!(s.extract(&tokenize("gamma delta"), &Catalog::builtin()).nnz(), 0);
    }

    #[test]
    fn disabled_blocks() {
        let s = space(&["a b"], FeatureConfig { ngrams: false, patterns: true }, EntityLabel::Cp);
        assert_eq!(s.dim(), 3);
        let s = space(&["a b"], FeatureConfig { ngrams: true, patterns: false }, EntityLabel::Cp);
        assert_eq!(s.dim(), 3);
        assert!(s.pattern_codes.is_empty());
    }
}
