use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::ExtractError;
use crate::fingerprint::Fingerprint;
use crate::pattern::Token;

pub const MAX_NGRAM: usize = 3;

/// Distinct 1- to 3-grams over the norms of non-punctuation tokens,
/// joined with a single space.
pub fn ngrams(tokens: &[Token]) -> BTreeSet<String> {
    let norms: Vec<&str> = tokens.iter().filter(|t| !t.is_punct()).map(|t| t.norm.as_str()).collect();
    let mut out = BTreeSet::new();
    for n in 1..=MAX_NGRAM {
        for window in norms.windows(n) {
            out.insert(window.join(" "));
        }
    }
    out
}

/// N-gram vocabulary with ids in lexicographic order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    grams: Vec<String>,
}

impl Vocabulary {
    pub fn build<'a, I>(sentences: I) -> Result<Self, ExtractError>
    where
        I: IntoIterator<Item = &'a [Token]>,
    {
        let mut grams = BTreeSet::new();
        let mut any = false;
        for tokens in sentences {
            any = true;
            grams.extend(ngrams(tokens));
        }
        if !any {
            return Err(ExtractError::EmptyTrainingSet);
        }
        Ok(Vocabulary { grams: grams.into_iter().collect() })
    }

    pub fn empty() -> Self {
        Vocabulary::default()
    }

    pub fn len(&self) -> usize {
        self.grams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grams.is_empty()
    }

    pub fn id(&self, gram: &str) -> Option<usize> {
        self.grams.binary_search_by(|g| g.as_str().cmp(gram)).ok()
    }

    pub fn grams(&self) -> &[String] {
        &self.grams
    }

    pub fn fingerprint(&self) -> u64 {
        let mut fp = Fingerprint::new();
        for g in &self.grams {
            fp.write_str(g);
        }
        fp.finish()
    }
}

impl TryFrom<Vec<String>> for Vocabulary {
    type Error = &'static str;

    fn try_from(grams: Vec<String>) -> Result<Self, Self::Error> {
        if grams.windows(2).any(|w| w[0] >= w[1]) {
            return Err("vocabulary must be strictly sorted");
        }
        Ok(Vocabulary { grams })
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.grams
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::tokenize;
    use alloc::vec;

    fn vocab(texts: &[&str]) -> Vocabulary {
        let toks: Vec<Vec<Token>> = texts.iter().map(|t| tokenize(t)).collect();
        Vocabulary::build(toks.iter().map(Vec::as_slice)).unwrap()
    }

    #[test]
    fn two_words() {
        let v = vocab(&["a b"]);
        assert_eq!(v.grams(), &["a", "a b", "b"]);
    }

    #[test]
    fn afbc_example_hand_count() {
        // add a bound check in name_len(): 6 unigrams, 5 bigrams, 4 trigrams
        let v = vocab(&["Add a bounds check in name_len()."]);
        assert_eq!(v.len(), 15);
        assert!(v.id("bound check in").is_some());
        assert!(v.id(".").is_none());
    }

    #[test]
    fn set_semantics_and_ordering() {
        assert_eq!(vocab(&["x y z", "x y z"]), vocab(&["x y z"]));
        let v = vocab(&["b a", "c"]);
        assert_eq!(v.grams(), &["a", "b", "b a", "c"]);
        assert_eq!(v.id("b a"), Some(2));
    }

    #[test]
    fn empty_training_set() {
        assert_eq!(Vocabulary::build(vec![]), Err(ExtractError::EmptyTrainingSet));
    }

    #[test]
    fn unsorted_list_rejected() {
        assert!(Vocabulary::try_from(vec!["b".into(), "a".into()]).is_err());
        assert_ne!(vocab(&["a"]).fingerprint(), vocab(&["b"]).fingerprint());
    }
}
