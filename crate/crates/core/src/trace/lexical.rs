//! Okapi BM25 over the candidate pool.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::scorer::{Scorer, ScorerError};
use crate::pattern::{lemma_lite, tokenize, TokenKind};

pub const K1: f64 = 1.2;
pub const B: f64 = 0.75;

fn split_camel(part: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = part.chars().collect();
    let mut start = 0;
    for i in 1..chars.len() {
        let prev = chars[i - 1];
        let cur = chars[i];
        let next_lower = chars.get(i + 1).is_some_and(|c| c.is_lowercase());
        if (prev.is_lowercase() && cur.is_uppercase()) || (prev.is_uppercase() && cur.is_uppercase() && next_lower) {
            out.push(chars[start..i].iter().collect());
            start = i;
        }
    }
    out.push(chars[start..].iter().collect());
}

/// Sub-tokens of a code identifier: split on `_ : . ( ) - /` and camelCase.
pub fn identifier_parts(ident: &str) -> Vec<String> {
    let mut raw = Vec::new();
    for part in ident.split(['_', ':', '.', '(', ')', '-', '/']).filter(|p| !p.is_empty()) {
        split_camel(part, &mut raw);
    }
    raw.into_iter().map(|p| lemma_lite(&p.to_lowercase())).filter(|p| !p.is_empty()).collect()
}

/// Index terms of a text, with repetition.
///
/// Words contribute their norm (and the parts of hyphenated words), numbers
/// their text, and code identifiers both the whole identifier and its parts.
pub fn index_terms(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for tok in tokenize(text) {
        match tok.kind {
            TokenKind::Punct => {}
            TokenKind::Number => out.push(tok.norm),
            TokenKind::Word => {
                if tok.norm.contains('-') {
                    out.extend(tok.norm.split('-').filter(|p| !p.is_empty()).map(lemma_lite));
                }
                out.push(tok.norm);
            }
            TokenKind::CodeIdent => {
                let whole = tok.norm.split('(').next().unwrap_or_default().to_string();
                let parts = identifier_parts(&tok.surface);
                if !whole.is_empty() {
                    out.push(whole);
                }
                if parts.len() > 1 {
                    out.extend(parts);
                }
            }
        }
    }
    out
}

/// BM25 with the pool itself as the document collection.
#[derive(Debug, Clone, Copy, Default)]
pub struct LexicalScorer;

impl LexicalScorer {
    pub fn bm25(query: &str, candidates: &[&str]) -> Vec<f64> {
        let docs: Vec<BTreeMap<String, usize>> = candidates
            .iter()
            .map(|c| {
                let mut tf = BTreeMap::new();
                for t in index_terms(c) {
                    *tf.entry(t).or_insert(0) += 1;
                }
                tf
            })
            .collect();
        let lens: Vec<f64> = docs.iter().map(|d| d.values().sum::<usize>() as f64).collect();
        let n = docs.len() as f64;
        let avgdl = if n > 0.0 { lens.iter().sum::<f64>() / n } else { 0.0 };
        let query: BTreeSet<String> = index_terms(query).into_iter().collect();
        let idf: Vec<(String, f64)> = query
            .into_iter()
            .map(|t| {
                let df = docs.iter().filter(|d| d.contains_key(&t)).count() as f64;
                let idf = libm::log(1.0 + (n - df + 0.5) / (df + 0.5));
                (t, idf)
            })
            .collect();
        docs.iter()
            .zip(&lens)
            .map(|(doc, &dl)| {
                let norm = if avgdl > 0.0 { 1.0 - B + B * dl / avgdl } else { 1.0 };
                idf.iter()
                    .filter_map(|(t, idf)| doc.get(t).map(|&tf| (tf as f64, idf)))
                    .map(|(tf, idf)| idf * tf * (K1 + 1.0) / (tf + K1 * norm))
                    .fold(0.0, |acc, s| acc + s)
            })
            .collect()
    }
}

impl Scorer for LexicalScorer {
    fn name(&self) -> &str {
        "lexical"
    }

    fn score_pool(&self, query: &str, candidates: &[&str]) -> Result<Vec<f64>, ScorerError> {
        Ok(Self::bm25(query, candidates))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn unmatched_candidate_scores_positive_zero() {
        let s = LexicalScorer::bm25("bounds check", &["return 0;"]);
        assert!(s[0] == 0.0 && s[0].is_sign_positive());
    }

    #[test]
    fn identifier_splitting() {
        assert_eq!(identifier_parts("name_len()"), vec!["name", "len"]);
        assert_eq!(identifier_parts("ND_TCHECK2"), vec!["nd", "tcheck2"]);
        assert_eq!(identifier_parts("bgpAttrPrint"), vec!["bgp", "attr", "print"]);
        assert_eq!(identifier_parts("HTTPServer::parseURL"), vec!["http", "server", "pars", "url"]);
        assert_eq!(identifier_parts("print-bgp.c:decode"), vec!["print", "bgp", "c", "decod"]);
    }

    #[test]
    fn index_terms_keep_whole_and_parts() {
        assert_eq!(index_terms("in name_len()."), vec!["in", "name_len", "name", "len"]);
        assert_eq!(index_terms("ND_TCHECK2(*s, 1);"), vec!["nd_tcheck2", "nd", "tcheck2", "s", "1"]);
        assert_eq!(index_terms("over-read"), vec!["over", "read", "over-read"]);
        assert_eq!(index_terms("len"), vec!["len"]);
    }

    /// Independent BM25 over precomputed term lists.
    fn oracle(q: &[&str], docs: &[Vec<&str>]) -> Vec<f64> {
        let n = docs.len() as f64;
        let avg = docs.iter().map(|d| d.len()).sum::<usize>() as f64 / n;
        let mut q: Vec<&str> = q.to_vec();
        q.sort();
        q.dedup();
        docs.iter()
            .map(|d| {
                let mut s = 0.0;
                for t in &q {
                    let df = docs.iter().filter(|d| d.contains(t)).count() as f64;
                    let tf = d.iter().filter(|x| *x == t).count() as f64;
                    let idf = ((n - df + 0.5) / (df + 0.5) + 1.0).ln();
                    s += idf * tf * 2.2 / (tf + 1.2 * (0.25 + 0.75 * d.len() as f64 / avg));
                }
                s
            })
            .collect()
    }

    #[test]
    fn fig2_style_pool_hand_computation() {
        let q = "Add a bounds check in name_len().";
        let pool = ["s += (*s) + 1;", "ND_TCHECK2(*s, 1);", "return(PTR_DIFF(s, s0) + 1);", "max_len = name_len(s);"];
        let got = LexicalScorer::bm25(q, &pool);
        let docs = vec![
            vec!["s", "s", "1"],
            vec!["nd_tcheck2", "nd", "tcheck2", "s", "1"],
            vec!["return", "ptr_diff", "ptr", "diff", "s", "s0", "1"],
            vec!["max_len", "max", "len", "name_len", "name", "len", "s"],
        ];
        let want = oracle(&["add", "a", "bound", "check", "in", "name_len", "name", "len"], &docs);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12, "{got:?} vs {want:?}");
        }
        assert_eq!(&got[..3], &[0.0, 0.0, 0.0]);
        assert!(got[3] > 0.0);
    }

    #[test]
    fn no_overlap_all_zero_and_self_is_max() {
        assert_eq!(LexicalScorer::bm25("zzz", &["a", "b c"]), vec![0.0, 0.0]);
        let pool = ["free(buf);", "len = 0;", "check_len(buf, len);"];
        let s = LexicalScorer::bm25("check_len(buf, len);", &pool);
        assert!(s[2] > s[0] && s[2] > s[1]);
        assert!(LexicalScorer::bm25("x", &[]).is_empty());
    }
}
