use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::token::{tokenize, Token, TokenKind};
use super::CatalogError;

/// A named term class. Terms are stored raw and as normalized token
/// sequences; a multi-word term matches consecutive tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    name: String,
    terms: Vec<String>,
    normalized: Vec<Vec<String>>,
}

impl Lexicon {
    pub fn new<S: AsRef<str>>(name: &str, terms: &[S]) -> Result<Self, CatalogError> {
        if name.is_empty() {
            return Err(CatalogError::EmptyLexicon(name.to_string()));
        }
        let mut raw: Vec<String> = Vec::new();
        let mut normalized: Vec<Vec<String>> = Vec::new();
        for term in terms {
            let term = term.as_ref().trim();
            let norms = normalize_phrase(term);
            if norms.is_empty() || normalized.contains(&norms) {
                continue;
            }
            raw.push(term.to_string());
            normalized.push(norms);
        }
        if normalized.is_empty() {
            return Err(CatalogError::EmptyLexicon(name.to_string()));
        }
        // longest phrases first so multi-word terms win over their prefixes
        let mut order: Vec<usize> = (0..normalized.len()).collect();
        order.sort_by(|&a, &b| normalized[b].len().cmp(&normalized[a].len()).then(a.cmp(&b)));
        let normalized = order.iter().map(|&i| normalized[i].clone()).collect();
        Ok(Lexicon { name: name.to_string(), terms: raw, normalized })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// Lengths of every term that matches the tokens starting at `start`,
    /// longest first.
    pub fn match_lengths(&self, tokens: &[Token], start: usize) -> Vec<usize> {
        let mut lens = Vec::new();
        for phrase in &self.normalized {
            if phrase_matches(phrase, tokens, start) && !lens.contains(&phrase.len()) {
                lens.push(phrase.len());
            }
        }
        lens
    }

    pub fn contains_norm(&self, norm: &str) -> bool {
        self.normalized.iter().any(|p| p.len() == 1 && p[0] == norm)
    }
}

fn phrase_matches(phrase: &[String], tokens: &[Token], start: usize) -> bool {
    let Some(window) = tokens.get(start..start + phrase.len()) else {
        return false;
    };
    window.iter().zip(phrase).all(|(t, p)| !t.is_punct() && t.norm == *p)
}

/// Token norms of a phrase with punctuation removed.
pub fn normalize_phrase(phrase: &str) -> Vec<String> {
    tokenize(phrase)
        .into_iter()
        .filter(|t| t.kind != TokenKind::Punct)
        .map(|t| t.norm)
        .collect()
}

pub type LexiconSet = BTreeMap<String, Lexicon>;

/// Built-in term classes. Several are supersets of the representative
/// terms named for the documented patterns; all can be replaced from a
/// pattern file by reusing the name.
pub const BUILTIN_LEXICONS: &[(&str, &[&str])] = &[
    ("bound_terms", &["bound", "bounds", "boundary", "boundaries"]),
    ("check_terms", &["check", "test", "validate", "validation", "verify", "ttest"]),
    (
        "negation",
        &[
            "not", "never", "fail", "fails", "failed", "missing", "lack", "lacks", "without", "didn't",
            "doesn't", "don't", "cannot", "can't", "neglect",
        ],
    ),
    ("modal_future", &["will", "would"]),
    ("removal_verbs", &["remove", "clean", "drop", "delete", "clear"]),
    ("avoid_verbs", &["avoid", "reject", "prevent", "disallow", "skip"]),
    ("adjust_verbs", &["adjust", "set", "reset", "clamp", "limit"]),
    ("overflow_terms", &["overflow", "over-read", "overread", "over-write", "overwrite", "overrun"]),
    (
        "nullptr_phrase",
        &["null pointer dereference", "null-pointer dereference", "NULL pointer dereference"],
    ),
    ("oob_terms", &["out-of-bounds", "oob"]),
    ("action_verbs", &["add", "use", "apply", "insert", "introduce", "make", "fix", "ensure"]),
    ("access_kinds", &["access", "read", "write"]),
    (
        "omitted_actions",
        &[
            "include", "check", "validate", "verify", "test", "initialize", "handle", "account", "consider",
            "reset", "clear", "free", "set", "update", "allocate", "ensure", "perform",
        ],
    ),
    (
        "fault_outcomes",
        &["cause", "result", "lead", "crash", "fail", "overflow", "underflow", "trigger", "corrupt"],
    ),
];

pub fn builtin_lexicons() -> LexiconSet {
    BUILTIN_LEXICONS
        .iter()
        .map(|(name, terms)| {
            let lex = Lexicon::new(name, terms).expect("built-in lexicon is valid");
            (name.to_string(), lex)
        })
        .collect()
}
