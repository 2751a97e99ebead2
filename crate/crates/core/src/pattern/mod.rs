//! Discourse-pattern DSL, lexicons, tokenizer and matcher.
//!
//! A [`DiscoursePattern`] is an ordered list of [`Slot`]s. Slots match
//! left to right; between two adjacent non-gap slots up to
//! [`IMPLICIT_GAP`] tokens may be skipped, and explicit gap slots widen
//! that allowance (never narrow it).

mod builtin;
mod catalog;
mod lexicon;
mod matcher;
pub mod token;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::EntityLabel;

pub use builtin::{builtin_patterns, BUILTIN_CODES};
pub use catalog::Catalog;
pub use lexicon::{builtin_lexicons, normalize_phrase, Lexicon, LexiconSet, BUILTIN_LEXICONS};
pub use matcher::{match_pattern, IMPLICIT_GAP};
pub use token::{lemma_lite, tokenize, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("lexicon `{0}` is empty")]
    EmptyLexicon(String),
    #[error("duplicate lexicon `{0}`")]
    DuplicateLexicon(String),
    #[error("pattern `{code}` references unknown lexicon `{lexicon}`")]
    UnknownLexicon { code: String, lexicon: String },
    #[error("duplicate pattern code `{0}`")]
    DuplicateCode(String),
    #[error("pattern `{0}` has no slots")]
    EmptySlots(String),
    #[error("pattern `{0}` starts or ends with a gap slot")]
    GapAtEdge(String),
    #[error("pattern `{0}` has an empty literal")]
    EmptyLiteral(String),
    #[error("pattern with empty code")]
    EmptyCode,
    #[error("slot kind `{kind}` is missing `{field}`")]
    MissingSlotField { kind: String, field: &'static str },
    #[error("unknown slot kind `{0}`")]
    UnknownSlotKind(String),
}

/// One position in a pattern rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SlotSpec", into = "SlotSpec")]
pub enum Slot {
    /// Any term of the named lexicon, compared on token norms.
    Lexicon(String),
    /// A fixed word or phrase; code identifiers compare case-sensitively.
    Literal(String),
    /// A code identifier or one of the words method/variable/pointer/buffer/function.
    EntityMention,
    /// Allows up to this many skipped tokens before the next slot.
    Gap(usize),
}

/// Wire form of a slot in pattern files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_tokens: Option<usize>,
}

impl TryFrom<SlotSpec> for Slot {
    type Error = CatalogError;

    fn try_from(spec: SlotSpec) -> Result<Self, Self::Error> {
        let missing = |field| CatalogError::MissingSlotField { kind: spec.kind.clone(), field };
        match spec.kind.as_str() {
            "lexicon" => spec.value.clone().map(Slot::Lexicon).ok_or_else(|| missing("value")),
            "literal" => spec.value.clone().map(Slot::Literal).ok_or_else(|| missing("value")),
            "entity_mention" => Ok(Slot::EntityMention),
            "gap" => spec.max_tokens.map(Slot::Gap).ok_or_else(|| missing("max_tokens")),
            other => Err(CatalogError::UnknownSlotKind(other.into())),
        }
    }
}

impl From<Slot> for SlotSpec {
    fn from(slot: Slot) -> Self {
        let (kind, value, max_tokens) = match slot {
            Slot::Lexicon(name) => ("lexicon", Some(name), None),
            Slot::Literal(phrase) => ("literal", Some(phrase), None),
            Slot::EntityMention => ("entity_mention", None, None),
            Slot::Gap(n) => ("gap", None, Some(n)),
        };
        SlotSpec { kind: kind.into(), value, max_tokens }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscoursePattern {
    pub code: String,
    pub entity: EntityLabel,
    pub slots: Vec<Slot>,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub example: String,
}

impl DiscoursePattern {
    /// Structural checks that do not need the lexicon set.
    pub fn validate_shape(&self) -> Result<(), CatalogError> {
        if self.code.is_empty() {
            return Err(CatalogError::EmptyCode);
        }
        let (Some(first), Some(last)) = (self.slots.first(), self.slots.last()) else {
            return Err(CatalogError::EmptySlots(self.code.clone()));
        };
        if matches!(first, Slot::Gap(_)) || matches!(last, Slot::Gap(_)) {
            return Err(CatalogError::GapAtEdge(self.code.clone()));
        }
        for slot in &self.slots {
            if let Slot::Literal(phrase) = slot {
                if normalize_phrase(phrase).is_empty() {
                    return Err(CatalogError::EmptyLiteral(self.code.clone()));
                }
            }
        }
        Ok(())
    }
}

/// Token span covered by one non-gap slot; `end` is exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotSpan {
    pub slot_index: usize,
    pub token_start: usize,
    pub token_end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternMatch {
    pub pattern_code: String,
    pub entity: EntityLabel,
    pub spans: Vec<SlotSpan>,
}
