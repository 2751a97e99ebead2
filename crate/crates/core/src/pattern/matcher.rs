use alloc::string::String;
use alloc::vec::Vec;

use super::lexicon::{normalize_phrase, LexiconSet};
use super::token::{lemma_lite, tokenize, Token, TokenKind};
use super::{DiscoursePattern, PatternMatch, Slot, SlotSpan};

/// Tokens that may be skipped between adjacent slots without an explicit gap.
pub const IMPLICIT_GAP: usize = 4;

const ENTITY_WORDS: [&str; 5] = ["method", "variable", "pointer", "buffer", "function"];

enum Compiled<'a> {
    Lexicon(&'a super::Lexicon),
    Literal(Vec<Token>),
    EntityMention,
}

struct Step<'a> {
    slot_index: usize,
    matcher: Compiled<'a>,
    /// Tokens allowed between the previous step and this one.
    max_skip: usize,
}

/// Matches a pattern against a token list. Returns the leftmost match,
/// preferring the nearest candidate for each successive slot.
///
/// Patterns referencing a lexicon absent from `lexicons` never match;
/// catalogs reject such patterns at load time.
pub fn match_pattern(pattern: &DiscoursePattern, lexicons: &LexiconSet, tokens: &[Token]) -> Option<PatternMatch> {
    let steps = compile(pattern, lexicons)?;
    if steps.is_empty() || tokens.is_empty() {
        return None;
    }
    let entity_norms: Vec<String> = ENTITY_WORDS.iter().map(|w| lemma_lite(w)).collect();
    let ctx = Ctx { steps: &steps, tokens, entity_norms: &entity_norms };
    let mut spans = Vec::with_capacity(steps.len());
    for start in 0..tokens.len() {
        if ctx.search(0, start, &mut spans) {
            return Some(PatternMatch { pattern_code: pattern.code.clone(), entity: pattern.entity, spans });
        }
    }
    None
}

fn compile<'a>(pattern: &DiscoursePattern, lexicons: &'a LexiconSet) -> Option<Vec<Step<'a>>> {
    let mut steps = Vec::new();
    let mut explicit: Option<usize> = None;
    for (slot_index, slot) in pattern.slots.iter().enumerate() {
        let matcher = match slot {
            Slot::Gap(n) => {
                explicit = Some(explicit.unwrap_or(0) + n);
                continue;
            }
            Slot::Lexicon(name) => Compiled::Lexicon(lexicons.get(name)?),
            Slot::Literal(phrase) => {
                let toks: Vec<Token> = tokenize(phrase).into_iter().filter(|t| !t.is_punct()).collect();
                if toks.is_empty() {
                    return None;
                }
                debug_assert_eq!(toks.len(), normalize_phrase(phrase).len());
                Compiled::Literal(toks)
            }
            Slot::EntityMention => Compiled::EntityMention,
        };
        let max_skip = explicit.take().map_or(IMPLICIT_GAP, |n| n.max(IMPLICIT_GAP));
        steps.push(Step { slot_index, matcher, max_skip });
    }
    Some(steps)
}

struct Ctx<'a, 'b> {
    steps: &'b [Step<'a>],
    tokens: &'b [Token],
    entity_norms: &'b [String],
}

impl Ctx<'_, '_> {
    fn search(&self, step: usize, pos: usize, spans: &mut Vec<SlotSpan>) -> bool {
        for len in self.lengths_at(&self.steps[step].matcher, pos) {
            spans.push(SlotSpan { slot_index: self.steps[step].slot_index, token_start: pos, token_end: pos + len });
            if step + 1 == self.steps.len() {
                return true;
            }
            let next = pos + len;
            let last = (next + self.steps[step + 1].max_skip).min(self.tokens.len().saturating_sub(1));
            for p in next..=last {
                if p < self.tokens.len() && self.search(step + 1, p, spans) {
                    return true;
                }
            }
            spans.pop();
        }
        false
    }

    fn lengths_at(&self, matcher: &Compiled<'_>, pos: usize) -> Vec<usize> {
        let Some(tok) = self.tokens.get(pos) else { return Vec::new() };
        match matcher {
            Compiled::Lexicon(lex) => lex.match_lengths(self.tokens, pos),
            Compiled::Literal(lit) => {
                let Some(window) = self.tokens.get(pos..pos + lit.len()) else { return Vec::new() };
                let ok = window.iter().zip(lit).all(|(t, l)| {
                    if t.is_punct() {
                        false
                    } else if l.kind == TokenKind::CodeIdent || t.kind == TokenKind::CodeIdent {
                        t.surface == l.surface
                    } else {
                        t.norm == l.norm
                    }
                });
                if ok {
                    alloc::vec![lit.len()]
                } else {
                    Vec::new()
                }
            }
            Compiled::EntityMention => {
                let hit = tok.kind == TokenKind::CodeIdent
                    || (tok.kind == TokenKind::Word && self.entity_norms.contains(&tok.norm));
                if hit {
                    alloc::vec![1]
                } else {
                    Vec::new()
                }
            }
        }
    }
}
