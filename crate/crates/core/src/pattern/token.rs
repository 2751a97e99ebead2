//! Sentence tokenizer with code-identifier awareness and lemma-lite
//! normalization.
//!
//! Text is first cut on whitespace. Each chunk sheds leading and trailing
//! punctuation, then splits on characters that cannot appear inside an
//! identifier. A trailing `()` call suffix stays attached to its name, so
//! `isoclns_print()` is a single token.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Word,
    CodeIdent,
    Number,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// Lowercased; word tokens are additionally lemma-lite stemmed.
    pub norm: String,
    pub kind: TokenKind,
}

impl Token {
    fn new(surface: &str, kind: TokenKind) -> Self {
        let norm = match kind {
            TokenKind::Word => lemma_lite(&surface.to_lowercase()),
            TokenKind::CodeIdent => surface.to_lowercase(),
            TokenKind::Number | TokenKind::Punct => surface.to_string(),
        };
        Token { surface: surface.to_string(), norm, kind }
    }

    fn punct(c: char) -> Self {
        let mut buf = [0u8; 4];
        Token::new(c.encode_utf8(&mut buf), TokenKind::Punct)
    }

    pub fn is_punct(&self) -> bool {
        self.kind == TokenKind::Punct
    }
}

/// Abbreviations that keep their dots and never end a sentence.
pub const ABBREVIATIONS: [&str; 4] = ["e.g.", "i.e.", "etc.", "vs."];

pub fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        tokenize_chunk(chunk, &mut out);
    }
    out
}

fn is_wordish(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn tokenize_chunk(chunk: &str, out: &mut Vec<Token>) {
    let mut rest = chunk;

    // leading punctuation
    while let Some(c) = rest.chars().next() {
        if is_wordish(c) {
            break;
        }
        out.push(Token::punct(c));
        rest = &rest[c.len_utf8()..];
    }
    if rest.is_empty() {
        return;
    }

    if let Some(abbr) = leading_abbreviation(rest) {
        out.push(Token::new(&rest[..abbr], TokenKind::Word));
        for c in rest[abbr..].chars() {
            out.push(Token::punct(c));
        }
        return;
    }

    // trailing punctuation, keeping a `name()` call suffix
    let mut trailing = Vec::new();
    while let Some(c) = rest.chars().next_back() {
        if is_wordish(c) {
            break;
        }
        if rest.ends_with("()") && rest.len() > 2 {
            let before = rest[..rest.len() - 2].chars().next_back();
            if before.is_some_and(is_wordish) {
                break;
            }
        }
        if c == ')' && is_call_form(rest) {
            break;
        }
        trailing.push(c);
        rest = &rest[..rest.len() - c.len_utf8()];
    }

    if !rest.is_empty() {
        split_core(rest, out);
    }
    for c in trailing.into_iter().rev() {
        out.push(Token::punct(c));
    }
}

fn leading_abbreviation(s: &str) -> Option<usize> {
    let lower = s.to_lowercase();
    ABBREVIATIONS.iter().find_map(|abbr| {
        let tail_is_punct = lower
            .strip_prefix(abbr)
            .is_some_and(|tail| tail.chars().all(|c| !is_wordish(c)));
        tail_is_punct.then_some(abbr.len())
    })
}

/// `name(args)` with an identifier-ish name and no nested parentheses.
fn is_call_form(s: &str) -> bool {
    let Some(open) = s.find('(') else { return false };
    if open == 0 || !s.ends_with(')') {
        return false;
    }
    let name = &s[..open];
    let args = &s[open + 1..s.len() - 1];
    name.chars().all(|c| is_wordish(c) || matches!(c, '.' | ':' | '-' | '>'))
        && name.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && !args.contains('(')
        && !args.contains(')')
}

fn split_core(core: &str, out: &mut Vec<Token>) {
    if is_call_form(core) {
        out.push(Token::new(core, TokenKind::CodeIdent));
        return;
    }
    let path_like = core.contains('.') || core.contains('_');
    let inner = |c: char| is_wordish(c) || matches!(c, '.' | ':' | '-' | '\'') || (c == '/' && path_like);

    let mut start = None;
    for (i, c) in core.char_indices() {
        if inner(c) {
            start.get_or_insert(i);
            continue;
        }
        if let Some(s) = start.take() {
            push_run(&core[s..i], out);
        }
        out.push(Token::punct(c));
    }
    if let Some(s) = start {
        push_run(&core[s..], out);
    }
}

/// Emits one identifier run, trimming separators that cannot end a token.
fn push_run(run: &str, out: &mut Vec<Token>) {
    let edge = |c: char| matches!(c, '.' | ':' | '-' | '\'' | '/');
    let trimmed_start = run.trim_start_matches(edge);
    for c in run[..run.len() - trimmed_start.len()].chars() {
        out.push(Token::punct(c));
    }
    let body = trimmed_start.trim_end_matches(edge);
    let tail = &trimmed_start[body.len()..];
    if !body.is_empty() {
        out.push(Token::new(body, classify(body)));
    }
    for c in tail.chars() {
        out.push(Token::punct(c));
    }
}

fn classify(s: &str) -> TokenKind {
    let first = s.chars().next().unwrap_or(' ');
    if first.is_ascii_digit() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '.') {
        return TokenKind::Number;
    }
    if is_code_ident(s) {
        TokenKind::CodeIdent
    } else {
        TokenKind::Word
    }
}

fn is_code_ident(s: &str) -> bool {
    if s.contains(['(', '_', ':', '.', '/']) {
        return true;
    }
    // camelCase: a lowercase letter immediately followed by an uppercase one
    let chars: Vec<char> = s.chars().collect();
    chars.windows(2).any(|w| w[0].is_lowercase() && w[1].is_uppercase())
}

const EXCEPTIONS: &[(&str, &str)] = &[
    ("does", "do"),
    ("did", "do"),
    ("done", "do"),
    ("doing", "do"),
    ("has", "have"),
    ("had", "have"),
    ("having", "have"),
    ("is", "be"),
    ("was", "be"),
    ("were", "be"),
    ("are", "be"),
    ("been", "be"),
    ("used", "use"),
    ("uses", "use"),
    ("using", "use"),
    ("made", "make"),
    ("making", "make"),
    ("makes", "make"),
    ("freed", "free"),
    ("frees", "free"),
    ("freeing", "free"),
    ("led", "lead"),
    ("read", "read"),
    ("need", "need"),
    ("bytes", "byte"),
    ("always", "always"),
    ("this", "this"),
    ("its", "its"),
    ("thus", "thus"),
];

/// Suffix-stripping normalizer for lowercase words.
///
/// Strips plural `-s`/`-es`/`-ies`, `-ed` and `-ing`, undoubles a final
/// consonant pair left behind by `-ed`/`-ing`, and drops a silent final `e`
/// from words longer than four letters so `remove`, `removes`, `removed`
/// and `removing` share one form. Hyphenated compounds are kept as-is.
pub fn lemma_lite(word: &str) -> String {
    if let Some((_, lemma)) = EXCEPTIONS.iter().find(|(w, _)| *w == word) {
        return (*lemma).to_string();
    }
    if word.contains('-') || word.contains('\'') || !word.chars().all(|c| c.is_alphabetic()) {
        return word.to_string();
    }
    let stem = strip_suffix(word);
    drop_silent_e(&stem)
}

fn strip_suffix(word: &str) -> String {
    let n = word.chars().count();
    let keep = |stem: &str| stem.chars().count() >= 3;

    if n > 4 {
        if let Some(stem) = word.strip_suffix("ies") {
            return [stem, "y"].concat();
        }
        if let Some(stem) = word.strip_suffix("ied") {
            return [stem, "y"].concat();
        }
    }
    if let Some(stem) = word.strip_suffix("sses") {
        return [stem, "ss"].concat();
    }
    if n > 5 {
        if let Some(stem) = word.strip_suffix("ing") {
            if keep(stem) {
                return undouble(stem);
            }
        }
    }
    if n > 4 {
        if let Some(stem) = word.strip_suffix("ed") {
            if keep(stem) {
                return undouble(stem);
            }
        }
    }
    if n > 3 {
        if let Some(stem) = word.strip_suffix("es") {
            if ["x", "ch", "sh", "ss", "z"].iter().any(|e| stem.ends_with(e)) && keep(stem) {
                return stem.to_string();
            }
        }
        if word.ends_with('s') && !["ss", "us", "is"].iter().any(|e| word.ends_with(e)) {
            let stem = &word[..word.len() - 1];
            if keep(stem) {
                return stem.to_string();
            }
        }
    }
    word.to_string()
}

fn undouble(stem: &str) -> String {
    let b = stem.as_bytes();
    if b.len() >= 2 && b[b.len() - 1] == b[b.len() - 2] && b"bgmnprt".contains(&b[b.len() - 1]) {
        return stem[..stem.len() - 1].to_string();
    }
    stem.to_string()
}

fn drop_silent_e(stem: &str) -> String {
    if stem.chars().count() > 4 && stem.ends_with('e') && !stem.ends_with("ee") {
        return stem[..stem.len() - 1].to_string();
    }
    stem.to_string()
}
