//! Unified diff parsing with hunk line-number accounting.
//!
//! Lines outside hunks (`diff --git`, `index`, mode lines, patch
//! preambles) are ignored. Inside a hunk, lines are consumed until the
//! old and new counts from the `@@` header are exhausted, so a removed
//! line whose text starts with `-- ` is never mistaken for a file header.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::{ChangeKind, ParseEnumError, Side};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("diff line {line}: {kind}")]
pub struct DiffError {
    /// 1-based line number in the diff text.
    pub line: usize,
    pub kind: DiffErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffErrorKind {
    #[error("malformed hunk header `{0}`")]
    MalformedHeader(String),
    #[error("hunk before any file header")]
    HunkOutsideFile,
    #[error("hunk body does not match header counts (expected {expected_old} old / {expected_new} new lines, {detail})")]
    CountMismatch { expected_old: u32, expected_new: u32, detail: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeDiff {
    pub files: Vec<FileDiff>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDiff {
    pub old_path: String,
    pub new_path: String,
    pub hunks: Vec<Hunk>,
}

pub const DEV_NULL: &str = "/dev/null";

impl FileDiff {
    /// Path used in line keys: the new path, or the old one for deletions.
    pub fn path(&self) -> &str {
        if self.new_path == DEV_NULL {
            &self.old_path
        } else {
            &self.new_path
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hunk {
    pub old_start: u32,
    pub old_count: u32,
    pub new_start: u32,
    pub new_count: u32,
    pub lines: Vec<HunkLine>,
}

impl Hunk {
    /// |removed| + |context| == old_count and |added| + |context| == new_count.
    pub fn reconciles(&self) -> bool {
        let count = |k: ChangeKind| self.lines.iter().filter(|l| l.change == k).count() as u32;
        let ctx = count(ChangeKind::Context);
        count(ChangeKind::Removed) + ctx == self.old_count && count(ChangeKind::Added) + ctx == self.new_count
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HunkLine {
    pub change: ChangeKind,
    /// Text after the one-character marker, untrimmed.
    pub text: String,
    pub old_line: Option<u32>,
    pub new_line: Option<u32>,
}

/// Identity of one side of one diff line: `file|side|line_no`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LineKey {
    pub file: String,
    pub side: Side,
    pub line_no: u32,
}

impl LineKey {
    pub fn new(file: impl Into<String>, side: Side, line_no: u32) -> Self {
        LineKey { file: file.into(), side, line_no }
    }
}

impl fmt::Display for LineKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}|{}", self.file, self.side, self.line_no)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseLineKeyError {
    #[error("line key `{0}` is not `file|side|line_no`")]
    Shape(String),
    #[error(transparent)]
    Side(#[from] ParseEnumError),
}

impl FromStr for LineKey {
    type Err = ParseLineKeyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.rsplitn(3, '|');
        let (Some(line), Some(side), Some(file)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(ParseLineKeyError::Shape(s.into()));
        };
        let line_no = line.parse::<u32>().map_err(|_| ParseLineKeyError::Shape(s.into()))?;
        if file.is_empty() || line_no == 0 {
            return Err(ParseLineKeyError::Shape(s.into()));
        }
        Ok(LineKey { file: file.into(), side: side.parse()?, line_no })
    }
}

/// One side of a diff line, materialized. Context lines appear twice,
/// once per side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeLine {
    pub file: String,
    pub side: Side,
    pub line_no: u32,
    /// Line text with surrounding whitespace trimmed.
    pub content: String,
    pub change: ChangeKind,
}

impl CodeLine {
    pub fn key(&self) -> LineKey {
        LineKey { file: self.file.clone(), side: self.side, line_no: self.line_no }
    }
}

impl CodeDiff {
    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    pub fn code_lines(&self) -> Vec<CodeLine> {
        let mut out = Vec::new();
        for file in &self.files {
            for hunk in &file.hunks {
                for line in &hunk.lines {
                    let content = line.text.trim().to_string();
                    let mut emit = |side, no: Option<u32>| {
                        if let Some(line_no) = no {
                            out.push(CodeLine {
                                file: file.path().to_string(),
                                side,
                                line_no,
                                content: content.clone(),
                                change: line.change,
                            });
                        }
                    };
                    match line.change {
                        ChangeKind::Removed => emit(Side::Old, line.old_line),
                        ChangeKind::Added => emit(Side::New, line.new_line),
                        ChangeKind::Context => {
                            emit(Side::Old, line.old_line);
                            emit(Side::New, line.new_line);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn find_line(&self, key: &LineKey) -> Option<CodeLine> {
        self.code_lines().into_iter().find(|l| l.key() == *key)
    }
}

fn parse_path(raw: &str) -> String {
    let raw = raw.split('\t').next().unwrap_or("").trim_end();
    let raw = raw.strip_prefix('"').and_then(|r| r.strip_suffix('"')).unwrap_or(raw);
    if raw == DEV_NULL {
        return raw.to_string();
    }
    raw.strip_prefix("a/").or_else(|| raw.strip_prefix("b/")).unwrap_or(raw).to_string()
}

fn parse_range(s: &str) -> Option<(u32, u32)> {
    match s.split_once(',') {
        Some((start, count)) => Some((start.parse().ok()?, count.parse().ok()?)),
        None => Some((s.parse().ok()?, 1)),
    }
}

fn parse_header(line: &str) -> Option<(u32, u32, u32, u32)> {
    let rest = line.strip_prefix("@@ ")?;
    let (ranges, _section) = rest.split_once(" @@")?;
    let (old, new) = ranges.split_once(' ')?;
    let (old_start, old_count) = parse_range(old.strip_prefix('-')?)?;
    let (new_start, new_count) = parse_range(new.strip_prefix('+')?)?;
    Some((old_start, old_count, new_start, new_count))
}

pub fn parse_unified_diff(text: &str) -> Result<CodeDiff, DiffError> {
    let lines: Vec<&str> = text.lines().collect();
    let mut files: Vec<FileDiff> = Vec::new();
    let mut i = 0;
    let mut after_hunk = false;

    while i < lines.len() {
        let line = lines[i];
        if line.starts_with("--- ") && lines.get(i + 1).is_some_and(|next| next.starts_with("+++ ")) {
            files.push(FileDiff {
                old_path: parse_path(&line[4..]),
                new_path: parse_path(&lines[i + 1][4..]),
                hunks: Vec::new(),
            });
            i += 2;
            after_hunk = false;
            continue;
        }
        if line.starts_with("@@") {
            let Some(file) = files.last_mut() else {
                return Err(DiffError { line: i + 1, kind: DiffErrorKind::HunkOutsideFile });
            };
            let (hunk, next) = parse_hunk(&lines, i)?;
            file.hunks.push(hunk);
            i = next;
            after_hunk = true;
            continue;
        }
        if after_hunk {
            // format-patch signature ends the patch
            if line == "-- " {
                break;
            }
            if line.starts_with(['+', '-', ' ']) {
                let header = parse_header(lines[..i].iter().rev().find(|l| l.starts_with("@@")).unwrap_or(&""));
                let (_, old_count, _, new_count) = header.unwrap_or_default();
                return Err(DiffError {
                    line: i + 1,
                    kind: DiffErrorKind::CountMismatch {
                        expected_old: old_count,
                        expected_new: new_count,
                        detail: "hunk body has extra lines".into(),
                    },
                });
            }
        }
        after_hunk = false;
        i += 1;
    }
    Ok(CodeDiff { files })
}

fn parse_hunk(lines: &[&str], at: usize) -> Result<(Hunk, usize), DiffError> {
    let header = lines[at];
    let (old_start, old_count, new_start, new_count) = parse_header(header)
        .ok_or_else(|| DiffError { line: at + 1, kind: DiffErrorKind::MalformedHeader(header.to_string()) })?;
    let mismatch = |line: usize, detail: String| DiffError {
        line,
        kind: DiffErrorKind::CountMismatch { expected_old: old_count, expected_new: new_count, detail },
    };

    let (mut old_left, mut new_left) = (old_count, new_count);
    let (mut old_no, mut new_no) = (old_start, new_start);
    let mut body = Vec::new();
    let mut i = at + 1;
    while old_left > 0 || new_left > 0 {
        let Some(&line) = lines.get(i) else {
            return Err(mismatch(i, format!("diff ended with {old_left} old / {new_left} new lines missing")));
        };
        if line.starts_with('\\') {
            i += 1;
            continue;
        }
        let (change, text) = match line.chars().next() {
            None => (ChangeKind::Context, ""),
            Some(' ') => (ChangeKind::Context, &line[1..]),
            Some('-') => (ChangeKind::Removed, &line[1..]),
            Some('+') => (ChangeKind::Added, &line[1..]),
            Some(_) => {
                return Err(mismatch(i + 1, format!("unexpected line with {old_left} old / {new_left} new lines missing")));
            }
        };
        let (old_line, new_line) = match change {
            ChangeKind::Context if old_left > 0 && new_left > 0 => {
                old_left -= 1;
                new_left -= 1;
                (Some(old_no), Some(new_no))
            }
            ChangeKind::Removed if old_left > 0 => {
                old_left -= 1;
                (Some(old_no), None)
            }
            ChangeKind::Added if new_left > 0 => {
                new_left -= 1;
                (None, Some(new_no))
            }
            _ => return Err(mismatch(i + 1, format!("{change} line exceeds the header count"))),
        };
        if old_line.is_some() {
            old_no += 1;
        }
        if new_line.is_some() {
            new_no += 1;
        }
        body.push(HunkLine { change, text: text.to_string(), old_line, new_line });
        i += 1;
    }
    while lines.get(i).is_some_and(|l| l.starts_with('\\')) {
        i += 1;
    }
    Ok((Hunk { old_start, old_count, new_start, new_count, lines: body }, i))
}
