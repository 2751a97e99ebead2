//! Small enums shared across the pipeline.

use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The three sentence semantics the extractor looks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EntityLabel {
    /// Vulnerability trigger: the origin of the bug in pre-fix code.
    #[serde(rename = "VT")]
    Vt,
    /// After-fix: how the code was changed to fix the bug.
    #[serde(rename = "AF")]
    Af,
    /// Crash phenomenon: the crash class the bug causes.
    #[serde(rename = "CP")]
    Cp,
}

impl EntityLabel {
    pub const ALL: [EntityLabel; 3] = [EntityLabel::Vt, EntityLabel::Af, EntityLabel::Cp];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityLabel::Vt => "VT",
            EntityLabel::Af => "AF",
            EntityLabel::Cp => "CP",
        }
    }
}

impl fmt::Display for EntityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {what} `{value}`")]
pub struct ParseEnumError {
    pub what: &'static str,
    pub value: alloc::string::String,
}

impl ParseEnumError {
    fn new(what: &'static str, value: &str) -> Self {
        Self { what, value: value.into() }
    }
}

impl FromStr for EntityLabel {
    type Err = ParseEnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "VT" | "vt" => Ok(EntityLabel::Vt),
            "AF" | "af" => Ok(EntityLabel::Af),
            "CP" | "cp" => Ok(EntityLabel::Cp),
            _ => Err(ParseEnumError::new("entity label", s)),
        }
    }
}

/// Source of a natural-language artifact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtifactKind {
    CveSummary,
    BugReport,
    CommitMessage,
}

impl ArtifactKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ArtifactKind::CveSummary => "cve_summary",
            ArtifactKind::BugReport => "bug_report",
            ArtifactKind::CommitMessage => "commit_message",
        }
    }
}

impl fmt::Display for ArtifactKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ArtifactKind {
    type Err = ParseEnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cve_summary" => Ok(ArtifactKind::CveSummary),
            "bug_report" => Ok(ArtifactKind::BugReport),
            "commit_message" => Ok(ArtifactKind::CommitMessage),
            _ => Err(ParseEnumError::new("artifact kind", s)),
        }
    }
}

/// Which version of a file a diff line belongs to. `Old` sorts first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Old,
    New,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Old => "old",
            Side::New => "new",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Side {
    type Err = ParseEnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "old" => Ok(Side::Old),
            "new" => Ok(Side::New),
            _ => Err(ParseEnumError::new("side", s)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangeKind {
    Added,
    Removed,
    Context,
}

impl ChangeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ChangeKind::Added => "added",
            ChangeKind::Removed => "removed",
            ChangeKind::Context => "context",
        }
    }
}

impl fmt::Display for ChangeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
