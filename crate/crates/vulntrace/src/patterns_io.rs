//! Pattern catalog files layered over the built-in catalog.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use vulntrace_core::pattern::{Catalog, CatalogError, DiscoursePattern, Lexicon};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternFile {
    #[serde(default)]
    pub patterns: Vec<DiscoursePattern>,
    #[serde(default)]
    pub lexicons: Vec<LexiconFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexiconFile {
    pub name: String,
    pub terms: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum PatternLoadError {
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{}: {field}: {message}", path.display())]
    Json { path: PathBuf, field: String, message: String },
    #[error("{}: {source}", path.display())]
    Catalog { path: PathBuf, source: CatalogError },
}

pub fn parse_pattern_file(text: &str, path: &Path) -> Result<PatternFile, PatternLoadError> {
    if text.trim().is_empty() {
        return Ok(PatternFile::default());
    }
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| PatternLoadError::Json {
        path: path.to_path_buf(),
        field: e.path().to_string(),
        message: e.into_inner().to_string(),
    })
}

/// The built-in catalog extended with the file's lexicons and patterns.
/// An empty file leaves the built-ins unchanged.
pub fn load_catalog(path: Option<&Path>) -> Result<Catalog, PatternLoadError> {
    let Some(path) = path else { return Ok(Catalog::builtin()) };
    let text = fs::read_to_string(path)
        .map_err(|e| PatternLoadError::Io { path: path.to_path_buf(), message: e.to_string() })?;
    let file = parse_pattern_file(&text, path)?;
    let catalog_err = |source| PatternLoadError::Catalog { path: path.to_path_buf(), source };
    let lexicons = file
        .lexicons
        .iter()
        .map(|l| Lexicon::new(&l.name, &l.terms))
        .collect::<Result<Vec<_>, _>>()
        .map_err(catalog_err)?;
    Catalog::builtin().extend(lexicons, file.patterns).map_err(catalog_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use vulntrace_core::EntityLabel;

    fn load(text: &str) -> Result<Catalog, PatternLoadError> {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("p.json");
        fs::write(&p, text).unwrap();
        load_catalog(Some(&p))
    }

    #[test]
    fn empty_file_is_builtin() {
        assert_eq!(load("").unwrap().len(), 9);
        assert_eq!(load("{}").unwrap().len(), 9);
    }

    #[test]
    fn additive_pattern_and_lexicon() {
        let c = load(
            r#"{"lexicons": [{"name": "sanitize_verbs", "terms": ["sanitize", "escape"]}],
                "patterns": [{"code": "AFX1", "entity": "AF",
                  "slots": [{"kind": "lexicon", "value": "sanitize_verbs"}, {"kind": "entity_mention"}]}]}"#,
        )
        .unwrap();
        assert_eq!(c.len(), 10);
        assert_eq!(c.count(EntityLabel::Af), 4);
    }

    #[test]
    fn errors() {
        let unknown = load(r#"{"patterns": [{"code": "X", "entity": "VT", "slots": [{"kind": "lexicon", "value": "nope"}]}]}"#);
        assert!(matches!(unknown, Err(PatternLoadError::Catalog { source: CatalogError::UnknownLexicon { .. }, .. })));
        let dup = r#"{"code": "X", "entity": "VT", "slots": [{"kind": "entity_mention"}]}"#;
        let dup = load(&format!(r#"{{"patterns": [{dup}, {dup}]}}"#));
        assert!(matches!(dup, Err(PatternLoadError::Catalog { source: CatalogError::DuplicateCode(_), .. })));
        let empty = load(r#"{"patterns": [{"code": "X", "entity": "VT", "slots": []}]}"#);
        assert!(matches!(empty, Err(PatternLoadError::Catalog { source: CatalogError::EmptySlots(_), .. })));
        match load(r#"{"patterns": [{"code": "X", "entity": "VT", "slots": [{"kind": "regex"}]}]}"#) {
            Err(PatternLoadError::Json { field, .. }) => assert_eq!(field, "patterns[0].slots[0]"),
            other => panic!("{other:?}"),
        }
    }
}
