//! JSON corpus files: one record per file, or an array of records.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use vulntrace_core::corpus::{
    Artifact, Corpus, CorpusError, CveRecord, GoldAnnotations, GoldMapping, LineKey, RecordError, SentenceKey,
};
use vulntrace_core::{ArtifactKind, EntityLabel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordFile {
    pub id: String,
    pub project: String,
    pub artifacts: Vec<ArtifactFile>,
    #[serde(default)]
    pub diff: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold: Option<GoldFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArtifactFile {
    pub kind: ArtifactKind,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldFile {
    #[serde(default)]
    pub sentence_labels: BTreeMap<String, Vec<EntityLabel>>,
    #[serde(default)]
    pub mappings: Vec<MappingFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingFile {
    pub entity: EntityLabel,
    pub sentences: Vec<String>,
    pub lines: Vec<String>,
}

#[derive(Debug)]
pub enum LoadError {
    Io { path: PathBuf, message: String },
    Json { file: PathBuf, cve_id: Option<String>, field: String, message: String },
    Record { file: PathBuf, error: RecordError },
    Corpus(CorpusError),
}

impl LoadError {
    /// One JSON object per error for machine consumption.
    pub fn to_json(&self) -> Value {
        match self {
            LoadError::Io { path, message } => {
                serde_json::json!({"kind": "io", "file": path, "reason": message})
            }
            LoadError::Json { file, cve_id, field, message } => serde_json::json!({
                "kind": "schema", "file": file, "cve_id": cve_id, "field": field, "reason": message
            }),
            LoadError::Record { file, error } => serde_json::json!({
                "kind": "record", "file": file, "cve_id": error.cve_id, "field": error.field, "reason": error.reason
            }),
            LoadError::Corpus(e) => serde_json::json!({"kind": "corpus", "reason": e.to_string()}),
        }
    }
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Io { path, message } => write!(f, "{}: {message}", path.display()),
            LoadError::Json { file, cve_id, field, message } => {
                write!(f, "{}: {}: {field}: {message}", file.display(), cve_id.as_deref().unwrap_or("<unknown id>"))
            }
            LoadError::Record { file, error } => write!(f, "{}: {error}", file.display()),
            LoadError::Corpus(e) => write!(f, "{e}"),
        }
    }
}

/// Every problem found while loading, in file order.
#[derive(Debug, thiserror::Error)]
pub struct LoadErrors(pub Vec<LoadError>);

impl fmt::Display for LoadErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

fn parse_keys<T>(raw: &[String], id: &str, field: &str) -> Result<BTreeSet<T>, RecordError>
where
    T: std::str::FromStr + Ord,
    T::Err: fmt::Display,
{
    raw.iter()
        .enumerate()
        .map(|(j, s)| s.parse().map_err(|e: T::Err| RecordError::new(id, format!("{field}[{j}]"), e.to_string())))
        .collect()
}

impl RecordFile {
    pub fn into_record(self) -> Result<CveRecord, RecordError> {
        let id = self.id.clone();
        let gold = match self.gold {
            None => None,
            Some(g) => {
                let mut sentence_labels = BTreeMap::new();
                for (raw, labels) in g.sentence_labels {
                    let field = format!("gold.sentence_labels.{raw}");
                    let key: SentenceKey = raw.parse().map_err(|e: vulntrace_core::corpus::ParseSentenceKeyError| {
                        RecordError::new(&id, field.clone(), e.to_string())
                    })?;
                    if sentence_labels.insert(key, labels.into_iter().collect::<BTreeSet<_>>()).is_some() {
                        return Err(RecordError::new(&id, field, format!("duplicate sentence key `{key}`")));
                    }
                }
                let mut mappings = Vec::new();
                for (i, m) in g.mappings.into_iter().enumerate() {
                    let sentences = parse_keys::<SentenceKey>(&m.sentences, &id, &format!("gold.mappings[{i}].sentences"))?;
                    let lines = parse_keys::<LineKey>(&m.lines, &id, &format!("gold.mappings[{i}].lines"))?;
                    mappings.push(GoldMapping { entity: m.entity, sentences, lines });
                }
                Some(GoldAnnotations { sentence_labels, mappings })
            }
        };
        let artifacts = self.artifacts.into_iter().map(|a| Artifact { kind: a.kind, raw_text: a.text }).collect();
        CveRecord::new(&self.id, &self.project, artifacts, &self.diff, gold)
    }

    pub fn from_record(r: &CveRecord) -> Self {
        RecordFile {
            id: r.id.clone(),
            project: r.project.clone(),
            artifacts: r.artifacts.iter().map(|a| ArtifactFile { kind: a.kind, text: a.raw_text.clone() }).collect(),
            diff: r.diff_text.clone(),
            gold: r.gold.as_ref().map(|g| GoldFile {
                sentence_labels: g
                    .sentence_labels
                    .iter()
                    .map(|(k, v)| (k.to_string(), v.iter().copied().collect()))
                    .collect(),
                mappings: g
                    .mappings
                    .iter()
                    .map(|m| MappingFile {
                        entity: m.entity,
                        sentences: m.sentences.iter().map(ToString::to_string).collect(),
                        lines: m.lines.iter().map(ToString::to_string).collect(),
                    })
                    .collect(),
            }),
        }
    }
}

/// Pretty JSON with a trailing newline; stable for a given record.
pub fn record_to_json(r: &CveRecord) -> String {
    let mut s = serde_json::to_string_pretty(&RecordFile::from_record(r)).expect("record serializes");
    s.push('\n');
    s
}

/// SHA-256 over the canonical JSON of every record in corpus order.
pub fn corpus_fingerprint(corpus: &Corpus) -> String {
    let mut all = String::new();
    for r in corpus.records() {
        all.push_str(&record_to_json(r));
    }
    crate::sha256_hex(all.as_bytes())
}

fn parse_value(file: &Path, index: Option<usize>, value: Value) -> Result<CveRecord, LoadError> {
    let cve_id = value.get("id").and_then(Value::as_str).map(String::from);
    let prefix = index.map(|i| format!("[{i}]")).unwrap_or_default();
    let parsed: RecordFile = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let field = match (prefix.is_empty(), path.as_str()) {
            (_, ".") => prefix.clone(),
            (true, p) => p.to_string(),
            (false, p) => format!("{prefix}.{p}"),
        };
        LoadError::Json { file: file.to_path_buf(), cve_id: cve_id.clone(), field, message: e.into_inner().to_string() }
    })?;
    parsed.into_record().map_err(|error| LoadError::Record { file: file.to_path_buf(), error })
}

fn load_file(file: &Path, out: &mut Vec<CveRecord>, errors: &mut Vec<LoadError>) {
    let text = match fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => return errors.push(LoadError::Io { path: file.to_path_buf(), message: e.to_string() }),
    };
    let value: Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => {
            return errors.push(LoadError::Json {
                file: file.to_path_buf(),
                cve_id: None,
                field: String::new(),
                message: e.to_string(),
            })
        }
    };
    let items: Vec<(Option<usize>, Value)> = match value {
        Value::Array(items) => items.into_iter().enumerate().map(|(i, v)| (Some(i), v)).collect(),
        other => vec![(None, other)],
    };
    for (i, v) in items {
        match parse_value(file, i, v) {
            Ok(r) => out.push(r),
            Err(e) => errors.push(e),
        }
    }
}

/// Loads a directory of `*.json` files (sorted by name) or a single file.
pub fn load_corpus(path: &Path) -> Result<Corpus, LoadErrors> {
    let mut files = Vec::new();
    if path.is_dir() {
        let entries = fs::read_dir(path)
            .map_err(|e| LoadErrors(vec![LoadError::Io { path: path.to_path_buf(), message: e.to_string() }]))?;
        for entry in entries.flatten() {
            let p = entry.path();
            if p.is_file() && p.extension().is_some_and(|e| e == "json") {
                files.push(p);
            }
        }
        files.sort();
    } else {
        files.push(path.to_path_buf());
    }
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for f in &files {
        load_file(f, &mut records, &mut errors);
    }
    if !errors.is_empty() {
        return Err(LoadErrors(errors));
    }
    Corpus::new(records).map_err(|e| LoadErrors(vec![LoadError::Corpus(e)]))
}

/// Writes each record to `<dir>/<id>.json`.
pub fn write_corpus(corpus: &Corpus, dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for r in corpus.records() {
        fs::write(dir.join(format!("{}.json", r.id)), record_to_json(r))?;
    }
    Ok(())
}
