//! Evaluation runs and the extract/trace commands behind the CLI.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use vulntrace_core::corpus::{candidate_pool, Corpus, SentenceKey};
use vulntrace_core::eval::{
    aggregate_trace, check_k_values, default_end_to_end, extraction_row, extraction_table, make_folds, predict_fold,
    trace_cve, trace_table, CveTrace, EvalError, Exclusion, FoldPredictions, Provenance, RankingRow, ReportBundle,
    SentenceClassifier, Table, TraceMode,
};
use vulntrace_core::extract::{ClassifierChoice, TrainedClassifier};
use vulntrace_core::pattern::{Catalog, Token};
use vulntrace_core::trace::{rank_pool, LexicalScorer, Scorer, ScorerError, TraceError};
use vulntrace_core::EntityLabel;

use crate::corpus_io::{corpus_fingerprint, load_corpus, LoadErrors};
use crate::dump::{self, PredictionCsv, RankingCsv};
use crate::model_io::{self, ModelError};
use crate::patterns_io::{load_catalog, PatternLoadError};
use crate::plugin::{PluginClassifier, PluginScorer};
use crate::sha256_hex;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Load(#[from] LoadErrors),
    #[error(transparent)]
    Patterns(#[from] PatternLoadError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(EvalError),
    #[error("plugin failure: {0}")]
    Plugin(ScorerError),
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
}

impl From<EvalError> for RunError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Scorer(s) | EvalError::Trace(TraceError::Scorer(s)) => RunError::Plugin(s),
            other => RunError::Eval(other),
        }
    }
}

impl From<ScorerError> for RunError {
    fn from(e: ScorerError) -> Self {
        RunError::Plugin(e)
    }
}

impl From<TraceError> for RunError {
    fn from(e: TraceError) -> Self {
        EvalError::from(e).into()
    }
}

impl RunError {
    /// 1 for bad input, 3 for plugin failures, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Load(_) | RunError::Patterns(_) => 1,
            RunError::Plugin(_) => 3,
            _ => 2,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |e| RunError::Io { path: path.to_path_buf(), message: e.to_string() }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScorerChoice {
    #[default]
    Lexical,
    Plugin,
}

/// Which parts of the evaluation to run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    #[default]
    All,
    Extraction,
    /// Tracing with gold sentence groups as queries.
    Gold,
    /// Extraction followed by tracing of the extracted sentences.
    EndToEnd,
}

impl RunMode {
    fn extraction(self) -> bool {
        matches!(self, RunMode::All | RunMode::Extraction)
    }

    fn trace_modes(self) -> &'static [TraceMode] {
        match self {
            RunMode::All => &TraceMode::ALL,
            RunMode::Extraction => &[],
            RunMode::Gold => &[TraceMode::Gold],
            RunMode::EndToEnd => &[TraceMode::EndToEnd],
        }
    }
}

fn default_classifiers() -> Vec<ClassifierChoice> {
    ClassifierChoice::BUILTIN.to_vec()
}

fn default_end_to_end_map() -> BTreeMap<EntityLabel, ClassifierChoice> {
    EntityLabel::ALL.into_iter().map(|e| (e, default_end_to_end(e))).collect()
}

pub fn default_k_values() -> Vec<usize> {
    vec![1, 2, 3, 4, 5]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: PathBuf,
    #[serde(default)]
    pub patterns: Option<PathBuf>,
    pub output_dir: PathBuf,
    #[serde(default = "default_classifiers")]
    pub classifiers: Vec<ClassifierChoice>,
    /// Extractor feeding end-to-end tracing, per entity.
    #[serde(default = "default_end_to_end_map")]
    pub end_to_end: BTreeMap<EntityLabel, ClassifierChoice>,
    #[serde(default)]
    pub scorer: ScorerChoice,
    /// Executable used for the plugin scorer and the plugin classifier.
    #[serde(default)]
    pub plugin: Option<PathBuf>,
    #[serde(default = "default_k_values")]
    pub k_values: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mode: RunMode,
}

impl RunConfig {
    pub fn new(corpus: PathBuf, output_dir: PathBuf) -> Self {
        RunConfig {
            corpus,
            patterns: None,
            output_dir,
            classifiers: default_classifiers(),
            end_to_end: default_end_to_end_map(),
            scorer: ScorerChoice::Lexical,
            plugin: None,
            k_values: default_k_values(),
            seed: 0,
            mode: RunMode::All,
        }
    }

    /// Reads a config file; relative paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let mut de = serde_json::Deserializer::from_str(&text);
        let mut cfg: RunConfig = serde_path_to_error::deserialize(&mut de)
            .map_err(|e| RunError::Config(format!("{}: {}: {}", path.display(), e.path(), e.inner())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut cfg.corpus);
        resolve(&mut cfg.output_dir);
        cfg.patterns.as_mut().map(resolve);
        cfg.plugin.as_mut().map(resolve);
        Ok(cfg)
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("config serializes").as_bytes())
    }

    fn validate(&self) -> Result<(), RunError> {
        check_k_values(&self.k_values).map_err(|e| RunError::Config(e.to_string()))?;
        let needs_plugin = self.scorer == ScorerChoice::Plugin
            || self.classifiers.contains(&ClassifierChoice::Plugin)
            || self.end_to_end.values().any(|&c| c == ClassifierChoice::Plugin);
        if needs_plugin && self.plugin.is_none() {
            return Err(RunError::Config("a plugin is selected but no plugin path is set".into()));
        }
        for e in EntityLabel::ALL {
            if !self.end_to_end.contains_key(&e) {
                return Err(RunError::Config(format!("end_to_end has no classifier for {e}")));
            }
        }
        Ok(())
    }
}

/// Files written by [`run`], relative to the output directory.
pub const RUN_OUTPUTS: [&str; 8] = [
    "predictions.csv",
    "rankings.csv",
    "extraction_table.csv",
    "extraction_table.md",
    "trace_tables.csv",
    "trace_tables.md",
    "report_bundle.json",
    "run_manifest.json",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub corpus_fingerprint: String,
    pub catalog_fingerprint: String,
    pub seed: u64,
    pub mode: RunMode,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub outputs: Vec<String>,
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool, RunError> {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| RunError::Config(e.to_string()))
}

pub fn make_scorer(choice: ScorerChoice, plugin: Option<&Path>) -> Result<Box<dyn Scorer>, RunError> {
    Ok(match choice {
        ScorerChoice::Lexical => Box::new(LexicalScorer),
        ScorerChoice::Plugin => {
            let path = plugin.ok_or_else(|| RunError::Config("--scorer plugin needs --plugin".into()))?;
            Box::new(PluginScorer::spawn(path)?)
        }
    })
}

type PredictionKey = (ClassifierChoice, EntityLabel, String);

/// Leave-one-project-out evaluation; writes every file in [`RUN_OUTPUTS`].
/// `jobs` of 0 uses one worker per core.
pub fn run(cfg: &RunConfig, jobs: usize) -> Result<RunManifest, RunError> {
    let started = unix_now();
    cfg.validate()?;
    let corpus = load_corpus(&cfg.corpus)?;
    let catalog = load_catalog(cfg.patterns.as_deref())?;
    let folds = make_folds(&corpus)?;
    let pool = thread_pool(jobs)?;

    let wants_plugin_classifier = cfg.classifiers.contains(&ClassifierChoice::Plugin)
        || cfg.end_to_end.values().any(|&c| c == ClassifierChoice::Plugin);
    let classifier_plugin = match (&cfg.plugin, wants_plugin_classifier) {
        (Some(p), true) => Some(PluginClassifier::new(PluginScorer::spawn(p)?)),
        _ => None,
    };
    let plugin_ref = classifier_plugin.as_ref().map(|c| c as &dyn SentenceClassifier);

    let mut jobs_wanted: Vec<PredictionKey> = Vec::new();
    if cfg.mode.extraction() {
        for &c in &cfg.classifiers {
            for e in EntityLabel::ALL {
                jobs_wanted.extend(folds.iter().map(|f| (c, e, f.test_project.clone())));
            }
        }
    }
    if cfg.mode.trace_modes().contains(&TraceMode::EndToEnd) {
        for (&e, &c) in &cfg.end_to_end {
            jobs_wanted.extend(folds.iter().map(|f| (c, e, f.test_project.clone())));
        }
    }
    jobs_wanted.sort();
    jobs_wanted.dedup();

    let fold_by_project: BTreeMap<&str, _> = folds.iter().map(|f| (f.test_project.as_str(), f)).collect();
    let predictions: BTreeMap<PredictionKey, FoldPredictions> = pool.install(|| {
        jobs_wanted
            .par_iter()
            .map(|key| {
                let (c, e, p) = key;
                predict_fold(&corpus, &catalog, fold_by_project[p.as_str()], *e, *c, plugin_ref, cfg.seed)
                    .map(|fp| (key.clone(), fp))
            })
            .collect::<Result<_, _>>()
    })?;

    let extraction: Vec<_> = if cfg.mode.extraction() {
        let all: Vec<FoldPredictions> = predictions.values().cloned().collect();
        cfg.classifiers
            .iter()
            .flat_map(|&c| EntityLabel::ALL.into_iter().map(move |e| (c, e)))
            .map(|(c, e)| extraction_row(c, e, &all))
            .collect()
    } else {
        Vec::new()
    };

    let modes = cfg.mode.trace_modes();
    let mut traces: Vec<CveTrace> = Vec::new();
    let mut scorer_name = String::new();
    if !modes.is_empty() {
        let scorer = make_scorer(cfg.scorer, cfg.plugin.as_deref())?;
        scorer_name = scorer.name().to_string();
        let mut predicted: BTreeMap<(String, SentenceKey, EntityLabel), bool> = BTreeMap::new();
        if modes.contains(&TraceMode::EndToEnd) {
            for (&e, &c) in &cfg.end_to_end {
                for f in &folds {
                    for r in &predictions[&(c, e, f.test_project.clone())].rows {
                        predicted.insert((r.cve_id.clone(), r.sentence, e), r.predicted);
                    }
                }
            }
        }
        let e2e = modes.contains(&TraceMode::EndToEnd);
        let scorer_ref: &dyn Scorer = scorer.as_ref();
        traces = pool.install(|| {
            corpus
                .records()
                .par_iter()
                .map(|record| {
                    let gold = record.gold.as_ref();
                    let decide = |k: &SentenceKey, e: EntityLabel| {
                        if e2e {
                            predicted.get(&(record.id.clone(), *k, e)).copied().unwrap_or(false)
                        } else {
                            gold.is_some_and(|g| g.has_label(k, e))
                        }
                    };
                    trace_cve(record, scorer_ref, &decide, &cfg.k_values)
                })
                .collect::<Result<Vec<_>, _>>()
        })?;
    }
    let (mut singles, mut pairs) = aggregate_trace(&traces, &cfg.k_values, &scorer_name);
    singles.retain(|r| modes.contains(&r.mode));
    pairs.retain(|r| modes.contains(&r.mode));

    let catalog_fingerprint = format!("{:016x}", catalog.fingerprint());
    let bundle = ReportBundle {
        provenance: Provenance {
            config_hash: cfg.hash(),
            corpus_fingerprint: corpus_fingerprint(&corpus),
            catalog_fingerprint: catalog_fingerprint.clone(),
        },
        k_values: cfg.k_values.clone(),
        extraction,
        single_trace: singles,
        pair_trace: pairs,
        excluded: traces.iter().flat_map(|t| t.excluded.iter().cloned()).collect::<Vec<Exclusion>>(),
    };

    let out = &cfg.output_dir;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let pred_rows: Vec<PredictionCsv> = predictions.values().flat_map(|fp| fp.rows.iter().map(PredictionCsv::from)).collect();
    let p = out.join("predictions.csv");
    dump::write_predictions(&p, &pred_rows).map_err(io_err(&p))?;
    let rank_rows: Vec<RankingCsv> = traces.iter().flat_map(|t| t.rankings.iter().map(RankingCsv::from)).collect();
    let p = out.join("rankings.csv");
    dump::write_rankings(&p, &rank_rows).map_err(io_err(&p))?;
    write_bundle_tables(&bundle, out, ReportFormat::Both)?;
    let p = out.join("report_bundle.json");
    write_json(&p, &bundle)?;

    let manifest = RunManifest {
        config_hash: bundle.provenance.config_hash.clone(),
        corpus_fingerprint: bundle.provenance.corpus_fingerprint.clone(),
        catalog_fingerprint,
        seed: cfg.seed,
        mode: cfg.mode,
        started_unix: started,
        finished_unix: unix_now(),
        outputs: RUN_OUTPUTS.iter().map(|s| s.to_string()).collect(),
    };
    write_json(&out.join("run_manifest.json"), &manifest)?;
    Ok(manifest)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), RunError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Csv,
    Markdown,
    Both,
}

pub fn bundle_tables(bundle: &ReportBundle) -> (Table, Table) {
    (extraction_table(&bundle.extraction), trace_table(&bundle.single_trace, &bundle.pair_trace, &bundle.k_values))
}

/// Writes `extraction_table` and `trace_tables` in the chosen formats.
pub fn write_bundle_tables(bundle: &ReportBundle, dir: &Path, format: ReportFormat) -> Result<Vec<PathBuf>, RunError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let (ext, trace) = bundle_tables(bundle);
    let mut written = Vec::new();
    for (stem, table) in [("extraction_table", &ext), ("trace_tables", &trace)] {
        if matches!(format, ReportFormat::Csv | ReportFormat::Both) {
            let p = dir.join(format!("{stem}.csv"));
            dump::write_table_csv(&p, table).map_err(io_err(&p))?;
            written.push(p);
        }
        if matches!(format, ReportFormat::Markdown | ReportFormat::Both) {
            let p = dir.join(format!("{stem}.md"));
            fs::write(&p, vulntrace_core::eval::render_markdown(table)).map_err(io_err(&p))?;
            written.push(p);
        }
    }
    Ok(written)
}

pub fn read_bundle(path: &Path) -> Result<ReportBundle, RunError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))
}

/// Where the extract command gets its classifier from.
pub enum ModelSource<'a> {
    /// Heuristic and plugin classifiers need no model.
    None,
    Train(&'a Corpus),
    Load(&'a Path),
}

/// Predictions for every (sentence, entity) of `corpus`.
#[allow(clippy::too_many_arguments)]
pub fn extract_predictions(
    corpus: &Corpus,
    catalog: &Catalog,
    entities: &[EntityLabel],
    classifier: ClassifierChoice,
    source: ModelSource<'_>,
    plugin: Option<&dyn SentenceClassifier>,
    seed: u64,
    model_out: Option<&Path>,
) -> Result<Vec<PredictionCsv>, RunError> {
    let mut models: BTreeMap<EntityLabel, TrainedClassifier> = BTreeMap::new();
    if let Some(config) = classifier.feature_config() {
        for &e in entities {
            let model = match &source {
                ModelSource::Train(train) => {
                    let mut set: Vec<(&[Token], bool)> = Vec::new();
                    for r in train.records() {
                        let gold = r.gold.as_ref().ok_or_else(|| EvalError::MissingGold(r.id.clone()))?;
                        set.extend(r.sentences().iter().map(|s| (&s.tokens[..], gold.has_label(&s.key(), e))));
                    }
                    TrainedClassifier::train(&set, catalog, e, config, seed).map_err(EvalError::from)?
                }
                ModelSource::Load(dir) => model_io::load_model(dir, e, catalog)?,
                ModelSource::None => {
                    return Err(RunError::Config(format!("classifier {classifier} needs --train or --model-in")))
                }
            };
            if model.space.config != config {
                return Err(RunError::Config(format!("model for {e} was not trained as {classifier}")));
            }
            if let Some(dir) = model_out {
                fs::create_dir_all(dir).map_err(io_err(dir))?;
                model_io::save_model(dir, &model)?;
            }
            models.insert(e, model);
        }
    }
    if classifier == ClassifierChoice::Plugin && plugin.is_none() {
        return Err(RunError::Config("classifier plugin needs --plugin".into()));
    }

    let mut rows = Vec::new();
    for r in corpus.records() {
        for s in r.sentences() {
            for &e in entities {
                let matches = catalog.match_entity(&s.tokens, e);
                let predicted = match classifier {
                    ClassifierChoice::Heuristic => !matches.is_empty(),
                    ClassifierChoice::Plugin => plugin.expect("checked").classify(&s.text, e)?,
                    _ => models[&e].predict(&s.tokens, catalog).map_err(EvalError::from)?,
                };
                rows.push(PredictionCsv {
                    fold: String::new(),
                    cve_id: r.id.clone(),
                    sentence_key: s.key().to_string(),
                    entity: e.to_string(),
                    classifier: classifier.to_string(),
                    predicted,
                    gold: r.gold.as_ref().map(|g| g.has_label(&s.key(), e)),
                    patterns: matches.into_iter().map(|m| m.pattern_code).collect::<Vec<_>>().join(";"),
                });
            }
        }
    }
    Ok(rows)
}

/// Where trace queries come from.
pub enum Queries<'a> {
    /// The gold sentence groups.
    Gold,
    /// Rows of a predictions file with `predicted` set.
    Predicted(&'a [PredictionCsv]),
}

/// Ranked pools for each query sentence, capped at `depth` rows per
/// sentence when given. Entities with an empty pool are reported in the
/// returned exclusions.
pub fn trace_rankings(
    corpus: &Corpus,
    scorer: &dyn Scorer,
    entities: &[EntityLabel],
    queries: &Queries<'_>,
    depth: Option<usize>,
) -> Result<(Vec<RankingCsv>, Vec<Exclusion>), RunError> {
    let mut wanted: BTreeMap<(&str, EntityLabel), Vec<SentenceKey>> = BTreeMap::new();
    match queries {
        Queries::Gold => {
            for r in corpus.records() {
                let Some(gold) = &r.gold else { continue };
                for &e in entities {
                    let keys = wanted.entry((r.id.as_str(), e)).or_default();
                    keys.extend(gold.mappings_for(e).flat_map(|m| m.sentences.iter().copied()));
                }
            }
        }
        Queries::Predicted(rows) => {
            for (i, row) in rows.iter().enumerate().filter(|(_, r)| r.predicted) {
                let bad = |what: &str| RunError::Config(format!("predictions row {}: bad {what}", i + 1));
                let e: EntityLabel = row.entity.parse().map_err(|_| bad("entity"))?;
                if !entities.contains(&e) {
                    continue;
                }
                let key: SentenceKey = row.sentence_key.parse().map_err(|_| bad("sentence_key"))?;
                let r = corpus.get(&row.cve_id).ok_or_else(|| bad("cve_id"))?;
                if r.sentence(&key).is_none() {
                    return Err(bad("sentence_key"));
                }
                wanted.entry((r.id.as_str(), e)).or_default().push(key);
            }
        }
    }

    let mut rows = Vec::new();
    let mut excluded = Vec::new();
    for r in corpus.records() {
        for &e in entities {
            let Some(keys) = wanted.get_mut(&(r.id.as_str(), e)) else { continue };
            keys.sort();
            keys.dedup();
            if keys.is_empty() {
                continue;
            }
            let pool = match candidate_pool(&r.diff, e) {
                Ok(p) => p,
                Err(err) => {
                    excluded.push(Exclusion { cve_id: r.id.clone(), entity: Some(e), reason: err.to_string() });
                    continue;
                }
            };
            for key in keys.iter() {
                let text = r.sentence(key).map(|s| s.text.as_str()).unwrap_or_default();
                let ranked = rank_pool(scorer, text, &pool)?;
                for (i, c) in ranked.into_iter().enumerate().take(depth.unwrap_or(usize::MAX)) {
                    let row = RankingRow { cve_id: r.id.clone(), entity: e, sentence: *key, rank: i + 1, line: c.line, score: c.score };
                    rows.push(RankingCsv::from(&row));
                }
            }
        }
    }
    Ok((rows, excluded))
}
