use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vulntrace::corpus_io::load_corpus;
use vulntrace::dump;
use vulntrace::patterns_io::load_catalog;
use vulntrace::plugin::{resolve_plugin_path, PluginClassifier, PluginScorer};
use vulntrace::run::{
    self, default_k_values, extract_predictions, make_scorer, read_bundle, trace_rankings, write_bundle_tables,
    ModelSource, Queries, ReportFormat, RunConfig, RunError, RunMode, ScorerChoice,
};
use vulntrace_core::eval::SentenceClassifier;
use vulntrace_core::extract::ClassifierChoice;
use vulntrace_core::EntityLabel;

/// Extract vulnerability entities from reports and trace them to patch lines.
#[derive(Parser)]
#[command(name = "vulntrace", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a corpus and report counts and annotation problems.
    Validate {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        patterns: Option<PathBuf>,
        /// Treat annotation diagnostics as errors.
        #[arg(long)]
        strict: bool,
    },
    /// Classify every sentence and write predictions.csv.
    Extract(ExtractArgs),
    /// Rank candidate lines for query sentences and write rankings.csv.
    Trace(TraceArgs),
    /// Leave-one-project-out evaluation with all report files.
    Eval(EvalArgs),
    /// Render the tables of a report bundle.
    Report {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        format: ReportFormat,
        /// Defaults to the bundle's directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    patterns: Option<PathBuf>,
    /// Restrict to one entity.
    #[arg(long)]
    entity: Option<EntityLabel>,
    #[arg(long, default_value = "heuristic")]
    classifier: ClassifierChoice,
    /// Labeled corpus to train linear classifiers on.
    #[arg(long, conflicts_with = "model_in")]
    train: Option<PathBuf>,
    #[arg(long)]
    model_in: Option<PathBuf>,
    #[arg(long)]
    model_out: Option<PathBuf>,
    #[arg(long)]
    plugin: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// `gold`, or a predictions.csv from `extract`.
    #[arg(long, default_value = "gold")]
    queries: String,
    #[arg(long)]
    entity: Option<EntityLabel>,
    #[arg(long, value_enum, default_value = "lexical")]
    scorer: ScorerArg,
    #[arg(long)]
    plugin: Option<PathBuf>,
    /// Keep the top k lines per sentence instead of the whole pool.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// JSON run configuration; the flags below are ignored when given.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    corpus: Option<PathBuf>,
    #[arg(long)]
    patterns: Option<PathBuf>,
    /// Classifiers for the extraction table; repeatable.
    #[arg(long)]
    classifier: Vec<ClassifierChoice>,
    #[arg(long, value_enum, default_value = "lexical")]
    scorer: ScorerArg,
    #[arg(long)]
    plugin: Option<PathBuf>,
    /// Comma-separated k values.
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "all")]
    mode: RunMode,
    #[arg(long, required_unless_present = "config")]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ScorerArg {
    Lexical,
    Plugin,
}

impl From<ScorerArg> for ScorerChoice {
    fn from(s: ScorerArg) -> Self {
        match s {
            ScorerArg::Lexical => ScorerChoice::Lexical,
            ScorerArg::Plugin => ScorerChoice::Plugin,
        }
    }
}

fn entities(entity: Option<EntityLabel>) -> Vec<EntityLabel> {
    entity.map_or_else(|| EntityLabel::ALL.to_vec(), |e| vec![e])
}

fn create_dir(dir: &Path) -> Result<(), RunError> {
    fs::create_dir_all(dir).map_err(|e| RunError::Io { path: dir.into(), message: e.to_string() })
}

fn validate(corpus: &Path, patterns: Option<&Path>, strict: bool) -> Result<bool, RunError> {
    load_catalog(patterns)?;
    let corpus = match load_corpus(corpus) {
        Ok(c) => c,
        Err(errors) => {
            for e in &errors.0 {
                eprintln!("{}", e.to_json());
            }
            return Err(RunError::Load(errors));
        }
    };
    for (project, n) in corpus.project_counts() {
        println!("{project}\t{n}");
    }
    println!("{} CVEs", corpus.len());
    let diagnostics: Vec<String> = corpus.records().iter().flat_map(|r| r.diagnostics()).collect();
    for d in &diagnostics {
        eprintln!("{}", serde_json::json!({"kind": "diagnostic", "reason": d}));
    }
    Ok(!(strict && !diagnostics.is_empty()))
}

fn extract(a: ExtractArgs) -> Result<(), RunError> {
    let catalog = load_catalog(a.patterns.as_deref())?;
    let corpus = load_corpus(&a.corpus)?;
    let train = a.train.as_deref().map(load_corpus).transpose()?;
    let source = match (&train, &a.model_in) {
        (Some(t), _) => ModelSource::Train(t),
        (None, Some(dir)) => ModelSource::Load(dir),
        (None, None) => ModelSource::None,
    };
    let plugin = match (a.classifier, resolve_plugin_path(a.plugin.as_deref())) {
        (ClassifierChoice::Plugin, Some(p)) => Some(PluginClassifier::new(PluginScorer::spawn(&p)?)),
        _ => None,
    };
    let rows = extract_predictions(
        &corpus,
        &catalog,
        &entities(a.entity),
        a.classifier,
        source,
        plugin.as_ref().map(|p| p as &dyn SentenceClassifier),
        a.seed,
        a.model_out.as_deref(),
    )?;
    create_dir(&a.out)?;
    let path = a.out.join("predictions.csv");
    dump::write_predictions(&path, &rows).map_err(|e| RunError::Io { path: path.clone(), message: e.to_string() })?;
    println!("{}", path.display());
    Ok(())
}

fn trace(a: TraceArgs) -> Result<(), RunError> {
    if a.k == Some(0) {
        return Err(RunError::Config("--k must be at least 1".into()));
    }
    let corpus = load_corpus(&a.corpus)?;
    let predictions = if a.queries == "gold" {
        None
    } else {
        let p = Path::new(&a.queries);
        Some(dump::read_predictions(p).map_err(|e| RunError::Config(format!("{}: {e}", p.display())))?)
    };
    let queries = match &predictions {
        None => Queries::Gold,
        Some(rows) => Queries::Predicted(rows),
    };
    let scorer = make_scorer(a.scorer.into(), resolve_plugin_path(a.plugin.as_deref()).as_deref())?;
    let (rows, excluded) = trace_rankings(&corpus, scorer.as_ref(), &entities(a.entity), &queries, a.k)?;
    for e in &excluded {
        eprintln!("{}", serde_json::json!({"kind": "excluded", "cve_id": e.cve_id, "entity": e.entity, "reason": e.reason}));
    }
    create_dir(&a.out)?;
    let path = a.out.join("rankings.csv");
    dump::write_rankings(&path, &rows).map_err(|e| RunError::Io { path: path.clone(), message: e.to_string() })?;
    println!("{}", path.display());
    Ok(())
}

fn eval(a: EvalArgs) -> Result<(), RunError> {
    let cfg = match &a.config {
        Some(path) => {
            let mut cfg = RunConfig::load(path)?;
            if let Some(p) = resolve_plugin_path(None) {
                cfg.plugin = Some(p);
            }
            cfg
        }
        None => {
            let mut cfg = RunConfig::new(a.corpus.expect("required by clap"), a.out.expect("required by clap"));
            cfg.patterns = a.patterns;
            if !a.classifier.is_empty() {
                cfg.classifiers = a.classifier;
            }
            cfg.scorer = a.scorer.into();
            cfg.plugin = resolve_plugin_path(a.plugin.as_deref());
            cfg.k_values = if a.k.is_empty() { default_k_values() } else { a.k };
            cfg.seed = a.seed;
            cfg.mode = a.mode;
            cfg
        }
    };
    run::run(&cfg, a.jobs)?;
    for name in run::RUN_OUTPUTS {
        println!("{}", cfg.output_dir.join(name).display());
    }
    Ok(())
}

fn report(bundle: &Path, format: ReportFormat, out: Option<PathBuf>) -> Result<(), RunError> {
    let b = read_bundle(bundle)?;
    let dir = out.unwrap_or_else(|| bundle.parent().unwrap_or(Path::new(".")).to_path_buf());
    for p in write_bundle_tables(&b, &dir, format)? {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { corpus, patterns, strict } => match validate(&corpus, patterns.as_deref(), strict) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(1),
            Err(RunError::Load(_)) => return ExitCode::from(1),
            Err(e) => Err(e),
        },
        Command::Extract(a) => extract(a),
        Command::Trace(a) => trace(a),
        Command::Eval(a) => eval(a),
        Command::Report { bundle, format, out } => report(&bundle, format, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
