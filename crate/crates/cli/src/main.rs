use std::collections::BTreeSet;
use std::fs;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use semhash_core::augment::Thesaurus;
use semhash_core::corpus::{load_dataset, resolve_corpus, Split};
use semhash_core::evaluate::{
    benchmark, check_report, grid_search, render_text, BenchmarkConfig, GridSearchConfig,
    Thresholds,
};
use semhash_core::model::{ModelArtifact, Provenance};
use semhash_core::pipeline::{augment_training, train_pipeline, NoopObserver};
use semhash_core::preprocess::normalize_text;
use semhash_core::semhash::{featurize_text, subtokenize_word};
use semhash_core::ClassifierKind;
use serde_json::json;

const EXIT_INPUT: u8 = 1;
const EXIT_CHECK: u8 = 2;

#[derive(Parser)]
#[command(
    name = "semhash",
    version,
    about = "Subword semantic hashing intent classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the multi-run benchmark over one or more corpora.
    Bench(BenchArgs),
    /// Train a model on a corpus's training split and save it.
    Train(TrainArgs),
    /// Predict one label per input line.
    Predict(PredictArgs),
    /// Show normalization and sub-tokens for a text.
    Featurize(FeaturizeArgs),
}

#[derive(Args)]
struct LexiconArgs {
    /// Synonym lexicon (TSV: word, pos, comma-separated synonyms).
    #[arg(long, env = "SEMHASH_THESAURUS")]
    thesaurus: Option<PathBuf>,
    /// Train without synonym augmentation.
    #[arg(long)]
    no_augment: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, env = "SEMHASH_CORPUS_DIR", default_value = "data")]
    corpus_dir: PathBuf,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "chatbot,askubuntu,webapp"
    )]
    datasets: Vec<String>,
    /// Comma-separated classifier names, or `all`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    classifiers: Vec<String>,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    lexicon: LexiconArgs,
    /// Exit with status 2 when a reproduction threshold is missed.
    #[arg(long)]
    check: bool,
    /// Write the JSON report here and the text report next to it.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Print the JSON report instead of the text tables.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    classifier: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "model.shm")]
    out: PathBuf,
    #[command(flatten)]
    lexicon: LexiconArgs,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// Text file with one utterance per line; standard input when absent.
    input: Option<PathBuf>,
    /// Append per-class decision values.
    #[arg(long)]
    scores: bool,
}

#[derive(Args)]
struct FeaturizeArgs {
    #[arg(default_value = "")]
    text: String,
    #[arg(long)]
    json: bool,
}

fn parse_classifiers(names: &[String]) -> Result<Vec<ClassifierKind>> {
    if names.iter().any(|n| n == "all") {
        return Ok(ClassifierKind::ALL.to_vec());
    }
    let mut seen = BTreeSet::new();
    let mut kinds = Vec::new();
    for name in names {
        let kind: ClassifierKind = name.trim().parse()?;
        if seen.insert(kind) {
            kinds.push(kind);
        }
    }
    Ok(kinds)
}

/// The lexicon to augment with and its label, or `None` when disabled.
fn load_lexicon(args: &LexiconArgs) -> Result<Option<(Thesaurus, String)>> {
    if args.no_augment {
        return Ok(None);
    }
    match &args.thesaurus {
        Some(path) => {
            let (thesaurus, stats) = Thesaurus::from_file(path)?;
            if stats.rejected_headwords + stats.rejected_synonyms > 0 {
                eprintln!(
                    "warning: {}: skipped {} headwords and {} synonyms that are not single words",
                    path.display(),
                    stats.rejected_headwords,
                    stats.rejected_synonyms
                );
            }
            Ok(Some((thesaurus, path.display().to_string())))
        }
        None => Ok(Some((Thesaurus::builtin().clone(), "builtin".into()))),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    let kinds = parse_classifiers(&args.classifiers)?;
    let mut datasets = Vec::new();
    for key in args
        .datasets
        .iter()
        .map(|k| k.trim())
        .filter(|k| !k.is_empty())
    {
        let path = resolve_corpus(&args.corpus_dir, key).with_context(|| {
            format!("corpus {key:?} not found in {}", args.corpus_dir.display())
        })?;
        datasets.push(load_dataset(&path, key)?);
    }
    let lexicon = load_lexicon(&args.lexicon)?;
    let mut config = BenchmarkConfig::new(kinds, args.runs, args.seed).without_augmentation();
    if let Some((thesaurus, label)) = &lexicon {
        config = config.with_thesaurus(thesaurus, label.clone());
    }

    let report = benchmark(&datasets, &config, &NoopObserver)?;
    let text = render_text(&report);
    let json = serde_json::to_string_pretty(&report)?;
    if let Some(path) = &args.report {
        write_file(path, &json)?;
        write_file(&path.with_extension("txt"), &text)?;
    }
    let mut out = io::stdout().lock();
    if args.json {
        writeln!(out, "{json}")?;
    } else {
        write!(out, "{text}")?;
    }
    out.flush()?;

    if args.check {
        let outcomes = check_report(&report, &Thresholds::default());
        for o in &outcomes {
            let verdict = if o.passed { "PASS" } else { "FAIL" };
            eprintln!("{verdict} [{}] {}: {}", o.criterion, o.name, o.detail);
        }
        if outcomes.iter().any(|o| !o.passed) {
            return Ok(ExitCode::from(EXIT_CHECK));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_train(args: TrainArgs) -> Result<ExitCode> {
    let kind: ClassifierKind = args.classifier.parse()?;
    let name = args
        .corpus
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let dataset = load_dataset(&args.corpus, &name)?;
    let train = dataset.split(Split::Train);
    if train.is_empty() {
        bail!("{} has no training samples", args.corpus.display());
    }
    let lexicon = load_lexicon(&args.lexicon)?;
    let thesaurus = lexicon.as_ref().map(|(t, _)| t);

    let grid = grid_search(
        &kind.grid(),
        &train,
        &GridSearchConfig {
            folds: semhash_core::evaluate::DEFAULT_FOLDS.min(train.len()),
            seed: args.seed,
            thesaurus,
        },
        &NoopObserver,
    )?;
    let augmented = augment_training(&train, thesaurus, args.seed, &NoopObserver)?;
    let pipeline = train_pipeline(&augmented, &grid.best, args.seed, &NoopObserver)?;
    let created_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let artifact = ModelArtifact::new(
        pipeline,
        Provenance {
            corpus: dataset.name.clone(),
            seed: args.seed,
            created_unix,
            augmented: lexicon.is_some(),
            thesaurus: lexicon.as_ref().map(|(_, label)| label.clone()),
            params: grid.best.clone(),
        },
    );
    artifact.save(&args.out)?;
    eprintln!(
        "trained {} ({}) on {} samples, {} features, {} classes -> {}",
        kind,
        grid.best.summary(),
        augmented.len(),
        artifact.feature_space.dim(),
        artifact.class_names.len(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_predict(args: PredictArgs) -> Result<ExitCode> {
    let model = ModelArtifact::load(&args.model)?;
    let reader: Box<dyn BufRead> = match &args.input {
        Some(path) => Box::new(io::BufReader::new(
            fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?,
        )),
        None => Box::new(io::stdin().lock()),
    };
    let mut out = BufWriter::new(io::stdout().lock());
    for line in reader.lines() {
        let line = line?;
        let label = model.predict(&line)?;
        if args.scores {
            let scores = model.scores(&line)?;
            let pairs: Vec<String> = model
                .class_names
                .iter()
                .zip(scores)
                .map(|(c, s)| format!("{c}={s}"))
                .collect();
            writeln!(out, "{label}\t{}", pairs.join("\t"))?;
        } else {
            writeln!(out, "{label}")?;
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_featurize(args: FeaturizeArgs) -> Result<ExitCode> {
    let normalized = normalize_text(&args.text);
    let words = normalized
        .tokens()
        .iter()
        .map(|w| Ok((w.as_str(), subtokenize_word(&w.to_lowercase())?)))
        .collect::<Result<Vec<_>>>()?;
    let features = featurize_text(&normalized);
    let mut out = io::stdout().lock();
    if args.json {
        let value = json!({
            "normalized": normalized.text(),
            "words": words
                .iter()
                .map(|(w, subs)| json!({ "word": w, "subtokens": subs }))
                .collect::<Vec<_>>(),
            "subtokens": features.subtokens(),
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
    } else {
        writeln!(out, "normalized: {}", normalized.text())?;
        for (w, subs) in &words {
            let joined: Vec<&str> = subs.iter().map(|s| s.as_str()).collect();
            writeln!(out, "{w}: {}", joined.join(" "))?;
        }
        writeln!(out, "features: {}", features.len())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<io::Error>())
        .any(|io| io.kind() == io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Bench(args) => cmd_bench(args),
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Featurize(args) => cmd_featurize(args),
    };
    match result {
        Ok(code) => code,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
