use std::fmt;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use stancekit::decoding::{evaluate_stance_baselines, train_ngram, DecodingConfig};
use stancekit::ingest::{
    bucket_table, parse_corpus, stratified_split, ParseOptions, Split, SplitAssignment,
};
use stancekit::metrics::{
    evaluate_system, read_zipf_csv, reference_profile, zipf_cdf, BleuAggregation, ReportTable,
};
use stancekit::samples::{
    export_dataset, pair_for_evaluation, read_generations, read_samples, resolve_persona,
    write_generations, write_samples, ExportConfig, ExportHeader, GenerationRecord, Representation,
    StrategyChoice, Task,
};
use stancekit::{corpus_stats, Corpus};

#[derive(Parser, Debug)]
#[command(
    name = "stancekit",
    version,
    about = "Persona corpus tooling for argumentative discussion trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a corpus file.
    Validate(CorpusArgs),
    /// Print corpus statistics.
    Stats {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        json: bool,
    },
    /// Stratified train/validation/test split by discussion.
    Split {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, default_value_t = 0.05)]
        val: f64,
        #[arg(long, default_value_t = 0.05)]
        test: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Claims per split grouped by explicit persona size.
    Buckets {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        split_file: PathBuf,
        #[arg(long, default_value_t = 5)]
        threshold: usize,
        #[arg(long)]
        json: bool,
    },
    /// Export persona-conditioned samples.
    Export(ExportArgs),
    /// Generate claims for exported samples with an n-gram model.
    Generate(GenerateArgs),
    /// Score the persona stance classifier against the majority baseline.
    ClassifyBaseline {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        split_file: PathBuf,
        #[arg(long, default_value = "train")]
        eval_split: Split,
        #[arg(long)]
        json: bool,
    },
    /// Score generated claims against exported references.
    Evaluate(EvaluateArgs),
    /// Token frequency curve as rank,frequency,cdf CSV.
    Zipf {
        /// Exported samples; their targets are counted.
        #[arg(
            long,
            conflicts_with = "generations",
            required_unless_present = "generations"
        )]
        samples: Option<PathBuf>,
        /// Generation output; its texts are counted.
        #[arg(long)]
        generations: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct CorpusArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Give records without author_id a synthetic author instead of failing.
    #[arg(long)]
    allow_missing_authors: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PersonaFlag {
    None,
    Explicit,
    Implicit,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyFlag {
    Random,
    Dynamic,
    Negative,
    Hybrid,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TaskFlag {
    Generation,
    Classification,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AggregationFlag {
    Sentence,
    Corpus,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    split_file: PathBuf,
    #[arg(long, value_enum, default_value = "generation")]
    task: TaskFlag,
    #[arg(long, value_enum, default_value = "none")]
    persona: PersonaFlag,
    /// Selection strategy for explicit personas.
    #[arg(long, value_enum)]
    strategy: Option<StrategyFlag>,
    #[arg(long, default_value_t = 5)]
    cap: usize,
    #[arg(long, default_value_t = 5)]
    threshold: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Split written to --out.
    #[arg(long)]
    split_name: Option<Split>,
    #[arg(long, requires = "split_name")]
    out: Option<PathBuf>,
    /// Train-split export.
    #[arg(long)]
    train_out: Option<PathBuf>,
    /// Inference-side export (see --infer-split).
    #[arg(long)]
    infer_out: Option<PathBuf>,
    #[arg(long, default_value = "test")]
    infer_split: Split,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// Exported samples whose targets train the model.
    #[arg(long)]
    train_samples: PathBuf,
    /// Exported samples to generate for.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 3)]
    order: usize,
    #[arg(long, default_value_t = 0.95)]
    top_p: f64,
    #[arg(long, default_value_t = 40)]
    max_length: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// Exported samples holding sources and references.
    #[arg(long)]
    samples: PathBuf,
    /// NAME=PATH of a generation file; repeat for several systems.
    #[arg(long = "system", required = true, value_parser = parse_system)]
    systems: Vec<(String, PathBuf)>,
    /// Add a row describing the references themselves.
    #[arg(long)]
    human: bool,
    #[arg(long, value_enum, default_value = "sentence")]
    aggregation: AggregationFlag,
    /// Also write the reports as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn parse_system(s: &str) -> Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((name, path)) if !name.is_empty() && !path.is_empty() => {
            Ok((name.to_owned(), PathBuf::from(path)))
        }
        _ => Err(format!("expected NAME=PATH, got {s:?}")),
    }
}

enum CliError {
    /// Bad input data or files; exit code 1.
    Invalid(String),
    /// Inconsistent flags; exit code 2.
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Usage(m) => f.write_str(m),
        }
    }
}

fn invalid(context: impl fmt::Display) -> impl FnOnce(&dyn fmt::Display) -> CliError {
    move |e| CliError::Invalid(format!("{context}: {e}"))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| invalid(path.display())(&e))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| invalid(path.display())(&e))
}

fn load_corpus(args: &CorpusArgs) -> Result<Corpus, CliError> {
    let options = ParseOptions {
        synthesize_missing_authors: args.allow_missing_authors,
    };
    parse_corpus(open(&args.corpus)?, options).map_err(|e| invalid(args.corpus.display())(&e))
}

fn load_split(path: &Path, corpus: &Corpus) -> Result<SplitAssignment, CliError> {
    let split = SplitAssignment::read(open(path)?).map_err(|e| invalid(path.display())(&e))?;
    split
        .covers(corpus)
        .map_err(|e| invalid(path.display())(&e))?;
    Ok(split)
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

fn run(cli: Cli) -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let print = |out: &mut io::StdoutLock, s: &str| {
        out.write_all(s.as_bytes())
            .map_err(|e| CliError::Invalid(format!("stdout: {e}")))
    };
    match cli.command {
        Command::Validate(args) => {
            let corpus = load_corpus(&args)?;
            print(
                &mut out,
                &format!(
                    "ok: {} discussions, {} claims\n",
                    corpus.discussion_count(),
                    corpus.claim_count()
                ),
            )?;
        }
        Command::Stats { corpus, json } => {
            let stats = corpus_stats(&load_corpus(&corpus)?);
            if json {
                print(&mut out, &format!("{}\n", to_json(&stats)))?;
            } else {
                let text = format!(
                    "discussion_count={}\nunique_claim_count={}\nclaims_per_discussion_mean={:.4}\nclaims_per_discussion_std={:.4}\nmax_depth_per_discussion_mean={:.4}\nmax_depth_per_discussion_std={:.4}\nauthor_count={}\nclaims_per_author_min={}\nclaims_per_author_max={}\n# std is the population standard deviation\n",
                    stats.discussion_count,
                    stats.unique_claim_count,
                    stats.claims_per_discussion_mean,
                    stats.claims_per_discussion_std,
                    stats.max_depth_per_discussion_mean,
                    stats.max_depth_per_discussion_std,
                    stats.author_count,
                    stats.claims_per_author_min,
                    stats.claims_per_author_max,
                );
                print(&mut out, &text)?;
            }
        }
        Command::Split {
            corpus,
            val,
            test,
            seed,
            out: path,
        } => {
            let corpus = load_corpus(&corpus)?;
            let split = stratified_split(&corpus, val, test, seed)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let mut w = create(&path)?;
            split
                .write(&mut w)
                .map_err(|e| invalid(path.display())(&e))?;
            w.flush().map_err(|e| invalid(path.display())(&e))?;
            print(
                &mut out,
                &format!(
                    "train={} validation={} test={}\n",
                    split.count(Split::Train),
                    split.count(Split::Validation),
                    split.count(Split::Test)
                ),
            )?;
        }
        Command::Buckets {
            corpus,
            split_file,
            threshold,
            json,
        } => {
            if threshold == 0 {
                return Err(CliError::Usage("--threshold must be at least 1".into()));
            }
            let corpus = load_corpus(&corpus)?;
            let split = load_split(&split_file, &corpus)?;
            let table = bucket_table(&corpus, &split, threshold);
            let text = if json {
                format!("{}\n", to_json(&table))
            } else {
                table.render()
            };
            print(&mut out, &text)?;
        }
        Command::Export(args) => export(args, &mut out)?,
        Command::Generate(args) => generate(args)?,
        Command::ClassifyBaseline {
            corpus,
            split_file,
            eval_split,
            json,
        } => {
            let corpus = load_corpus(&corpus)?;
            let split = load_split(&split_file, &corpus)?;
            let report = evaluate_stance_baselines(&corpus, &split, eval_split)
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            let text = if json {
                format!("{}\n", to_json(&report))
            } else {
                format!(
                    "split={} samples={}\n{:<16} {:>8}\n{:<16} {:>8.2}\n{:<16} {:>8.2}\n",
                    report.split,
                    report.sample_count,
                    "",
                    "F1",
                    "majority",
                    report.majority_f1,
                    "persona",
                    report.persona_f1
                )
            };
            print(&mut out, &text)?;
        }
        Command::Evaluate(args) => {
            let text = evaluate(args)?;
            print(&mut out, &text)?;
        }
        Command::Zipf {
            samples,
            generations,
            out: path,
        } => {
            let texts: Vec<String> = match (samples, generations) {
                (Some(p), _) => {
                    let (_, records) =
                        read_samples(open(&p)?).map_err(|e| invalid(p.display())(&e))?;
                    records.into_iter().map(|r| r.target).collect()
                }
                (None, Some(p)) => read_generations(open(&p)?)
                    .map_err(|e| invalid(p.display())(&e))?
                    .into_iter()
                    .map(|g| g.text)
                    .collect(),
                (None, None) => unreachable!("clap requires one input"),
            };
            let curve = zipf_cdf(texts.iter().map(String::as_str))
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            let mut buf = Vec::new();
            curve
                .write_csv(&mut buf)
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            // guard against lossy float formatting before writing
            let back =
                read_zipf_csv(buf.as_slice()).map_err(|e| CliError::Invalid(e.to_string()))?;
            debug_assert_eq!(back, curve.rows());
            std::fs::write(&path, buf).map_err(|e| invalid(path.display())(&e))?;
            print(
                &mut out,
                &format!(
                    "{} distinct tokens, {} total\n",
                    curve.points.len(),
                    curve.total_tokens
                ),
            )?;
        }
    }
    Ok(())
}

fn export(args: ExportArgs, out: &mut impl Write) -> Result<(), CliError> {
    let representation = match args.persona {
        PersonaFlag::None => Representation::None,
        PersonaFlag::Explicit => Representation::Explicit,
        PersonaFlag::Implicit => Representation::Implicit,
    };
    let strategy = args.strategy.map(|s| match s {
        StrategyFlag::Random => {
            StrategyChoice::Fixed(stancekit::persona::SelectionStrategy::Random)
        }
        StrategyFlag::Dynamic => {
            StrategyChoice::Fixed(stancekit::persona::SelectionStrategy::Dynamic)
        }
        StrategyFlag::Negative => {
            StrategyChoice::Fixed(stancekit::persona::SelectionStrategy::Negative)
        }
        StrategyFlag::Hybrid => StrategyChoice::Hybrid,
    });
    let mut targets: Vec<(Split, PathBuf)> = Vec::new();
    if let (Some(split), Some(path)) = (args.split_name, args.out.clone()) {
        targets.push((split, path));
    }
    if let Some(path) = args.train_out.clone() {
        targets.push((Split::Train, path));
    }
    if let Some(path) = args.infer_out.clone() {
        if args.infer_split == Split::Train {
            return Err(CliError::Usage(
                "--infer-split must be validation or test".into(),
            ));
        }
        targets.push((args.infer_split, path));
    }
    if targets.is_empty() {
        return Err(CliError::Usage(
            "nothing to export: give --split-name with --out, or --train-out/--infer-out".into(),
        ));
    }
    if strategy == Some(StrategyChoice::Hybrid)
        && (args.out.is_some() || args.train_out.is_none() || args.infer_out.is_none())
    {
        return Err(CliError::Usage(
            "the hybrid strategy needs both --train-out and --infer-out (and no --out)".into(),
        ));
    }
    let task = match args.task {
        TaskFlag::Generation => Task::Generation,
        TaskFlag::Classification => Task::Classification,
    };
    // resolve every target before touching the corpus so flag conflicts fail fast
    let mut configs = Vec::new();
    for (split, path) in targets {
        let persona = resolve_persona(representation, strategy, split)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let config = ExportConfig {
            task,
            persona,
            cap: args.cap,
            threshold: args.threshold,
            seed: args.seed,
            split,
        };
        config
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        configs.push((config, path));
    }
    let corpus = load_corpus(&args.corpus)?;
    let split = load_split(&args.split_file, &corpus)?;
    for (config, path) in configs {
        let records = export_dataset(&corpus, &split, &config)
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        let mut w = create(&path)?;
        write_samples(&ExportHeader::for_config(&config), &records, &mut w)
            .map_err(|e| invalid(path.display())(&e))?;
        writeln!(
            out,
            "{}: {} records ({} persona) -> {}",
            config.split,
            records.len(),
            config.persona,
            path.display()
        )
        .map_err(|e| CliError::Invalid(format!("stdout: {e}")))?;
    }
    Ok(())
}

fn generate(args: GenerateArgs) -> Result<(), CliError> {
    if !(args.top_p > 0.0 && args.top_p <= 1.0) {
        return Err(CliError::Usage(format!(
            "--top-p must be in (0, 1], got {}",
            args.top_p
        )));
    }
    if args.order == 0 {
        return Err(CliError::Usage("--order must be at least 1".into()));
    }
    let (_, train) = read_samples(open(&args.train_samples)?)
        .map_err(|e| invalid(args.train_samples.display())(&e))?;
    let (_, input) =
        read_samples(open(&args.input)?).map_err(|e| invalid(args.input.display())(&e))?;
    let model = train_ngram(train.iter().map(|r| r.target.as_str()), args.order)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    let cfg = DecodingConfig {
        top_p: args.top_p,
        max_length: args.max_length,
        seed: args.seed,
    };
    let generations = input
        .iter()
        .map(|r| {
            Ok(GenerationRecord {
                claim_id: r.metadata.claim_id.clone(),
                text: model
                    .generate(&r.source, &cfg)
                    .map_err(|e| CliError::Invalid(e.to_string()))?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut w = create(&args.out)?;
    write_generations(&generations, &mut w).map_err(|e| invalid(args.out.display())(&e))?;
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<String, CliError> {
    let (_, samples) =
        read_samples(open(&args.samples)?).map_err(|e| invalid(args.samples.display())(&e))?;
    let aggregation = match args.aggregation {
        AggregationFlag::Sentence => BleuAggregation::SentenceMean,
        AggregationFlag::Corpus => BleuAggregation::Corpus,
    };
    let mut table = ReportTable::default();
    let mut reports = serde_json::Map::new();
    for (i, (name, path)) in args.systems.iter().enumerate() {
        let generations = read_generations(open(path)?).map_err(|e| invalid(path.display())(&e))?;
        let pairs =
            pair_for_evaluation(&samples, &generations).map_err(|e| invalid(path.display())(&e))?;
        if i == 0 && args.human {
            let profile =
                reference_profile(&pairs).map_err(|e| CliError::Invalid(e.to_string()))?;
            table.push_reference("Human", profile);
        }
        let report =
            evaluate_system(&pairs, aggregation).map_err(|e| invalid(path.display())(&e))?;
        table.push_system(name.clone(), &report);
        reports.insert(
            name.clone(),
            serde_json::to_value(&report).expect("report serializes"),
        );
    }
    if let Some(path) = &args.json {
        std::fs::write(path, to_json(&reports)).map_err(|e| invalid(path.display())(&e))?;
    }
    Ok(table.render())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Invalid(_) => ExitCode::from(1),
                CliError::Usage(_) => ExitCode::from(2),
            }
        }
    }
}
