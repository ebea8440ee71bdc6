use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use lcr_core::config::{EncoderChoice, PipelineConfig};
use lcr_core::corpus::{ingest_corpus, write_corpus, CorpusRecord};
use lcr_core::encode::{Encoder, DEFAULT_DIM};
use lcr_core::eval::{evaluate, render_table, EvalReport, QueryRecord};
use lcr_core::fusion::{FusionMethod, FusionParams};
use lcr_core::index::{build_index, Bm25Index, CodeIndex, Searcher, Similarity};
use lcr_core::pipeline::{Pipeline, CODE_MAX_TOKENS};
use lcr_core::split::{Grammars, Language, SourceSnippet, SplitStrategy, Splitter};
use lcr_core::synthetic::{gen_synthetic, SyntheticConfig};
use lcr_core::tokenize::TokenizerRule;
use lcr_core::train::{examples_from_corpus, train, TrainConfig};
use lcr_core::window::TailPolicy;

#[derive(Parser)]
#[command(name = "lcr", version, about = "Split, encode and search long code snippets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split one source file into pieces, printed as JSON lines.
    Split {
        file: PathBuf,
        #[arg(long, visible_alias = "split", default_value = "ast")]
        strategy: SplitStrategy,
        /// Defaults to the language implied by the file extension.
        #[arg(long)]
        language: Option<Language>,
    },
    /// Encode a corpus into an index file.
    Index {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Rank an index against one query.
    Search {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long, default_value_t = 10)]
        top_k: usize,
        #[arg(long, default_value = "cosine")]
        similarity: Similarity,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// MRR and recall over the queries of a corpus.
    Eval {
        #[arg(long)]
        corpus: PathBuf,
        /// Use a prebuilt index instead of encoding the corpus.
        #[arg(long)]
        index: Option<PathBuf>,
        /// Also evaluate BM25 over the full code text.
        #[arg(long)]
        bm25: bool,
        /// Also evaluate the truncation baseline with the same encoder.
        #[arg(long)]
        baseline: bool,
        #[arg(long, default_value_t = 5)]
        buckets: usize,
        #[arg(long, default_value = "cosine")]
        similarity: Similarity,
        /// Write the JSON report here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Train the attention head on a corpus with queries.
    TrainFusion {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        loss_csv: PathBuf,
        #[arg(long, default_value_t = TrainConfig::default().epochs)]
        epochs: usize,
        #[arg(long, default_value_t = TrainConfig::default().learning_rate)]
        lr: f64,
        #[arg(long, default_value_t = TrainConfig::default().temperature)]
        temperature: f64,
        #[arg(long, default_value_t = TrainConfig::default().batch_size)]
        train_batch_size: usize,
        #[arg(long, default_value_t = TrainConfig::default().max_blocks_per_code)]
        max_blocks: usize,
        #[arg(long)]
        symmetric: bool,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Write a synthetic corpus with planted query words.
    GenSynthetic {
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Share of records whose query words appear only after the first 256 tokens.
        #[arg(long, default_value_t = 0.5)]
        long_fraction: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct PipelineArgs {
    #[arg(long, default_value = "ast")]
    split: SplitStrategy,
    #[arg(long, default_value_t = 32)]
    window: usize,
    #[arg(long, default_value_t = 16)]
    step: usize,
    #[arg(long, default_value = "floor")]
    tail: TailPolicy,
    #[arg(long, default_value = "attn1+mean")]
    fusion: FusionMethod,
    #[arg(long, default_value = "builtin")]
    encoder: EncoderChoice,
    #[arg(long, default_value_t = DEFAULT_DIM)]
    dim: usize,
    /// Trained fusion parameters; the all-zero head is used otherwise.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Encode only the first N code tokens (the truncation baseline).
    #[arg(long)]
    truncate: Option<usize>,
    #[arg(long, default_value_t = 64)]
    batch_size: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl PipelineArgs {
    fn config(&self) -> PipelineConfig {
        PipelineConfig {
            split: self.split,
            window: self.window,
            step: self.step,
            tail: self.tail,
            encoder: self.encoder.clone(),
            dim: self.dim,
            fusion: self.fusion,
            params: self.params.clone(),
            truncate: self.truncate,
            batch_size: self.batch_size,
            seed: self.seed,
        }
    }
}

type DynPipeline = Pipeline<f64, Box<dyn Encoder<f64>>>;

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn load_corpus(path: &Path, require_query: bool) -> Result<(Vec<CorpusRecord>, serde_json::Value)> {
    let (records, report) = ingest_corpus(path, require_query)?;
    Ok((records, serde_json::to_value(report)?))
}

fn run_split(file: &Path, strategy: SplitStrategy, language: Option<Language>) -> Result<()> {
    if !file.exists() {
        return Err(lcr_core::Error::FileNotFound(file.to_path_buf()).into());
    }
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let language = match language {
        Some(l) => l,
        None => file
            .extension()
            .and_then(|e| e.to_str())
            .and_then(Language::from_extension)
            .with_context(|| format!("cannot infer language of {}; pass --language", file.display()))?,
    };
    let snippet = SourceSnippet::new(file.display().to_string(), language.name(), text);
    let output = Splitter::new(strategy, Grammars::from_env()?).split(&snippet)?;
    let mut out = io::stdout().lock();
    for p in output.pieces {
        let line = json!({"index": p.index, "start": p.span.start, "end": p.span.end, "text": p.text});
        serde_json::to_writer(&mut out, &line)?;
        writeln!(out)?;
    }
    Ok(())
}

fn run_index(corpus: &Path, out: &Path, args: &PipelineArgs) -> Result<()> {
    let cfg = args.config();
    let pipeline: DynPipeline = cfg.build()?;
    let (records, ingest) = load_corpus(corpus, false)?;
    let snippets: Vec<SourceSnippet> = records.iter().map(CorpusRecord::snippet).collect();
    let (index, report) = build_index(&snippets, &pipeline, cfg.batch_size)?;
    index.save(out)?;
    print_json(&json!({
        "index": out.display().to_string(),
        "entries": report.entries,
        "skipped": report.skipped,
        "ingest": ingest,
        "fingerprint": pipeline.fingerprint(),
    }))
}

fn run_search(index: &Path, query: &str, top_k: usize, similarity: Similarity, args: &PipelineArgs) -> Result<()> {
    let pipeline: DynPipeline = args.config().build()?;
    let index = CodeIndex::<f64>::load(index)?;
    let searcher = Searcher::new(&index, &pipeline, similarity)?;
    print_json(&serde_json::to_value(searcher.search(query, top_k)?)?)
}

#[allow(clippy::too_many_arguments)]
fn eval_pipeline(
    label: &str,
    pipeline: &DynPipeline,
    snippets: &[SourceSnippet],
    queries: &[QueryRecord],
    prebuilt: Option<&Path>,
    cfg: &PipelineConfig,
    similarity: Similarity,
    buckets: usize,
) -> Result<EvalReport> {
    let index = match prebuilt {
        Some(path) => CodeIndex::<f64>::load(path)?,
        None => build_index(snippets, pipeline, cfg.batch_size)?.0,
    };
    let searcher = Searcher::new(&index, pipeline, similarity)?;
    Ok(evaluate(label, &searcher, queries, buckets)?)
}

#[allow(clippy::too_many_arguments)]
fn run_eval(
    corpus: &Path,
    index: Option<&Path>,
    bm25: bool,
    baseline: bool,
    buckets: usize,
    similarity: Similarity,
    out: Option<&Path>,
    args: &PipelineArgs,
) -> Result<()> {
    let cfg = args.config();
    let (records, ingest) = load_corpus(corpus, true)?;
    let snippets: Vec<SourceSnippet> = records.iter().map(CorpusRecord::snippet).collect();
    let queries: Vec<QueryRecord> = records.iter().filter_map(CorpusRecord::query_record).collect();
    let pipeline: DynPipeline = cfg.build()?;
    let label = if cfg.truncate.is_some() { "truncate" } else { "blocks" };
    let mut reports = vec![eval_pipeline(label, &pipeline, &snippets, &queries, index, &cfg, similarity, buckets)?];
    if baseline {
        let base_cfg = PipelineConfig {
            truncate: Some(CODE_MAX_TOKENS),
            ..cfg.clone()
        };
        let base: DynPipeline = base_cfg.build()?;
        reports.push(eval_pipeline("truncate", &base, &snippets, &queries, None, &base_cfg, similarity, buckets)?);
    }
    if bm25 {
        let ranker = Bm25Index::new(&snippets, TokenizerRule::default());
        reports.push(evaluate("bm25", &ranker, &queries, buckets)?);
    }
    eprint!("{}", render_table(&reports));
    let report = json!({"ingest": ingest, "reports": reports});
    if let Some(path) = out {
        fs::write(path, serde_json::to_string_pretty(&report)? + "\n")?;
    }
    print_json(&report)
}

fn run_train(
    corpus: &Path,
    out: &Path,
    loss_csv: &Path,
    train_cfg: TrainConfig,
    args: &PipelineArgs,
) -> Result<()> {
    let cfg = args.config();
    if cfg.truncate.is_some() {
        bail!("the truncation baseline has no fusion head to train");
    }
    if cfg.fusion.attention().is_none() {
        bail!("fusion method {} has no trainable parameters", cfg.fusion);
    }
    let pipeline: DynPipeline = cfg.build()?;
    let (records, ingest) = load_corpus(corpus, true)?;
    let (examples, failed) = examples_from_corpus(&pipeline, &records);
    let initial = match &cfg.params {
        Some(_) => pipeline.params().clone(),
        None => FusionParams::init_uniform(cfg.fusion, pipeline.encoder().dim(), cfg.seed),
    };
    let outcome = train(&examples, initial, &train_cfg)?;
    outcome.params.save(out)?;
    fs::write(loss_csv, outcome.loss_csv())?;
    let failed: Vec<_> = failed
        .iter()
        .map(|(id, e)| json!({"id": id, "error": e.code(), "message": e.to_string()}))
        .collect();
    print_json(&json!({
        "params": out.display().to_string(),
        "loss_csv": loss_csv.display().to_string(),
        "examples": examples.len(),
        "skipped": failed,
        "ingest": ingest,
        "epoch_losses": outcome.epoch_losses,
        "digest": outcome.params.digest(),
    }))
}

fn run_gen(cfg: &SyntheticConfig, out: Option<&Path>) -> Result<()> {
    let records = gen_synthetic(cfg)?;
    match out {
        Some(path) => {
            write_corpus(&records, fs::File::create(path)?)?;
            print_json(&json!({"out": path.display().to_string(), "records": records.len()}))
        }
        None => Ok(write_corpus(&records, io::stdout().lock())?),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Split { file, strategy, language } => run_split(&file, strategy, language),
        Command::Index { corpus, out, pipeline } => run_index(&corpus, &out, &pipeline),
        Command::Search {
            index,
            query,
            top_k,
            similarity,
            pipeline,
        } => run_search(&index, &query, top_k, similarity, &pipeline),
        Command::Eval {
            corpus,
            index,
            bm25,
            baseline,
            buckets,
            similarity,
            out,
            pipeline,
        } => run_eval(&corpus, index.as_deref(), bm25, baseline, buckets, similarity, out.as_deref(), &pipeline),
        Command::TrainFusion {
            corpus,
            out,
            loss_csv,
            epochs,
            lr,
            temperature,
            train_batch_size,
            max_blocks,
            symmetric,
            pipeline,
        } => {
            let train_cfg = TrainConfig {
                batch_size: train_batch_size,
                max_blocks_per_code: max_blocks,
                epochs,
                learning_rate: lr,
                temperature,
                seed: pipeline.seed,
                symmetric,
            };
            run_train(&corpus, &out, &loss_csv, train_cfg, &pipeline)
        }
        Command::GenSynthetic {
            n,
            seed,
            long_fraction,
            out,
        } => {
            let cfg = SyntheticConfig {
                n,
                seed,
                long_fraction,
                ..SyntheticConfig::default()
            };
            run_gen(&cfg, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = err
                .downcast_ref::<lcr_core::Error>()
                .map_or("Error", lcr_core::Error::code);
            let message = format!("{err:#}");
            let body = json!({"error": code, "message": message});
            println!("{body}");
            log::error!("{message}");
            ExitCode::FAILURE
        }
    }
}
