//! `hokmix` command-line front end.

mod config;

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hokmix::annotation::{cohen_kappa, sample_pool, AgreementLabel, AnnotationStore, QueuePolicy};
use hokmix::metrics::{compute_cmi, compute_spf, corpus_stats, LangSeq};
use hokmix::modelprep::{
    build_vocab, emit_stage_manifest, plan_mlm_masks, replace_unused, split_corpus, write_split,
    CorpusStream, ModelName, SplitSpec, StreamLabel, Vocab, DEFAULT_BASE_P, DEFAULT_MULTIPLIER,
    XLM_SPECIALS,
};
use hokmix::normalizer::{Charset, NormalizationReport, Normalizer, ReadingMap};
use hokmix::segmenter::{analyze, segment};
use hokmix::synthesizer::{synthesize_corpus, CorpusRecord, Mode, ParallelPair, SynthesisOptions};
use hokmix::Lexicon;
use serde::Serialize;

use config::FileConfig;

/// Missing required settings; reported with the same exit code as clap's
/// usage errors.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Parser)]
#[command(
    name = "hokmix",
    version,
    about = "Hokkien-Mandarin code-mixing toolkit"
)]
struct Cli {
    /// TOML file with default settings; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Normalize raw Hokkien lines and drop those that fail the filters.
    Normalize {
        #[command(flatten)]
        lex: LexArgs,
        #[command(flatten)]
        norm: NormArgs,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Segment each input line into tokens.
    Segment {
        #[command(flatten)]
        lex: LexArgs,
        #[command(flatten)]
        io: IoArgs,
        /// Append `/POS` to every token.
        #[arg(long)]
        pos: bool,
        /// Emit JSON lines with tokens and phrase chunks.
        #[arg(long, conflicts_with = "pos")]
        chunks: bool,
    },
    /// Build a code-mixed corpus from parallel Hokkien-Mandarin pairs.
    Synthesize {
        #[command(flatten)]
        lex: LexArgs,
        #[command(flatten)]
        norm: NormArgs,
        /// `cm` (constrained) or `cmda` (augmentation).
        #[arg(long)]
        mode: Option<Mode>,
        /// Tab-separated `id hokkien mandarin` rows.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Corpus JSON lines (stdout when omitted).
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Keep sentences that received no switch.
        #[arg(long)]
        keep_unswitched: bool,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Corpus-level CMI, SPF and symbol coverage.
    Stats {
        /// Corpus JSON lines.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// One row per sentence instead of the corpus means.
        #[arg(long)]
        per_sentence: bool,
    },
    /// Seeded train/valid/test split with a held-out PAD subset.
    Split {
        /// JSON lines, each with a string `id`.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// File of ids (one per line) reserved for the PAD subset.
        #[arg(long, value_name = "FILE")]
        pad_ids: Option<PathBuf>,
        /// Ratios as `train:valid:test`.
        #[arg(long, value_parser = parse_ratios)]
        ratios: Option<[u32; 3]>,
    },
    /// Vocabulary construction.
    #[command(subcommand)]
    Vocab(VocabCommand),
    /// Show which positions of each line would be masked.
    MaskPreview {
        #[arg(long, value_name = "FILE")]
        vocab: PathBuf,
        /// Space-separated rendered tokens, one sentence per line.
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
        #[arg(long)]
        base_p: Option<f64>,
        #[arg(long)]
        multiplier: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Token used for anything outside the vocabulary.
        #[arg(long, default_value = "<unk>")]
        unk: String,
    },
    /// Print the staged training manifest for a model configuration.
    Manifest {
        /// One of XLM_M-M, XLM_MT-M, XLM_MT-C, XLM_MT-CT.
        #[arg(long)]
        model: ModelName,
    },
    /// Cohen's kappa between two raters' label files.
    Kappa {
        /// One label per line: TOTALLY_AGREE, FAIR_AGREE, DISAGREE, true or false.
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Run the annotation HTTP service.
    Serve {
        /// Candidate sentences, one per line.
        #[arg(long, value_name = "FILE")]
        pool: PathBuf,
        /// Number of sentences to sample from the pool (all when omitted).
        #[arg(long)]
        pool_size: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated annotator ids to register at start-up.
        #[arg(long, value_delimiter = ',')]
        annotators: Vec<String>,
        /// Append-only score log; replayed on start-up.
        #[arg(long, value_name = "FILE")]
        log: Option<PathBuf>,
        #[arg(long)]
        port: Option<u16>,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// `phase_one_first` or `task_major`.
        #[arg(long)]
        policy: Option<QueuePolicy>,
    },
}

#[derive(Debug, Subcommand)]
enum VocabCommand {
    /// Character vocabulary from monolingual and mixed streams.
    Build {
        #[arg(long, value_name = "FILE")]
        hok: Vec<PathBuf>,
        #[arg(long, value_name = "FILE")]
        zh: Vec<PathBuf>,
        /// Rendered code-mixed text (`c_@` for Hokkien characters).
        #[arg(long, value_name = "FILE")]
        mixed: Vec<PathBuf>,
        /// Comma-separated special tokens, placed first.
        #[arg(long, value_delimiter = ',')]
        specials: Option<Vec<String>>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Write new characters into `[unusedN]` slots of an existing vocabulary.
    ReplaceUnused {
        #[arg(long, value_name = "FILE")]
        base: PathBuf,
        /// One character per line.
        #[arg(long, value_name = "FILE")]
        chars: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct LexArgs {
    /// Lexicon TSV.
    #[arg(long, value_name = "FILE")]
    lexicon: Option<PathBuf>,
    /// Custom lexicon whose senses take precedence.
    #[arg(long, value_name = "FILE")]
    custom: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct NormArgs {
    /// Reading-normalization TSV.
    #[arg(long, value_name = "FILE")]
    readings: Option<PathBuf>,
    /// Allowed character set; no character filter when omitted.
    #[arg(long, value_name = "FILE")]
    charset: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct IoArgs {
    /// Input lines (stdin when omitted).
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Output (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn parse_ratios(s: &str) -> Result<[u32; 3], String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(format!("expected train:valid:test, got `{s}`"));
    };
    let num = |p: &str| p.trim().parse::<u32>().map_err(|e| format!("`{p}`: {e}"));
    let ratios = [num(a)?, num(b)?, num(c)?];
    if ratios.iter().all(|&r| r == 0) {
        return Err("ratios must not all be zero".into());
    }
    Ok(ratios)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_input(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) => read_text(p),
        None => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .context("reading stdin")?;
            Ok(s)
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn json_line<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn load_lexicon(args: &LexArgs, cfg: &FileConfig) -> Result<Lexicon> {
    let path = args
        .lexicon
        .as_ref()
        .or(cfg.lexicon.as_ref())
        .ok_or_else(|| {
            UsageError("a lexicon is required (--lexicon or `lexicon` in --config)".into())
        })?;
    let base =
        Lexicon::load(path).with_context(|| format!("loading lexicon {}", path.display()))?;
    match args.custom.as_ref().or(cfg.custom.as_ref()) {
        Some(p) => {
            let custom = Lexicon::load(p)
                .with_context(|| format!("loading custom lexicon {}", p.display()))?;
            Ok(Lexicon::merge_custom(&base, &custom))
        }
        None => Ok(base),
    }
}

fn load_norm(args: &NormArgs, cfg: &FileConfig) -> Result<(ReadingMap, Option<Charset>)> {
    let readings = match args.readings.as_ref().or(cfg.readings.as_ref()) {
        Some(p) => {
            ReadingMap::load(p).with_context(|| format!("loading readings {}", p.display()))?
        }
        None => ReadingMap::default(),
    };
    let charset = match args.charset.as_ref().or(cfg.charset.as_ref()) {
        Some(p) => {
            Some(Charset::load(p).with_context(|| format!("loading charset {}", p.display()))?)
        }
        None => None,
    };
    Ok((readings, charset))
}

fn report_to_stderr(report: &NormalizationReport) -> Result<()> {
    eprintln!("{}", serde_json::to_string(report)?);
    Ok(())
}

fn read_corpus(path: &Path) -> Result<Vec<CorpusRecord>> {
    let text = read_text(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .with_context(|| format!("{}:{}: bad corpus record", path.display(), i + 1))
        })
        .collect()
}

fn non_empty_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty())
}

fn parse_label(line: &str) -> Result<bool> {
    match line {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        other => serde_json::from_value::<AgreementLabel>(serde_json::Value::String(other.into()))
            .map(AgreementLabel::binarize)
            .map_err(|_| anyhow!("unknown label `{other}`")),
    }
}

fn read_labels(path: &Path) -> Result<Vec<bool>> {
    let text = read_text(path)?;
    non_empty_lines(&text)
        .map(|l| parse_label(l).with_context(|| path.display().to_string()))
        .collect()
}

#[derive(Serialize)]
struct SegmentLine<'a> {
    line: usize,
    #[serde(flatten)]
    sentence: &'a hokmix::SegmentedSentence,
}

#[derive(Serialize)]
struct MaskLine {
    line: usize,
    tokens: Vec<String>,
    masked: Vec<usize>,
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Normalize { lex, norm, io } => {
            let lexicon = load_lexicon(&lex, &cfg)?;
            let (readings, charset) = load_norm(&norm, &cfg)?;
            let normalizer = Normalizer {
                readings: &readings,
                lexicon: &lexicon,
                charset: charset.as_ref(),
            };
            let text = read_input(io.input.as_deref())?;
            let mut out = output(io.out.as_deref())?;
            let mut report = NormalizationReport::default();
            for line in non_empty_lines(&text) {
                let (kept, r) = normalizer.process(line);
                report = report.merge(r);
                if let Some(k) = kept {
                    writeln!(out, "{k}")?;
                }
            }
            out.flush()?;
            report_to_stderr(&report)
        }
        Command::Segment {
            lex,
            io,
            pos,
            chunks,
        } => {
            let lexicon = load_lexicon(&lex, &cfg)?;
            let text = read_input(io.input.as_deref())?;
            let mut out = output(io.out.as_deref())?;
            for (i, line) in non_empty_lines(&text).enumerate() {
                if chunks {
                    let sentence = analyze(line, &lexicon);
                    json_line(
                        &mut *out,
                        &SegmentLine {
                            line: i + 1,
                            sentence: &sentence,
                        },
                    )?;
                } else {
                    writeln!(out, "{}", segment(line, &lexicon).display_line(pos))?;
                }
            }
            out.flush()?;
            Ok(())
        }
        Command::Synthesize {
            lex,
            norm,
            mode,
            input,
            out,
            keep_unswitched,
            jobs,
        } => {
            let lexicon = load_lexicon(&lex, &cfg)?;
            let (readings, charset) = load_norm(&norm, &cfg)?;
            let normalizer = Normalizer {
                readings: &readings,
                lexicon: &lexicon,
                charset: charset.as_ref(),
            };
            let pairs = ParallelPair::parse_tsv(&read_text(&input)?)
                .with_context(|| format!("parsing {}", input.display()))?;
            let opts = SynthesisOptions {
                mode: mode.or(cfg.mode).unwrap_or(Mode::Cm),
                keep_unswitched,
            };
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.or(cfg.jobs).unwrap_or(0))
                .build()?;
            let result = pool.install(|| synthesize_corpus(&pairs, &lexicon, &normalizer, opts));
            let mut w = output(out.as_deref())?;
            for record in &result.records {
                json_line(&mut *w, record)?;
            }
            w.flush()?;
            report_to_stderr(&result.report)
        }
        Command::Stats {
            input,
            per_sentence,
        } => {
            let records = read_corpus(&input)?;
            let sentences = records
                .iter()
                .map(|r| r.to_sentence().map_err(|e| anyhow!("record {}: {e}", r.id)))
                .collect::<Result<Vec<_>>>()?;
            let mut out = output(None)?;
            if per_sentence {
                writeln!(out, "id\tcmi\tspf")?;
                for s in &sentences {
                    let seq = LangSeq::from(s);
                    let cmi = compute_cmi(&seq).unwrap_or(0.0);
                    writeln!(out, "{}\t{cmi:.6}\t{:.6}", s.source_id, compute_spf(&seq))?;
                }
            } else {
                let stats = corpus_stats(&sentences);
                writeln!(out, "sentences\tcmi\tspf\tsymbol_coverage")?;
                writeln!(
                    out,
                    "{}\t{:.6}\t{:.6}\t{:.6}",
                    stats.sentence_count, stats.cmi_mean, stats.spf_mean, stats.symbol_coverage
                )?;
            }
            out.flush()?;
            Ok(())
        }
        Command::Split {
            input,
            out_dir,
            seed,
            pad_ids,
            ratios,
        } => {
            let text = read_text(&input)?;
            let rows = non_empty_lines(&text)
                .enumerate()
                .map(|(i, l)| {
                    let v: serde_json::Value = serde_json::from_str(l)
                        .with_context(|| format!("{}:{}", input.display(), i + 1))?;
                    if !v["id"].is_string() {
                        bail!("{}:{}: record has no string `id`", input.display(), i + 1);
                    }
                    Ok(v)
                })
                .collect::<Result<Vec<_>>>()?;
            let pad: BTreeSet<String> = match pad_ids {
                Some(p) => non_empty_lines(&read_text(&p)?)
                    .map(str::to_string)
                    .collect(),
                None => BTreeSet::new(),
            };
            let [a, b, c] = ratios.or(cfg.ratios).unwrap_or([8, 1, 1]);
            let spec = SplitSpec {
                ratios: (a, b, c),
                seed: seed.or(cfg.seed).unwrap_or(0),
                pad_ids: pad,
            };
            let split = split_corpus(rows, &spec, |v| v["id"].as_str().unwrap_or_default())?;
            fs::create_dir_all(&out_dir)
                .with_context(|| format!("creating {}", out_dir.display()))?;
            let meta = write_split(&split, &spec, &out_dir)?;
            println!("{}", serde_json::to_string(&meta)?);
            Ok(())
        }
        Command::Vocab(VocabCommand::Build {
            hok,
            zh,
            mixed,
            specials,
            out,
        }) => {
            let mut texts = Vec::new();
            for (label, paths) in [
                (StreamLabel::Hok, &hok),
                (StreamLabel::Zh, &zh),
                (StreamLabel::Mixed, &mixed),
            ] {
                for p in paths {
                    texts.push((label, read_text(p)?));
                }
            }
            if texts.is_empty() {
                return Err(UsageError("give at least one of --hok, --zh, --mixed".into()).into());
            }
            let streams: Vec<CorpusStream<'_>> = texts
                .iter()
                .map(|(label, text)| CorpusStream {
                    label: *label,
                    text,
                })
                .collect();
            let specials: Vec<String> =
                specials.unwrap_or_else(|| XLM_SPECIALS.iter().map(|s| s.to_string()).collect());
            let specials: Vec<&str> = specials.iter().map(String::as_str).collect();
            let vocab = build_vocab(&streams, &specials)?;
            let mut w = output(out.as_deref())?;
            w.write_all(vocab.to_text().as_bytes())?;
            w.flush()?;
            Ok(())
        }
        Command::Vocab(VocabCommand::ReplaceUnused { base, chars, out }) => {
            let base = Vocab::load(&base).with_context(|| format!("loading {}", base.display()))?;
            let text = read_text(&chars)?;
            let new: Vec<&str> = non_empty_lines(&text).collect();
            let vocab = replace_unused(&base, &new)?;
            let mut w = output(out.as_deref())?;
            w.write_all(vocab.to_text().as_bytes())?;
            w.flush()?;
            Ok(())
        }
        Command::MaskPreview {
            vocab,
            input,
            base_p,
            multiplier,
            seed,
            unk,
        } => {
            let vocab =
                Vocab::load(&vocab).with_context(|| format!("loading {}", vocab.display()))?;
            let base_p = base_p.or(cfg.base_p).unwrap_or(DEFAULT_BASE_P);
            let multiplier = multiplier.or(cfg.multiplier).unwrap_or(DEFAULT_MULTIPLIER);
            let seed = seed.or(cfg.seed).unwrap_or(0);
            let text = read_input(input.as_deref())?;
            let mut out = output(None)?;
            for (i, line) in non_empty_lines(&text).enumerate() {
                let tokens: Vec<&str> = line.split_whitespace().collect();
                let ids = vocab.encode(tokens.iter().copied(), &unk)?;
                // each line gets its own stream so previews do not depend on line order
                let plan = plan_mlm_masks(
                    &ids,
                    &vocab,
                    base_p,
                    multiplier,
                    seed.wrapping_add(i as u64),
                )?;
                let entry = MaskLine {
                    line: i + 1,
                    tokens: tokens.iter().map(|t| t.to_string()).collect(),
                    masked: plan.positions.into_iter().collect(),
                };
                json_line(&mut *out, &entry)?;
            }
            out.flush()?;
            Ok(())
        }
        Command::Manifest { model } => {
            println!(
                "{}",
                serde_json::to_string_pretty(&emit_stage_manifest(model))?
            );
            Ok(())
        }
        Command::Kappa { a, b } => {
            let kappa = cohen_kappa(&read_labels(&a)?, &read_labels(&b)?)?;
            println!("{kappa:.6}");
            Ok(())
        }
        Command::Serve {
            pool,
            pool_size,
            seed,
            annotators,
            log,
            port,
            host,
            policy,
        } => {
            let text = read_text(&pool)?;
            let sentences: Vec<String> = non_empty_lines(&text).map(str::to_string).collect();
            let tasks = sample_pool(
                &sentences,
                pool_size.or(cfg.pool_size),
                seed.or(cfg.seed).unwrap_or(0),
            );
            let policy = policy.or(cfg.policy).unwrap_or_default();
            let store = match log.as_ref().or(cfg.log.as_ref()) {
                Some(path) => AnnotationStore::open(tasks, policy, path)
                    .with_context(|| format!("opening score log {}", path.display()))?,
                None => AnnotationStore::in_memory(tasks, policy),
            };
            let roster = if annotators.is_empty() {
                cfg.annotators.clone().unwrap_or_default()
            } else {
                annotators
            };
            for a in &roster {
                store
                    .register(a)
                    .with_context(|| format!("registering annotator `{a}`"))?;
            }
            let addr = SocketAddr::new(host, port.or(cfg.port).unwrap_or(8080));
            eprintln!("serving {} tasks on http://{addr}", store.tasks().len());
            let runtime = tokio::runtime::Runtime::new()?;
            runtime
                .block_on(hokmix_service::serve(Arc::new(store), addr))
                .with_context(|| format!("serving on {addr}"))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
