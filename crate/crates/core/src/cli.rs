//! Command-line front end: `augment`, `analyze`, `export` and `dump-prompts`.
//!
//! Every option can also come from a flat `key = value` config file passed
//! with `--config`; keys are the long flag names without the leading dashes.
//! Flags win over the file, the file wins over built-in defaults.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::augment::{sample_to_ratio, target_count, Method};
use crate::corpus_io::{
    load_corpus, load_corpus_with, write_pairs, Corpus, Format, LanguageTag, Origin, ParentCheck,
    SentencePair,
};
use crate::metrics::{diversity_report, ConfigEcho, DiversityReport, EmbeddingProvider, EmbeddingTable};
use crate::pipeline::{generate, Reject};
use crate::prompt::{render_prompt, template, PromptKind, Strategy};
use crate::provider::{DiskCache, Provider, ProviderConfig, DEFAULT_CACHE_DIR};

pub const AUGMENTED_FILE: &str = "augmented.jsonl";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const REJECTS_FILE: &str = "rejects.jsonl";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_TABLE: &str = "report.txt";

#[derive(Debug, Parser)]
#[command(name = "parasynth", version, about = "Grow a parallel corpus with LLM prompts and measure how diverse the result is")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic pairs and write the augmented corpus.
    Augment(AugmentArgs),
    /// Compare synthetic target sentences with their originals.
    Analyze(AnalyzeArgs),
    /// Re-export an augmented corpus, optionally split by origin.
    Export(ExportArgs),
    /// Print the prompt templates, or the rendered prompts for a corpus.
    DumpPrompts(DumpArgs),
}

#[derive(Debug, Clone, Args, Default)]
pub struct LangArgs {
    /// Source language as `Name:iso`
    #[arg(long)]
    pub src_lang: Option<String>,
    /// Target language as `Name:iso`
    #[arg(long)]
    pub tgt_lang: Option<String>,
}

#[derive(Debug, Clone, Args, Default)]
pub struct AugmentArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Input corpus format
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, value_enum)]
    pub strategy: Option<Method>,
    /// Variants per side, translations, or story sentences
    #[arg(long)]
    pub n: Option<usize>,
    /// Synthetic pairs per original pair (0.5 to 3.0 are the usual presets)
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long)]
    pub base_url: Option<String>,
    /// Use the offline mock model
    #[arg(long)]
    pub mock: bool,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub max_tokens: Option<u32>,
    /// Per-request timeout in seconds
    #[arg(long)]
    pub timeout: Option<u64>,
    #[arg(long)]
    pub max_retries: Option<u32>,
    #[arg(long)]
    pub concurrency: Option<usize>,
    /// Requests per minute; unlimited when unset
    #[arg(long)]
    pub rpm: Option<u32>,
    /// Abort when more than this fraction of requests fail permanently
    #[arg(long)]
    pub max_failure_rate: Option<f64>,
    #[command(flatten)]
    pub langs: LangArgs,
}

#[derive(Debug, Clone, Args, Default)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Original corpus the synthetic pairs were derived from
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Augmented corpus (JSONL) to analyze
    #[arg(long)]
    pub augmented: PathBuf,
    /// Directory for report.json and report.txt
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `mock` or `file:PATH`
    #[arg(long)]
    pub embeddings: Option<String>,
    #[command(flatten)]
    pub langs: LangArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Split {
    #[default]
    All,
    Originals,
    Synthetics,
}

#[derive(Debug, Clone, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub augmented: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "jsonl")]
    pub format: Format,
    #[arg(long, value_enum, default_value = "all")]
    pub split: Split,
}

#[derive(Debug, Clone, Args, Default)]
pub struct DumpArgs {
    #[arg(long, value_enum)]
    pub strategy: Option<Method>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Render prompts for every pair of this corpus instead of the templates
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[command(flatten)]
    pub langs: LangArgs,
}

/// Flat `key = value` settings file.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

const CONFIG_KEYS: &[&str] = &[
    "input", "out", "format", "strategy", "n", "ratio", "seed", "model", "temperature",
    "base-url", "mock", "cache-dir", "max-tokens", "timeout", "max-retries", "concurrency", "rpm",
    "max-failure-rate", "src-lang", "tgt-lang", "embeddings",
];

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("config line {}: expected `key = value`", i + 1))?;
            let key = key.trim().trim_start_matches("--").replace('_', "-");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                bail!("config line {}: unknown key `{key}`", i + 1);
            }
            let value = value.trim().trim_matches('"').to_string();
            values.insert(key, value);
        }
        Ok(Self { values })
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                Self::parse(&text).with_context(|| format!("in config {}", p.display()))
            }
        }
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.values
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow::anyhow!("config key `{key}`: {e}")))
            .transpose()
    }

    /// Flag value if given, else the file's value.
    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

/// Everything an `augment` run needs, after merging flags, file and defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub out: PathBuf,
    pub format: Format,
    pub method: Method,
    pub n: usize,
    pub ratio: f64,
    pub seed: u64,
    pub provider: ProviderConfig,
    pub mock: bool,
    pub cache_dir: PathBuf,
    pub src_lang: LanguageTag,
    pub tgt_lang: LanguageTag,
    pub max_failure_rate: f64,
}

/// Count used when `--n` is not given: one paraphrase per side, three
/// translations, three story sentences.
pub fn default_n(method: Method) -> usize {
    match method {
        Method::Paraphrase => 1,
        Method::MultiTarget => 3,
        Method::Storytelling => Strategy::DEFAULT_STORY_SENTENCES,
    }
}

fn resolve_langs(langs: &LangArgs, file: &ConfigFile) -> Result<(LanguageTag, LanguageTag)> {
    let src = file
        .pick(langs.src_lang.clone(), "src-lang")?
        .unwrap_or_else(|| "Korean:ko".into());
    let tgt = file
        .pick(langs.tgt_lang.clone(), "tgt-lang")?
        .unwrap_or_else(|| "German:de".into());
    Ok((src.parse()?, tgt.parse()?))
}

fn format_for(path: &Path, explicit: Option<Format>) -> Format {
    explicit.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some("tsv") | Some("txt") => Format::Tsv,
        _ => Format::Jsonl,
    })
}

impl RunConfig {
    pub fn resolve(args: &AugmentArgs) -> Result<Self> {
        let file = ConfigFile::load(args.config.as_deref())?;
        let input: PathBuf = file.pick(args.input.clone(), "input")?.context("--input is required")?;
        let out: PathBuf = file.pick(args.out.clone(), "out")?.context("--out is required")?;
        let format = match args.format {
            Some(f) => Some(f),
            None => file.values.get("format").map(|s| parse_format(s)).transpose().map_err(anyhow::Error::msg)?,
        };
        let format = format_for(&input, format);
        let method = match args.strategy {
            Some(m) => m,
            None => file.get::<Method>("strategy")?.unwrap_or(Method::Storytelling),
        };
        let n = file.pick(args.n, "n")?.unwrap_or_else(|| default_n(method));
        let mock = args.mock || file.get::<bool>("mock")?.unwrap_or(false);
        let defaults = ProviderConfig::default();
        let model = file.pick(args.model.clone(), "model")?;
        let provider = ProviderConfig {
            base_url: file.pick(args.base_url.clone(), "base-url")?.unwrap_or(defaults.base_url),
            model: match (mock, model) {
                (_, Some(m)) => m,
                (true, None) => "mock".into(),
                (false, None) => defaults.model,
            },
            temperature: file.pick(args.temperature, "temperature")?.unwrap_or(defaults.temperature),
            max_output_tokens: file.pick(args.max_tokens, "max-tokens")?.unwrap_or(defaults.max_output_tokens),
            request_timeout: file
                .pick(args.timeout, "timeout")?
                .map_or(defaults.request_timeout, Duration::from_secs),
            max_retries: file.pick(args.max_retries, "max-retries")?.unwrap_or(defaults.max_retries),
            max_concurrency: file.pick(args.concurrency, "concurrency")?.unwrap_or(defaults.max_concurrency),
            requests_per_minute: file.pick(args.rpm, "rpm")?,
            ..defaults
        };
        provider.validate()?;
        let (src_lang, tgt_lang) = resolve_langs(&args.langs, &file)?;
        let config = RunConfig {
            input,
            out,
            format,
            method,
            n,
            ratio: file.pick(args.ratio, "ratio")?.unwrap_or(1.0),
            seed: file.pick(args.seed, "seed")?.unwrap_or(0),
            provider,
            mock,
            cache_dir: file
                .pick(args.cache_dir.clone(), "cache-dir")?
                .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR)),
            src_lang,
            tgt_lang,
            max_failure_rate: file.pick(args.max_failure_rate, "max-failure-rate")?.unwrap_or(0.1),
        };
        if config.n == 0 {
            bail!("--n must be at least 1");
        }
        if !(config.ratio.is_finite() && config.ratio > 0.0) {
            bail!("--ratio must be positive, got {}", config.ratio);
        }
        if !(0.0..=1.0).contains(&config.max_failure_rate) {
            bail!("--max-failure-rate must lie in [0, 1]");
        }
        Ok(config)
    }
}

/// Written next to every augmented corpus; enough to re-run it exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub input_sha256: String,
    pub strategy: Method,
    pub n: usize,
    pub ratio: f64,
    pub seed: u64,
    pub provider: String,
    pub model: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub src_lang: LanguageTag,
    pub tgt_lang: LanguageTag,
    pub original_count: usize,
    pub pool_size: usize,
    pub target_count: usize,
    pub counts_by_origin: BTreeMap<String, usize>,
    pub prompts: usize,
    pub rejects: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentSummary {
    pub augmented_path: PathBuf,
    pub manifest: Manifest,
    pub cache_hits: usize,
    pub requests: usize,
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn write_rejects(path: &Path, rejects: &[Reject]) -> Result<()> {
    let mut text = String::new();
    for r in rejects {
        text.push_str(&serde_json::to_string(r)?);
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn cmd_augment(config: &RunConfig) -> Result<AugmentSummary> {
    let corpus = load_corpus(&config.input, config.format, (&config.src_lang, &config.tgt_lang))
        .with_context(|| format!("loading {}", config.input.display()))?;
    let originals: Vec<SentencePair> = corpus.originals().cloned().collect();
    if originals.is_empty() {
        bail!("{} has no original pairs", config.input.display());
    }
    let required = target_count(config.ratio, originals.len())?;
    fs::create_dir_all(&config.out).with_context(|| format!("creating {}", config.out.display()))?;

    let cache = DiskCache::open(&config.cache_dir)?;
    let provider = if config.mock {
        Provider::mock(config.provider.clone(), Some(cache))?
    } else {
        Provider::http(config.provider.clone(), Some(cache))?
    };
    let generation = generate(&corpus, config.method, config.n, config.seed, &provider)?;
    write_rejects(&config.out.join(REJECTS_FILE), &generation.rejects)?;

    let failure_rate = generation.provider_failures as f64 / generation.prompts.max(1) as f64;
    if failure_rate > config.max_failure_rate {
        bail!(
            "{} of {} requests failed permanently ({:.1}% > {:.1}% allowed); see {}",
            generation.provider_failures,
            generation.prompts,
            100.0 * failure_rate,
            100.0 * config.max_failure_rate,
            config.out.join(REJECTS_FILE).display()
        );
    }

    let selected = sample_to_ratio(&generation.pool, originals.len(), config.ratio, config.seed)?;
    let mut output = originals.clone();
    output.extend(selected);
    let augmented_path = config.out.join(AUGMENTED_FILE);
    write_pairs(&output, &augmented_path, Format::Jsonl)?;

    let mut counts_by_origin = BTreeMap::new();
    for p in &output {
        *counts_by_origin.entry(p.origin.as_str().to_string()).or_insert(0) += 1;
    }
    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION").into(),
        input_sha256: sha256_file(&config.input)?,
        strategy: config.method,
        n: config.n,
        ratio: config.ratio,
        seed: config.seed,
        provider: if config.mock { "mock".into() } else { config.provider.base_url.clone() },
        model: config.provider.model.clone(),
        temperature: config.provider.temperature,
        max_output_tokens: config.provider.max_output_tokens,
        src_lang: corpus.src_lang.clone(),
        tgt_lang: corpus.tgt_lang.clone(),
        original_count: originals.len(),
        pool_size: generation.pool.len(),
        target_count: required,
        counts_by_origin,
        prompts: generation.prompts,
        rejects: generation.rejects.len(),
        warnings: generation.warnings,
    };
    write_json(&config.out.join(MANIFEST_FILE), &manifest)?;
    Ok(AugmentSummary {
        augmented_path,
        manifest,
        cache_hits: provider.cache_hits(),
        requests: provider.calls(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeConfig {
    pub input: PathBuf,
    pub format: Format,
    pub augmented: PathBuf,
    pub out: Option<PathBuf>,
    pub embeddings: EmbeddingChoice,
    pub src_lang: LanguageTag,
    pub tgt_lang: LanguageTag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbeddingChoice {
    Mock,
    File(PathBuf),
}

impl FromStr for EmbeddingChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mock" => Ok(EmbeddingChoice::Mock),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(EmbeddingChoice::File(PathBuf::from(p))),
                _ => Err(format!("expected `mock` or `file:PATH`, got `{s}`")),
            },
        }
    }
}

impl AnalyzeConfig {
    pub fn resolve(args: &AnalyzeArgs) -> Result<Self> {
        let file = ConfigFile::load(args.config.as_deref())?;
        let input: PathBuf = file.pick(args.input.clone(), "input")?.context("--input is required")?;
        let format = match args.format {
            Some(f) => Some(f),
            None => file.values.get("format").map(|s| parse_format(s)).transpose().map_err(anyhow::Error::msg)?,
        };
        let (src_lang, tgt_lang) = resolve_langs(&args.langs, &file)?;
        Ok(Self {
            format: format_for(&input, format),
            input,
            augmented: args.augmented.clone(),
            out: file.pick(args.out.clone(), "out")?,
            embeddings: match &args.embeddings {
                Some(e) => e.parse().map_err(anyhow::Error::msg)?,
                None => file.get("embeddings")?.unwrap_or(EmbeddingChoice::Mock),
            },
            src_lang,
            tgt_lang,
        })
    }
}

/// Reads the manifest written next to `augmented`, if there is one.
fn sibling_manifest(augmented: &Path) -> Result<Option<Manifest>> {
    let path = augmented.with_file_name(MANIFEST_FILE);
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path)?;
    Ok(Some(serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?))
}

pub fn cmd_analyze(config: &AnalyzeConfig) -> Result<DiversityReport> {
    let originals = load_corpus(&config.input, config.format, (&config.src_lang, &config.tgt_lang))
        .with_context(|| format!("loading {}", config.input.display()))?;
    let augmented = load_corpus_with(
        &config.augmented,
        Format::Jsonl,
        (&config.src_lang, &config.tgt_lang),
        ParentCheck::Skip,
    )
    .with_context(|| format!("loading {}", config.augmented.display()))?;
    let synthetics: Vec<SentencePair> = augmented.synthetics().cloned().collect();
    let provider = match &config.embeddings {
        EmbeddingChoice::Mock => EmbeddingProvider::Mock,
        EmbeddingChoice::File(p) => EmbeddingProvider::File(EmbeddingTable::load(p)?),
    };
    let manifest = sibling_manifest(&config.augmented)?;
    let echo = match &manifest {
        Some(m) => ConfigEcho {
            strategy: m.strategy.to_string(),
            n: m.n,
            model: m.model.clone(),
            temperature: m.temperature,
            max_output_tokens: m.max_output_tokens,
            seed: m.seed,
            embeddings: provider.source(),
        },
        None => {
            let defaults = ProviderConfig::default();
            let strategy = synthetics.first().map_or("unknown", |p| match p.origin {
                Origin::Paraphrase => "paraphrase",
                Origin::MultiTarget => "multi-target",
                Origin::Storytelling => "storytelling",
                Origin::Original => "unknown",
            });
            ConfigEcho {
                strategy: strategy.into(),
                n: 0,
                model: defaults.model,
                temperature: defaults.temperature,
                max_output_tokens: defaults.max_output_tokens,
                seed: 0,
                embeddings: provider.source(),
            }
        }
    };
    let report = diversity_report(&originals, &synthetics, &provider, echo)?;
    if let Some(out) = &config.out {
        fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        write_json(&out.join(REPORT_JSON), &report)?;
        fs::write(out.join(REPORT_TABLE), report.render_table())?;
    }
    Ok(report)
}

/// Returns the number of records written.
pub fn cmd_export(args: &ExportArgs) -> Result<usize> {
    // languages come from the records; the fallback only matters for empty files
    let (src, tgt) = (LanguageTag::new("Source", "xx")?, LanguageTag::new("Target", "xx")?);
    let corpus: Corpus = load_corpus_with(&args.augmented, Format::Jsonl, (&src, &tgt), ParentCheck::Skip)
        .with_context(|| format!("loading {}", args.augmented.display()))?;
    let pairs: Vec<SentencePair> = corpus
        .pairs()
        .iter()
        .filter(|p| match args.split {
            Split::All => true,
            Split::Originals => p.is_original(),
            Split::Synthetics => !p.is_original(),
        })
        .cloned()
        .collect();
    write_pairs(&pairs, &args.out, args.format)?;
    Ok(pairs.len())
}

pub fn cmd_dump_prompts(args: &DumpArgs) -> Result<String> {
    let methods = match args.strategy {
        Some(m) => vec![m],
        None => vec![Method::Paraphrase, Method::MultiTarget, Method::Storytelling],
    };
    let mut out = String::new();
    match &args.input {
        None => {
            for m in methods {
                for s in m.strategies(args.n.unwrap_or_else(|| default_n(m)))? {
                    writeln!(out, "## {}\n{}\n", s.kind(), template(s))?;
                }
            }
        }
        Some(input) => {
            let file = ConfigFile::default();
            let (src, tgt) = resolve_langs(&args.langs, &file)?;
            let corpus = load_corpus(input, format_for(input, args.format), (&src, &tgt))?;
            for pair in corpus.originals() {
                for &m in &methods {
                    for s in m.strategies(args.n.unwrap_or_else(|| default_n(m)))? {
                        let p = render_prompt(s, pair)?;
                        writeln!(out, "## {} {}\n{}\n", pair.id, s.kind(), p.text)?;
                    }
                }
            }
        }
    }
    Ok(out)
}

fn print_augment(summary: &AugmentSummary) {
    let m = &summary.manifest;
    println!(
        "{} originals, pool {}, target {} ({}x, seed {})",
        m.original_count, m.pool_size, m.target_count, m.ratio, m.seed
    );
    for (origin, count) in &m.counts_by_origin {
        println!("  {origin:<14} {count}");
    }
    println!(
        "cache hits {}/{}; rejects {}; warnings {}",
        summary.cache_hits,
        summary.requests,
        m.rejects,
        m.warnings.len()
    );
    println!("wrote {}", summary.augmented_path.display());
}

/// Runs a parsed command line, printing results to stdout.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Augment(args) => {
            let config = RunConfig::resolve(&args)?;
            print_augment(&cmd_augment(&config)?);
        }
        Command::Analyze(args) => {
            let report = cmd_analyze(&AnalyzeConfig::resolve(&args)?)?;
            print!("{}", report.render_table());
        }
        Command::Export(args) => {
            let n = cmd_export(&args)?;
            println!("wrote {n} records to {}", args.out.display());
        }
        Command::DumpPrompts(args) => print!("{}", cmd_dump_prompts(&args)?),
    }
    Ok(())
}

/// Kinds named in the templates listing; handy for auditing tools.
pub fn prompt_kinds() -> BTreeSet<&'static str> {
    PromptKind::ALL.iter().map(|k| k.as_str()).collect()
}
