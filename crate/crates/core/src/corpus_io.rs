//! Parallel corpus types and their on-disk formats.
//!
//! Two formats are supported:
//!
//! - **TSV**: `id<TAB>source<TAB>target`, one pair per line, no header. A line
//!   with only two columns gets a synthesized id (`L` + 7-digit line ordinal).
//!   Provenance is not stored, so every TSV record loads as an original pair.
//! - **JSONL**: one object per line carrying every [`SentencePair`] field. This
//!   is the lossless format used for augmented corpora.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use regex::Regex;
use serde::{Deserialize, Serialize};
use std::sync::LazyLock;

static ISO_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new("^[a-z]{2,3}$").unwrap());

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate pair id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: empty {field} sentence")]
    EmptySentence { line: usize, field: &'static str },
    #[error("invalid language tag: {0}")]
    InvalidLanguage(String),
    #[error("invalid sentence pair `{id}`: {message}")]
    InvalidPair { id: String, message: String },
}

pub type Result<T, E = CorpusError> = std::result::Result<T, E>;

/// Language name as used inside prompts plus a short code for file naming.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LanguageTagRepr", into = "LanguageTagRepr")]
pub struct LanguageTag {
    code: String,
    iso: String,
}

#[derive(Serialize, Deserialize)]
struct LanguageTagRepr {
    code: String,
    iso: String,
}

impl TryFrom<LanguageTagRepr> for LanguageTag {
    type Error = CorpusError;

    fn try_from(repr: LanguageTagRepr) -> Result<Self> {
        LanguageTag::new(repr.code, repr.iso)
    }
}

impl From<LanguageTag> for LanguageTagRepr {
    fn from(tag: LanguageTag) -> Self {
        LanguageTagRepr {
            code: tag.code,
            iso: tag.iso,
        }
    }
}

impl LanguageTag {
    pub fn new(code: impl Into<String>, iso: impl Into<String>) -> Result<Self> {
        let code = code.into();
        let iso = iso.into();
        if code.trim().is_empty() || code.contains(['\n', '\r']) {
            return Err(CorpusError::InvalidLanguage(format!(
                "language name {code:?} must be non-empty and single-line"
            )));
        }
        if !ISO_RE.is_match(&iso) {
            return Err(CorpusError::InvalidLanguage(format!(
                "language code {iso:?} must be 2-3 lowercase letters"
            )));
        }
        Ok(Self { code, iso })
    }

    /// Name substituted into prompt templates, e.g. `Korean`.
    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn iso(&self) -> &str {
        &self.iso
    }
}

impl fmt::Display for LanguageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.code, self.iso)
    }
}

/// Parses `Name:iso`, e.g. `Korean:ko`.
impl FromStr for LanguageTag {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self> {
        let (code, iso) = s.rsplit_once(':').ok_or_else(|| {
            CorpusError::InvalidLanguage(format!("expected `Name:iso`, got {s:?}"))
        })?;
        LanguageTag::new(code.trim(), iso.trim())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Original,
    Paraphrase,
    MultiTarget,
    Storytelling,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Original => "original",
            Origin::Paraphrase => "paraphrase",
            Origin::MultiTarget => "multi_target",
            Origin::Storytelling => "storytelling",
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a synthetic pair sits inside its strategy's output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Derivation {
    None,
    /// Index 0 on either side means the original sentence was kept.
    Paraphrase { src_index: usize, tgt_index: usize },
    MultiTarget { index: usize, duplicate_of_original: bool },
    Storytelling { index: usize },
}

impl Derivation {
    fn matches(&self, origin: Origin) -> bool {
        matches!(
            (origin, self),
            (Origin::Original, Derivation::None)
                | (Origin::Paraphrase, Derivation::Paraphrase { .. })
                | (Origin::MultiTarget, Derivation::MultiTarget { .. })
                | (Origin::Storytelling, Derivation::Storytelling { .. })
        )
    }
}

/// Flat JSON shape of [`Derivation`]; which keys are present depends on the origin.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DerivationRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    src_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tgt_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    duplicate_of_original: Option<bool>,
}

impl DerivationRecord {
    fn from_derivation(d: &Derivation) -> Self {
        match *d {
            Derivation::None => Self::default(),
            Derivation::Paraphrase {
                src_index,
                tgt_index,
            } => Self {
                src_index: Some(src_index),
                tgt_index: Some(tgt_index),
                ..Self::default()
            },
            Derivation::MultiTarget {
                index,
                duplicate_of_original,
            } => Self {
                index: Some(index),
                duplicate_of_original: Some(duplicate_of_original),
                ..Self::default()
            },
            Derivation::Storytelling { index } => Self {
                index: Some(index),
                ..Self::default()
            },
        }
    }

    fn into_derivation(self, origin: Origin) -> std::result::Result<Derivation, String> {
        let d = match (origin, self) {
            (
                Origin::Original,
                DerivationRecord {
                    src_index: None,
                    tgt_index: None,
                    index: None,
                    duplicate_of_original: None,
                },
            ) => Derivation::None,
            (
                Origin::Paraphrase,
                DerivationRecord {
                    src_index: Some(src_index),
                    tgt_index: Some(tgt_index),
                    index: None,
                    duplicate_of_original: None,
                },
            ) => Derivation::Paraphrase {
                src_index,
                tgt_index,
            },
            (
                Origin::MultiTarget,
                DerivationRecord {
                    src_index: None,
                    tgt_index: None,
                    index: Some(index),
                    duplicate_of_original,
                },
            ) => Derivation::MultiTarget {
                index,
                duplicate_of_original: duplicate_of_original.unwrap_or(false),
            },
            (
                Origin::Storytelling,
                DerivationRecord {
                    src_index: None,
                    tgt_index: None,
                    index: Some(index),
                    duplicate_of_original: None,
                },
            ) => Derivation::Storytelling { index },
            (origin, _) => return Err(format!("derivation fields do not fit origin `{origin}`")),
        };
        Ok(d)
    }
}

/// Trims and folds interior line breaks into single spaces.
pub fn normalize_sentence(text: &str) -> String {
    let trimmed = text.trim();
    if !trimmed.contains(['\n', '\r']) {
        return trimmed.to_string();
    }
    let mut out = String::with_capacity(trimmed.len());
    let mut in_break = false;
    for c in trimmed.chars() {
        if c == '\n' || c == '\r' {
            if !in_break {
                out.push(' ');
                in_break = true;
            }
        } else {
            out.push(c);
            in_break = false;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentencePair {
    pub id: String,
    pub source: String,
    pub target: String,
    pub src_lang: LanguageTag,
    pub tgt_lang: LanguageTag,
    pub origin: Origin,
    pub parent_id: String,
    pub derivation: Derivation,
}

impl SentencePair {
    /// Builds an original (human-translated) pair. Sentence text is normalized.
    pub fn original(
        id: impl Into<String>,
        source: &str,
        target: &str,
        src_lang: LanguageTag,
        tgt_lang: LanguageTag,
    ) -> Result<Self> {
        let id = id.into();
        let pair = SentencePair {
            parent_id: id.clone(),
            id,
            source: normalize_sentence(source),
            target: normalize_sentence(target),
            src_lang,
            tgt_lang,
            origin: Origin::Original,
            derivation: Derivation::None,
        };
        pair.validate()?;
        Ok(pair)
    }

    /// Builds a synthetic pair derived from `parent`.
    pub fn synthetic(
        parent: &SentencePair,
        id: impl Into<String>,
        source: &str,
        target: &str,
        origin: Origin,
        derivation: Derivation,
    ) -> Result<Self> {
        let pair = SentencePair {
            id: id.into(),
            source: normalize_sentence(source),
            target: normalize_sentence(target),
            src_lang: parent.src_lang.clone(),
            tgt_lang: parent.tgt_lang.clone(),
            origin,
            parent_id: parent.id.clone(),
            derivation,
        };
        pair.validate()?;
        Ok(pair)
    }

    pub fn is_original(&self) -> bool {
        self.origin == Origin::Original
    }

    /// Checks the invariants that can be decided from the pair alone.
    pub fn validate(&self) -> Result<()> {
        let fail = |message: String| CorpusError::InvalidPair {
            id: self.id.clone(),
            message,
        };
        if self.id.trim().is_empty() || self.id.contains(['\t', '\n', '\r']) {
            return Err(fail("id must be non-empty with no tabs or line breaks".into()));
        }
        if self.source.trim().is_empty() {
            return Err(fail("empty source sentence".into()));
        }
        if self.target.trim().is_empty() {
            return Err(fail("empty target sentence".into()));
        }
        if !self.derivation.matches(self.origin) {
            return Err(fail(format!(
                "derivation {:?} does not fit origin `{}`",
                self.derivation, self.origin
            )));
        }
        match self.origin {
            Origin::Original if self.parent_id != self.id => {
                Err(fail("original pair must be its own parent".into()))
            }
            Origin::Original => Ok(()),
            _ if self.parent_id == self.id => {
                Err(fail("synthetic pair cannot be its own parent".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub src_lang: LanguageTag,
    pub tgt_lang: LanguageTag,
    pairs: Vec<SentencePair>,
}

impl Corpus {
    pub fn new(src_lang: LanguageTag, tgt_lang: LanguageTag) -> Self {
        Self {
            src_lang,
            tgt_lang,
            pairs: Vec::new(),
        }
    }

    /// Builds a corpus from pairs, checking id uniqueness, language tags and
    /// that every synthetic pair's parent is an original pair in the corpus.
    pub fn from_pairs(
        src_lang: LanguageTag,
        tgt_lang: LanguageTag,
        pairs: Vec<SentencePair>,
    ) -> Result<Self> {
        let mut corpus = Self::new(src_lang, tgt_lang);
        for pair in pairs {
            corpus.push(pair)?;
        }
        corpus.check_parents()?;
        Ok(corpus)
    }

    fn push(&mut self, pair: SentencePair) -> Result<()> {
        pair.validate()?;
        if pair.src_lang != self.src_lang || pair.tgt_lang != self.tgt_lang {
            return Err(CorpusError::InvalidPair {
                id: pair.id.clone(),
                message: format!(
                    "languages {} -> {} differ from corpus {} -> {}",
                    pair.src_lang, pair.tgt_lang, self.src_lang, self.tgt_lang
                ),
            });
        }
        if self.pairs.iter().any(|p| p.id == pair.id) {
            return Err(CorpusError::InvalidPair {
                id: pair.id.clone(),
                message: "duplicate id".into(),
            });
        }
        self.pairs.push(pair);
        Ok(())
    }

    fn check_parents(&self) -> Result<()> {
        let originals: HashSet<&str> = self
            .pairs
            .iter()
            .filter(|p| p.is_original())
            .map(|p| p.id.as_str())
            .collect();
        for p in self.pairs.iter().filter(|p| !p.is_original()) {
            if !originals.contains(p.parent_id.as_str()) {
                return Err(CorpusError::InvalidPair {
                    id: p.id.clone(),
                    message: format!("parent `{}` is not an original pair in the corpus", p.parent_id),
                });
            }
        }
        Ok(())
    }

    pub fn pairs(&self) -> &[SentencePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn originals(&self) -> impl Iterator<Item = &SentencePair> {
        self.pairs.iter().filter(|p| p.is_original())
    }

    pub fn synthetics(&self) -> impl Iterator<Item = &SentencePair> {
        self.pairs.iter().filter(|p| !p.is_original())
    }

    pub fn get(&self, id: &str) -> Option<&SentencePair> {
        self.pairs.iter().find(|p| p.id == id)
    }

    /// Id to pair lookup over the whole corpus.
    pub fn index(&self) -> HashMap<&str, &SentencePair> {
        self.pairs.iter().map(|p| (p.id.as_str(), p)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Tsv,
    Jsonl,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "tsv" => Ok(Format::Tsv),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(format!("unknown corpus format `{other}` (expected tsv or jsonl)")),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    source: String,
    target: String,
    src_lang: LanguageTag,
    tgt_lang: LanguageTag,
    #[serde(default = "default_origin")]
    origin: Origin,
    #[serde(default)]
    parent_id: Option<String>,
    #[serde(default)]
    derivation: Option<DerivationRecord>,
}

fn default_origin() -> Origin {
    Origin::Original
}

fn synthesized_id(line: usize) -> String {
    format!("L{line:07}")
}

/// How strictly parent links are checked on load.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParentCheck {
    /// Every synthetic pair's parent must be an original pair in the same file.
    Resolve,
    /// Parent ids are kept as-is; used for synthetic-only subsets.
    Skip,
}

/// Loads a corpus with full parent-link validation.
///
/// TSV carries no language information, so `langs` supplies it. For JSONL the
/// tags come from the records and `langs` is used only when the file is empty.
pub fn load_corpus(path: &Path, format: Format, langs: (&LanguageTag, &LanguageTag)) -> Result<Corpus> {
    load_corpus_with(path, format, langs, ParentCheck::Resolve)
}

pub fn load_corpus_with(
    path: &Path,
    format: Format,
    langs: (&LanguageTag, &LanguageTag),
    parents: ParentCheck,
) -> Result<Corpus> {
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let records = match format {
        Format::Tsv => parse_tsv(&text, langs)?,
        Format::Jsonl => parse_jsonl(&text)?,
    };

    let (src_lang, tgt_lang) = match records.first() {
        Some((_, p)) if format == Format::Jsonl => (p.src_lang.clone(), p.tgt_lang.clone()),
        _ => (langs.0.clone(), langs.1.clone()),
    };
    let mut corpus = Corpus::new(src_lang, tgt_lang);
    let mut seen = HashSet::with_capacity(records.len());
    let mut original_lines: HashMap<String, usize> = HashMap::new();
    for (line, pair) in &records {
        if !seen.insert(pair.id.clone()) {
            return Err(CorpusError::DuplicateId {
                line: *line,
                id: pair.id.clone(),
            });
        }
        if pair.src_lang != corpus.src_lang || pair.tgt_lang != corpus.tgt_lang {
            return Err(CorpusError::Malformed {
                line: *line,
                message: format!(
                    "languages {} -> {} differ from the file's {} -> {}",
                    pair.src_lang, pair.tgt_lang, corpus.src_lang, corpus.tgt_lang
                ),
            });
        }
        if pair.is_original() {
            original_lines.insert(pair.id.clone(), *line);
        }
    }
    if parents == ParentCheck::Resolve {
        for (line, pair) in records.iter().filter(|(_, p)| !p.is_original()) {
            if !original_lines.contains_key(&pair.parent_id) {
                return Err(CorpusError::Malformed {
                    line: *line,
                    message: format!("parent `{}` is not an original pair in this file", pair.parent_id),
                });
            }
        }
    }
    corpus.pairs = records.into_iter().map(|(_, p)| p).collect();
    Ok(corpus)
}

fn parse_tsv(text: &str, langs: (&LanguageTag, &LanguageTag)) -> Result<Vec<(usize, SentencePair)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let line = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = raw.split('\t').collect();
        let (id, source, target) = match cols.as_slice() {
            [id, s, t] if !id.trim().is_empty() => (id.trim().to_string(), *s, *t),
            [_, s, t] | [s, t] => (synthesized_id(line), *s, *t),
            _ => {
                return Err(CorpusError::Malformed {
                    line,
                    message: format!("expected 2 or 3 tab-separated columns, found {}", cols.len()),
                })
            }
        };
        out.push((line, build_pair(line, id, source, target, langs.0, langs.1)?));
    }
    Ok(out)
}

fn build_pair(
    line: usize,
    id: String,
    source: &str,
    target: &str,
    src_lang: &LanguageTag,
    tgt_lang: &LanguageTag,
) -> Result<SentencePair> {
    if source.trim().is_empty() {
        return Err(CorpusError::EmptySentence { line, field: "source" });
    }
    if target.trim().is_empty() {
        return Err(CorpusError::EmptySentence { line, field: "target" });
    }
    SentencePair::original(id, source, target, src_lang.clone(), tgt_lang.clone())
        .map_err(|e| CorpusError::Malformed { line, message: e.to_string() })
}

fn parse_jsonl(text: &str) -> Result<Vec<(usize, SentencePair)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let rec: JsonRecord = serde_json::from_str(raw).map_err(|e| CorpusError::Malformed {
            line,
            message: e.to_string(),
        })?;
        if rec.source.trim().is_empty() {
            return Err(CorpusError::EmptySentence { line, field: "source" });
        }
        if rec.target.trim().is_empty() {
            return Err(CorpusError::EmptySentence { line, field: "target" });
        }
        let id = rec
            .id
            .filter(|id| !id.trim().is_empty())
            .unwrap_or_else(|| synthesized_id(line));
        let derivation = rec
            .derivation
            .unwrap_or_default()
            .into_derivation(rec.origin)
            .map_err(|message| CorpusError::Malformed { line, message })?;
        let parent_id = match rec.parent_id {
            Some(p) => p,
            None if rec.origin == Origin::Original => id.clone(),
            None => {
                return Err(CorpusError::Malformed {
                    line,
                    message: "synthetic record without parent_id".into(),
                })
            }
        };
        let pair = SentencePair {
            id,
            source: normalize_sentence(&rec.source),
            target: normalize_sentence(&rec.target),
            src_lang: rec.src_lang,
            tgt_lang: rec.tgt_lang,
            origin: rec.origin,
            parent_id,
            derivation,
        };
        pair.validate().map_err(|e| CorpusError::Malformed {
            line,
            message: e.to_string(),
        })?;
        out.push((line, pair));
    }
    Ok(out)
}

/// Serializes one pair as a JSONL line (without the trailing newline).
pub fn to_json_line(pair: &SentencePair) -> String {
    let rec = JsonRecord {
        id: Some(pair.id.clone()),
        source: pair.source.clone(),
        target: pair.target.clone(),
        src_lang: pair.src_lang.clone(),
        tgt_lang: pair.tgt_lang.clone(),
        origin: pair.origin,
        parent_id: Some(pair.parent_id.clone()),
        derivation: Some(DerivationRecord::from_derivation(&pair.derivation)),
    };
    serde_json::to_string(&rec).expect("sentence pair serializes")
}

fn to_tsv_line(pair: &SentencePair) -> Result<String> {
    for (field, text) in [("id", &pair.id), ("source", &pair.source), ("target", &pair.target)] {
        if text.contains(['\t', '\n', '\r']) {
            return Err(CorpusError::InvalidPair {
                id: pair.id.clone(),
                message: format!("{field} contains a tab or line break and cannot be written as TSV"),
            });
        }
    }
    Ok(format!("{}\t{}\t{}", pair.id, pair.source, pair.target))
}

pub fn write_corpus(corpus: &Corpus, path: &Path, format: Format) -> Result<()> {
    write_pairs(corpus.pairs(), path, format)
}

/// Writes pairs in order; identical input always yields identical bytes.
pub fn write_pairs(pairs: &[SentencePair], path: &Path, format: Format) -> Result<()> {
    let io_err = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    for pair in pairs {
        let line = match format {
            Format::Tsv => to_tsv_line(pair)?,
            Format::Jsonl => to_json_line(pair),
        };
        w.write_all(line.as_bytes()).map_err(io_err)?;
        w.write_all(b"\n").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}
