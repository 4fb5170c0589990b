//! Similarity between synthetic sentences and the originals they came from:
//! BLEU over tokens and cosine similarity over sentence embeddings.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus_io::{Corpus, SentencePair};

static PUNCT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\p{P}").unwrap());

pub const MAX_ORDER: usize = 4;
pub const MOCK_DIM: usize = 256;

#[derive(Debug, thiserror::Error)]
pub enum MetricError {
    #[error("embedding dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("cosine similarity is undefined for a zero vector")]
    ZeroVector,
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("no embedding for sentence {0:?}")]
    MissingEmbedding(String),
    #[error("corpus BLEU needs at least one sentence pair")]
    EmptyCorpus,
    #[error("synthetic pair `{id}` has no parent `{parent_id}` in the original corpus")]
    UnresolvedParent { id: String, parent_id: String },
    #[error("diversity report needs at least one synthetic pair")]
    NoSynthetics,
    #[error("{path}:{line}: {message}")]
    EmbeddingFile {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Splits off every Unicode punctuation character, then splits on whitespace.
/// Case is preserved.
pub fn tokenize(sentence: &str) -> Vec<String> {
    PUNCT
        .replace_all(sentence, " $0 ")
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

/// Clipped n-gram matches and hypothesis n-gram totals for orders 1..=4.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NgramStats {
    pub matches: [usize; MAX_ORDER],
    pub totals: [usize; MAX_ORDER],
    pub hyp_len: usize,
    pub ref_len: usize,
}

impl NgramStats {
    pub fn compute(hyp: &[String], reference: &[String]) -> Self {
        let mut stats = NgramStats {
            hyp_len: hyp.len(),
            ref_len: reference.len(),
            ..Default::default()
        };
        for n in 1..=MAX_ORDER {
            let ref_counts = ngram_counts(reference, n);
            for (gram, count) in ngram_counts(hyp, n) {
                stats.matches[n - 1] += count.min(ref_counts.get(gram).copied().unwrap_or(0));
            }
            stats.totals[n - 1] = hyp.len().saturating_sub(n - 1);
        }
        stats
    }

    fn add(&mut self, other: &NgramStats) {
        for i in 0..MAX_ORDER {
            self.matches[i] += other.matches[i];
            self.totals[i] += other.totals[i];
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

fn brevity_penalty(hyp_len: usize, ref_len: usize) -> f64 {
    if hyp_len > ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    }
}

fn geometric_bleu(precisions: [f64; MAX_ORDER], hyp_len: usize, ref_len: usize) -> f64 {
    let log_mean = precisions.iter().map(|p| p.ln()).sum::<f64>() / MAX_ORDER as f64;
    100.0 * brevity_penalty(hyp_len, ref_len) * log_mean.exp()
}

/// Sentence-level BLEU-4 in `[0, 100]`.
///
/// A zero count at order 2 or higher is smoothed to `1 / (total + 1)`; a zero
/// unigram count scores 0 outright, as does an empty hypothesis or reference.
pub fn sentence_bleu(hypothesis: &str, reference: &str) -> f64 {
    let hyp = tokenize(hypothesis);
    let reference = tokenize(reference);
    if hyp.is_empty() || reference.is_empty() {
        return 0.0;
    }
    let stats = NgramStats::compute(&hyp, &reference);
    if stats.matches[0] == 0 {
        return 0.0;
    }
    let p: [f64; MAX_ORDER] = std::array::from_fn(|i| {
        if i > 0 && stats.matches[i] == 0 {
            1.0 / (stats.totals[i] + 1) as f64
        } else {
            stats.matches[i] as f64 / stats.totals[i] as f64
        }
    });
    geometric_bleu(p, stats.hyp_len, stats.ref_len)
}

/// Corpus-level BLEU-4 over `(hypothesis, reference)` pairs with statistics
/// pooled before the geometric mean; unsmoothed. An order with no hypothesis
/// n-grams anywhere in the corpus has nothing to contradict and counts as
/// precision 1.
pub fn corpus_bleu<H: AsRef<str>, R: AsRef<str>>(pairs: &[(H, R)]) -> Result<f64, MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    let mut total = NgramStats::default();
    for (h, r) in pairs {
        total.add(&NgramStats::compute(&tokenize(h.as_ref()), &tokenize(r.as_ref())));
    }
    if total.hyp_len == 0 || total.ref_len == 0 {
        return Ok(0.0);
    }
    let mut p = [0.0; MAX_ORDER];
    for (i, slot) in p.iter_mut().enumerate() {
        if total.totals[i] == 0 {
            *slot = 1.0;
        } else if total.matches[i] == 0 {
            return Ok(0.0);
        } else {
            *slot = total.matches[i] as f64 / total.totals[i] as f64;
        }
    }
    Ok(geometric_bleu(p, total.hyp_len, total.ref_len))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingSource {
    FileImport,
    Mock,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    vector: Vec<f64>,
    source: EmbeddingSource,
}

impl Embedding {
    pub fn new(vector: Vec<f64>, source: EmbeddingSource) -> Result<Self, MetricError> {
        if vector.is_empty() {
            return Err(MetricError::InvalidEmbedding("empty vector".into()));
        }
        if let Some(i) = vector.iter().position(|v| !v.is_finite()) {
            return Err(MetricError::InvalidEmbedding(format!("component {i} is not finite")));
        }
        Ok(Self { vector, source })
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn vector(&self) -> &[f64] {
        &self.vector
    }

    pub fn source(&self) -> EmbeddingSource {
        self.source
    }
}

pub fn cosine(a: &Embedding, b: &Embedding) -> Result<f64, MetricError> {
    if a.dim() != b.dim() {
        return Err(MetricError::DimensionMismatch(a.dim(), b.dim()));
    }
    let dot: f64 = a.vector.iter().zip(&b.vector).map(|(x, y)| x * y).sum();
    let na = a.vector.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.vector.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(MetricError::ZeroVector);
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Bucket of a character trigram in the mock embedding.
pub fn trigram_bucket(trigram: &str) -> usize {
    (fnv1a(trigram.as_bytes()) % MOCK_DIM as u64) as usize
}

/// Character trigrams of the sentence padded with one space on each side.
pub fn char_trigrams(sentence: &str) -> Vec<String> {
    let chars: Vec<char> = std::iter::once(' ')
        .chain(sentence.chars())
        .chain(std::iter::once(' '))
        .collect();
    chars.windows(3).map(|w| w.iter().collect()).collect()
}

/// L2-normalized hashed trigram counts.
pub fn mock_embedding(sentence: &str) -> Result<Embedding, MetricError> {
    let mut v = vec![0.0; MOCK_DIM];
    for t in char_trigrams(sentence) {
        v[trigram_bucket(&t)] += 1.0;
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(MetricError::ZeroVector);
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Embedding::new(v, EmbeddingSource::Mock)
}

/// Precomputed vectors keyed by exact sentence text.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    /// Reads `sentence<TAB>v1,v2,...,vd` lines; every line must share one `d`.
    pub fn load(path: &Path) -> Result<Self, MetricError> {
        let text = fs::read_to_string(path).map_err(|source| MetricError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|(line, message)| MetricError::EmbeddingFile {
            path: path.to_path_buf(),
            line,
            message,
        })
    }

    pub fn parse(text: &str) -> Result<Self, (usize, String)> {
        let mut table = EmbeddingTable::default();
        for (idx, raw) in text.split('\n').enumerate() {
            let line = idx + 1;
            let raw = raw.strip_suffix('\r').unwrap_or(raw);
            if raw.trim().is_empty() {
                continue;
            }
            let (sentence, values) = raw
                .rsplit_once('\t')
                .ok_or_else(|| (line, "expected `sentence<TAB>v1,...,vd`".to_string()))?;
            let vector = values
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| (line, format!("bad vector component: {e}")))?;
            if vector.iter().any(|v| !v.is_finite()) {
                return Err((line, "non-finite vector component".into()));
            }
            if table.dim == 0 {
                table.dim = vector.len();
            } else if vector.len() != table.dim {
                return Err((line, format!("dimension {} differs from {}", vector.len(), table.dim)));
            }
            if table.vectors.insert(sentence.to_string(), vector).is_some() {
                return Err((line, format!("duplicate sentence {sentence:?}")));
            }
        }
        Ok(table)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, sentence: &str) -> Result<Embedding, MetricError> {
        let v = self
            .vectors
            .get(sentence)
            .ok_or_else(|| MetricError::MissingEmbedding(sentence.to_string()))?;
        Embedding::new(v.clone(), EmbeddingSource::FileImport)
    }
}

/// Where sentence embeddings come from.
#[derive(Debug, Clone)]
pub enum EmbeddingProvider {
    Mock,
    File(EmbeddingTable),
}

impl EmbeddingProvider {
    pub fn embed(&self, sentence: &str) -> Result<Embedding, MetricError> {
        match self {
            EmbeddingProvider::Mock => mock_embedding(sentence),
            EmbeddingProvider::File(table) => table.get(sentence),
        }
    }

    pub fn source(&self) -> EmbeddingSource {
        match self {
            EmbeddingProvider::Mock => EmbeddingSource::Mock,
            EmbeddingProvider::File(_) => EmbeddingSource::FileImport,
        }
    }
}

pub fn embed(sentence: &str, provider: &EmbeddingProvider) -> Result<Embedding, MetricError> {
    provider.embed(sentence)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    pub synthetic_id: String,
    pub cosine: f64,
    pub bleu: f64,
}

/// Run settings echoed at the top of every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub strategy: String,
    pub n: usize,
    pub model: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub seed: u64,
    pub embeddings: EmbeddingSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityReport {
    pub config_echo: ConfigEcho,
    pub pair_count: usize,
    pub mean_cosine: f64,
    pub mean_sentence_bleu: f64,
    /// Pooled BLEU over the same comparisons.
    pub corpus_bleu: f64,
    /// Sorted by synthetic id.
    pub per_pair: Vec<PairScore>,
}

/// Compares each synthetic target sentence with its parent's target sentence.
pub fn diversity_report(
    originals: &Corpus,
    synthetics: &[SentencePair],
    provider: &EmbeddingProvider,
    config_echo: ConfigEcho,
) -> Result<DiversityReport, MetricError> {
    if synthetics.is_empty() {
        return Err(MetricError::NoSynthetics);
    }
    let parents: HashMap<&str, &SentencePair> =
        originals.originals().map(|p| (p.id.as_str(), p)).collect();
    let mut compared: Vec<(&SentencePair, &SentencePair)> = synthetics
        .iter()
        .map(|s| {
            parents
                .get(s.parent_id.as_str())
                .map(|p| (s, *p))
                .ok_or_else(|| MetricError::UnresolvedParent {
                    id: s.id.clone(),
                    parent_id: s.parent_id.clone(),
                })
        })
        .collect::<Result<_, _>>()?;
    compared.sort_by(|a, b| a.0.id.cmp(&b.0.id));

    let mut embeddings: HashMap<&str, Embedding> = HashMap::new();
    let mut per_pair = Vec::with_capacity(compared.len());
    for (syn, parent) in &compared {
        for sentence in [parent.target.as_str(), syn.target.as_str()] {
            if !embeddings.contains_key(sentence) {
                embeddings.insert(sentence, provider.embed(sentence)?);
            }
        }
        per_pair.push(PairScore {
            synthetic_id: syn.id.clone(),
            cosine: cosine(&embeddings[syn.target.as_str()], &embeddings[parent.target.as_str()])?,
            bleu: sentence_bleu(&syn.target, &parent.target),
        });
    }
    let n = per_pair.len() as f64;
    let mean_cosine = per_pair.iter().map(|p| p.cosine).sum::<f64>() / n;
    let mean_sentence_bleu = per_pair.iter().map(|p| p.bleu).sum::<f64>() / n;
    let pooled: Vec<(&str, &str)> = compared
        .iter()
        .map(|(s, p)| (s.target.as_str(), p.target.as_str()))
        .collect();
    Ok(DiversityReport {
        config_echo,
        pair_count: per_pair.len(),
        mean_cosine,
        mean_sentence_bleu,
        corpus_bleu: corpus_bleu(&pooled)?,
        per_pair,
    })
}

impl DiversityReport {
    /// Plain-text summary table.
    pub fn render_table(&self) -> String {
        let c = &self.config_echo;
        let mut out = String::new();
        out.push_str(&format!(
            "# strategy={} n={} model={} temperature={} max_tokens={} seed={} embeddings={}\n",
            c.strategy,
            c.n,
            c.model,
            c.temperature,
            c.max_output_tokens,
            c.seed,
            match c.embeddings {
                EmbeddingSource::Mock => "mock",
                EmbeddingSource::FileImport => "file",
            }
        ));
        out.push_str(&format!(
            "{:<14} {:>8} {:>12} {:>12} {:>12}\n",
            "method", "pairs", "cosine", "sent-BLEU", "corpus-BLEU"
        ));
        out.push_str(&format!(
            "{:<14} {:>8} {:>12.3} {:>12.3} {:>12.3}\n",
            c.strategy, self.pair_count, self.mean_cosine, self.mean_sentence_bleu, self.corpus_bleu
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus_io::{Derivation, LanguageTag, Origin};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn toks(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn tokenizer_rules() {
        assert_eq!(
            tokenize("Wie viel Kredit möchten Sie haben?"),
            toks(&["Wie", "viel", "Kredit", "möchten", "Sie", "haben", "?"])
        );
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("a,b"), toks(&["a", ",", "b"]));
        assert_eq!(tokenize("10.000 „Dollar“"), toks(&["10", ".", "000", "„", "Dollar", "“"]));
        assert_eq!(tokenize("Aa $5"), toks(&["Aa", "$5"]));
    }

    #[test]
    fn bleu_identity_and_disjoint() {
        assert_eq!(sentence_bleu("Wie viel Kredit möchten Sie haben?", "Wie viel Kredit möchten Sie haben?"), 100.0);
        assert_eq!(sentence_bleu("a", "a"), 100.0);
        assert_eq!(sentence_bleu("the cat", "ein Hund"), 0.0);
        assert_eq!(sentence_bleu("", "x"), 0.0);
        assert_eq!(sentence_bleu("x", ""), 0.0);
    }

    #[test]
    fn cat_on_mat_by_hand() {
        // hyp "the cat sat on the mat" vs ref "the cat is on the mat":
        // p1 = 5/6, p2 = 3/5, p3 = 1/4, p4 = 0 -> 1/(3+1); c = r = 6, BP = 1
        let expected = 100.0 * (5.0f64 / 6.0 * 3.0 / 5.0 * 1.0 / 4.0 * 1.0 / 4.0).powf(0.25);
        assert_abs_diff_eq!(sentence_bleu("the cat sat on the mat", "the cat is on the mat"), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 42.044820762685724, epsilon = 1e-12);
    }

    #[test]
    fn brevity_penalty_applies_to_short_hypotheses() {
        // hyp is a 3-token prefix of a 6-token reference: all precisions 1 (p4 smoothed 1/1)
        let s = sentence_bleu("the cat is", "the cat is on the mat");
        assert_abs_diff_eq!(s, 100.0 * (1.0f64 - 2.0).exp(), epsilon = 1e-12);
    }

    #[test]
    fn corpus_bleu_basics() {
        let same = [("a b c d e", "a b c d e"), ("x y", "x y")];
        assert_abs_diff_eq!(corpus_bleu(&same).unwrap(), 100.0, epsilon = 1e-12);
        assert!(matches!(corpus_bleu::<&str, &str>(&[]), Err(MetricError::EmptyCorpus)));
        let one = [("the cat sat on the big mat", "the cat sat on the mat")];
        assert_abs_diff_eq!(
            corpus_bleu(&one).unwrap(),
            sentence_bleu(one[0].0, one[0].1),
            epsilon = 1e-12
        );
        assert_eq!(corpus_bleu(&[("q r s t", "a b c d")]).unwrap(), 0.0);
    }

    fn emb(v: &[f64]) -> Embedding {
        Embedding::new(v.to_vec(), EmbeddingSource::Mock).unwrap()
    }

    #[test]
    fn cosine_cases() {
        assert_abs_diff_eq!(cosine(&emb(&[1.0, 2.0, 2.0]), &emb(&[2.0, 1.0, 2.0])).unwrap(), 8.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cosine(&emb(&[1.0, 0.0]), &emb(&[0.0, 1.0])).unwrap(), 0.0, epsilon = 1e-12);
        assert!(matches!(cosine(&emb(&[1.0]), &emb(&[1.0, 0.0])), Err(MetricError::DimensionMismatch(1, 2))));
        assert!(matches!(cosine(&emb(&[0.0, 0.0]), &emb(&[1.0, 0.0])), Err(MetricError::ZeroVector)));
        assert!(Embedding::new(vec![f64::NAN], EmbeddingSource::Mock).is_err());
    }

    #[test]
    fn mock_embedding_fixture() {
        let abc: Vec<usize> = char_trigrams("abc").iter().map(|t| trigram_bucket(t)).collect();
        let xyz: Vec<usize> = char_trigrams("xyz").iter().map(|t| trigram_bucket(t)).collect();
        assert_eq!(char_trigrams("abc"), [" ab", "abc", "bc "]);
        assert!(abc.iter().all(|b| !xyz.contains(b)), "bucket collision: {abc:?} {xyz:?}");
        let a = mock_embedding("abc").unwrap();
        assert_eq!(a.dim(), MOCK_DIM);
        assert_abs_diff_eq!(cosine(&a, &mock_embedding("xyz").unwrap()).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cosine(&a, &mock_embedding("abc").unwrap()).unwrap(), 1.0, epsilon = 1e-12);
        let norm: f64 = a.vector().iter().map(|x| x * x).sum::<f64>().sqrt();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mock_embedding_prefers_shared_trigrams() {
        let base = mock_embedding("Wie viel Kredit möchten Sie haben?").unwrap();
        let near = mock_embedding("Wie viel Kredit benötigen Sie?").unwrap();
        let far = mock_embedding("저는 대출을 받고 싶습니다.").unwrap();
        assert!(cosine(&base, &near).unwrap() > cosine(&base, &far).unwrap());
    }

    #[test]
    fn embedding_file() {
        let table = EmbeddingTable::parse("hello world\t1,0,0.5\nzweite Zeile\t-1, 2, 3\n").unwrap();
        assert_eq!(table.dim(), 3);
        assert_eq!(table.get("hello world").unwrap().vector(), [1.0, 0.0, 0.5]);
        assert_eq!(table.get("zweite Zeile").unwrap().vector(), [-1.0, 2.0, 3.0]);
        assert!(matches!(table.get("nope"), Err(MetricError::MissingEmbedding(s)) if s == "nope"));
        assert_eq!(EmbeddingTable::parse("a\t1,2\nb\t1\n").unwrap_err().0, 2);
        assert_eq!(EmbeddingTable::parse("a 1,2\n").unwrap_err().0, 1);
        assert_eq!(EmbeddingTable::parse("a\t1,x\n").unwrap_err().0, 1);
        assert_eq!(EmbeddingTable::parse("a\t1,inf\n").unwrap_err().0, 1);
    }

    fn echo() -> ConfigEcho {
        ConfigEcho {
            strategy: "multi-target".into(),
            n: 3,
            model: "mock".into(),
            temperature: 1.0,
            max_output_tokens: 512,
            seed: 0,
            embeddings: EmbeddingSource::Mock,
        }
    }

    fn originals() -> Corpus {
        let ko = LanguageTag::new("Korean", "ko").unwrap();
        let de = LanguageTag::new("German", "de").unwrap();
        let o = SentencePair::original("p1", "얼마정도 대출을 원하세요?", "Wie viel Kredit möchten Sie haben?", ko.clone(), de.clone()).unwrap();
        Corpus::from_pairs(ko, de, vec![o]).unwrap()
    }

    fn synthetic(id: &str, parent: &SentencePair, target: &str, k: usize) -> SentencePair {
        SentencePair::synthetic(
            parent,
            id,
            &parent.source,
            target,
            Origin::MultiTarget,
            Derivation::MultiTarget { index: k, duplicate_of_original: false },
        )
        .unwrap()
    }

    #[test]
    fn report_on_copies() {
        let c = originals();
        let p = &c.pairs()[0];
        let syn = vec![synthetic("p1#mt-1", p, &p.target, 1), synthetic("p1#mt-0", p, &p.target, 0)];
        let r = diversity_report(&c, &syn, &EmbeddingProvider::Mock, echo()).unwrap();
        assert_eq!(r.pair_count, 2);
        assert_abs_diff_eq!(r.mean_cosine, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.mean_sentence_bleu, 100.0, epsilon = 1e-12);
        assert_eq!(r.per_pair[0].synthetic_id, "p1#mt-0");
    }

    #[test]
    fn report_errors() {
        let c = originals();
        assert!(matches!(diversity_report(&c, &[], &EmbeddingProvider::Mock, echo()), Err(MetricError::NoSynthetics)));
        let stranger = SentencePair::original(
            "zz",
            "x",
            "y",
            LanguageTag::new("Korean", "ko").unwrap(),
            LanguageTag::new("German", "de").unwrap(),
        )
        .unwrap();
        let orphan = synthetic("zz#mt-0", &stranger, "Hallo", 0);
        assert!(matches!(
            diversity_report(&c, &[orphan], &EmbeddingProvider::Mock, echo()),
            Err(MetricError::UnresolvedParent { .. })
        ));
        let p = &c.pairs()[0];
        let syn = vec![synthetic("p1#mt-0", p, "Wie viel Geld?", 0)];
        let table = EmbeddingProvider::File(EmbeddingTable::parse("Wie viel Geld?\t1,0\n").unwrap());
        match diversity_report(&c, &syn, &table, echo()) {
            Err(MetricError::MissingEmbedding(s)) => assert_eq!(s, "Wie viel Kredit möchten Sie haben?"),
            other => panic!("{other:?}"),
        }
    }

    proptest! {
        #[test]
        fn cosine_self_and_negation(v in prop::collection::vec(-100.0f64..100.0, 1..16)) {
            prop_assume!(v.iter().any(|x| x.abs() > 1e-6));
            let a = emb(&v);
            let neg = emb(&v.iter().map(|x| -x).collect::<Vec<_>>());
            prop_assert!((cosine(&a, &a).unwrap() - 1.0).abs() <= 1e-12);
            prop_assert!((cosine(&a, &neg).unwrap() + 1.0).abs() <= 1e-12);
        }

        #[test]
        fn cosine_bounded(a in prop::collection::vec(-10.0f64..10.0, 4), b in prop::collection::vec(-10.0f64..10.0, 4)) {
            if let Ok(c) = cosine(&emb(&a), &emb(&b)) {
                prop_assert!((-1.0..=1.0).contains(&c));
            }
        }

        #[test]
        fn bleu_self_is_hundred(words in prop::collection::vec("[a-z]{1,5}", 1..12)) {
            let s = words.join(" ");
            prop_assert!((sentence_bleu(&s, &s) - 100.0).abs() < 1e-9);
        }
    }
}
