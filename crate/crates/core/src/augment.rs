//! Pair construction for the three methods, and ratio-controlled sampling.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus_io::{CorpusError, Derivation, Origin, SentencePair};
use crate::prompt::{PromptError, PromptKind, Strategy};

#[derive(Debug, thiserror::Error)]
pub enum AugmentError {
    #[error("augmentation ratio must be a positive finite number, got {0}")]
    InvalidRatio(f64),
    #[error("original corpus is empty")]
    NoOriginals,
    #[error("synthetic pool too small: {available} pairs available, {required} required")]
    InsufficientPool { available: usize, required: usize },
    #[error("pair `{id}` does not belong in the pool: {reason}")]
    Pool { id: String, reason: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
}

/// Augmentation method as selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Paraphrase,
    MultiTarget,
    Storytelling,
}

impl Method {
    pub fn origin(self) -> Origin {
        match self {
            Method::Paraphrase => Origin::Paraphrase,
            Method::MultiTarget => Origin::MultiTarget,
            Method::Storytelling => Origin::Storytelling,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Paraphrase => "paraphrase",
            Method::MultiTarget => "multi-target",
            Method::Storytelling => "storytelling",
        }
    }

    /// Prompts issued per original pair. Paraphrasing asks for each side separately.
    pub fn strategies(self, n: usize) -> Result<Vec<Strategy>, PromptError> {
        Ok(match self {
            Method::Paraphrase => vec![
                Strategy::new(PromptKind::ParaphraseSrc, n)?,
                Strategy::new(PromptKind::ParaphraseTgt, n)?,
            ],
            Method::MultiTarget => vec![Strategy::new(PromptKind::MultiTarget, n)?],
            Method::Storytelling => vec![Strategy::new(PromptKind::Storytelling, n)?],
        })
    }

    /// Synthetic pairs one parent yields when every reply is complete.
    pub fn yield_per_parent(self, n: usize) -> usize {
        match self {
            Method::Paraphrase => (n + 1) * (n + 1) - 1,
            Method::MultiTarget | Method::Storytelling => n,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paraphrase" => Ok(Method::Paraphrase),
            "multi-target" | "multi_target" => Ok(Method::MultiTarget),
            "storytelling" => Ok(Method::Storytelling),
            other => Err(format!(
                "unknown strategy `{other}` (expected paraphrase, multi-target or storytelling)"
            )),
        }
    }
}

/// Synthetic pairs built for one parent, plus anything dropped on the way.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Combined {
    pub pairs: Vec<SentencePair>,
    pub warnings: Vec<String>,
}

fn keep_variants<'a>(
    original: &SentencePair,
    side: &str,
    original_text: &str,
    variants: &'a [String],
    warnings: &mut Vec<String>,
) -> Vec<(usize, &'a str)> {
    let mut kept = Vec::with_capacity(variants.len());
    for (i, v) in variants.iter().enumerate() {
        let v = v.trim();
        if v.is_empty() {
            warnings.push(format!("{}: empty {side} variant {} dropped", original.id, i + 1));
        } else if v == original_text {
            warnings.push(format!(
                "{}: {side} variant {} repeats the original and was dropped",
                original.id,
                i + 1
            ));
        } else {
            kept.push((i + 1, v));
        }
    }
    kept
}

/// Every combination of {original, variants} on each side except the
/// original pair itself: `(|src| + 1) * (|tgt| + 1) - 1` pairs.
///
/// Variants that are empty or repeat the original sentence are dropped first.
/// Derivation indices are 1-based positions in the input lists; 0 marks the
/// original side. Output runs over target forms in the outer loop.
pub fn combine_paraphrase(
    original: &SentencePair,
    src_variants: &[String],
    tgt_variants: &[String],
) -> Result<Combined, AugmentError> {
    let mut out = Combined::default();
    let mut src = vec![(0, original.source.as_str())];
    src.extend(keep_variants(original, "source", &original.source, src_variants, &mut out.warnings));
    let mut tgt = vec![(0, original.target.as_str())];
    tgt.extend(keep_variants(original, "target", &original.target, tgt_variants, &mut out.warnings));

    for &(j, target) in &tgt {
        for &(i, source) in &src {
            if i == 0 && j == 0 {
                continue;
            }
            out.pairs.push(SentencePair::synthetic(
                original,
                format!("{}#para-{i}-{j}", original.id),
                source,
                target,
                Origin::Paraphrase,
                Derivation::Paraphrase {
                    src_index: i,
                    tgt_index: j,
                },
            )?);
        }
    }
    Ok(out)
}

/// One pair per translation, all sharing the original source sentence.
/// A translation equal to the original target is kept and flagged.
pub fn combine_multi_target(
    original: &SentencePair,
    translations: &[String],
) -> Result<Combined, AugmentError> {
    let mut out = Combined::default();
    for (k, t) in translations.iter().enumerate() {
        let t = t.trim();
        if t.is_empty() {
            out.warnings
                .push(format!("{}: empty translation {k} dropped", original.id));
            continue;
        }
        let duplicate = t == original.target;
        if duplicate {
            out.warnings
                .push(format!("{}: translation {k} repeats the original target", original.id));
        }
        out.pairs.push(SentencePair::synthetic(
            original,
            format!("{}#mt-{k}", original.id),
            &original.source,
            t,
            Origin::MultiTarget,
            Derivation::MultiTarget {
                index: k,
                duplicate_of_original: duplicate,
            },
        )?);
    }
    Ok(out)
}

/// Story sentences paired with their translations. The original pair is not
/// part of the output.
pub fn combine_storytelling(
    original: &SentencePair,
    story_pairs: &[(String, String)],
) -> Result<Combined, AugmentError> {
    let mut out = Combined::default();
    for (k, (s, t)) in story_pairs.iter().enumerate() {
        if s.trim().is_empty() || t.trim().is_empty() {
            out.warnings.push(format!(
                "{}: story sentence {k} has an empty side and was dropped",
                original.id
            ));
            continue;
        }
        out.pairs.push(SentencePair::synthetic(
            original,
            format!("{}#story-{k}", original.id),
            s,
            t,
            Origin::Storytelling,
            Derivation::Storytelling { index: k },
        )?);
    }
    Ok(out)
}

/// All synthetic pairs generated for a corpus, grouped by parent id.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticPool {
    method: Method,
    n: usize,
    seed: u64,
    by_parent: BTreeMap<String, Vec<SentencePair>>,
}

impl SyntheticPool {
    pub fn new(method: Method, n: usize, seed: u64) -> Self {
        Self {
            method,
            n,
            seed,
            by_parent: BTreeMap::new(),
        }
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Appends pairs under `parent_id`, keeping insertion order.
    pub fn insert(&mut self, parent_id: &str, pairs: Vec<SentencePair>) -> Result<(), AugmentError> {
        let entry = self.by_parent.entry(parent_id.to_string()).or_default();
        let mut seen: HashSet<Derivation> = entry.iter().map(|p| p.derivation).collect();
        for p in &pairs {
            let reason = if p.parent_id != parent_id {
                Some(format!("parent is `{}`, not `{parent_id}`", p.parent_id))
            } else if p.is_original() {
                Some("original pairs are not synthetic".to_string())
            } else if !seen.insert(p.derivation) {
                Some(format!("derivation {:?} already present", p.derivation))
            } else {
                None
            };
            if let Some(reason) = reason {
                return Err(AugmentError::Pool {
                    id: p.id.clone(),
                    reason,
                });
            }
        }
        entry.extend(pairs);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.by_parent.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn parents(&self) -> impl Iterator<Item = (&str, &[SentencePair])> {
        self.by_parent.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn for_parent(&self, parent_id: &str) -> &[SentencePair] {
        self.by_parent.get(parent_id).map_or(&[], Vec::as_slice)
    }
}

/// `round(ratio * original_count)`, halves rounded up.
pub fn target_count(ratio: f64, original_count: usize) -> Result<usize, AugmentError> {
    if !ratio.is_finite() || ratio <= 0.0 {
        return Err(AugmentError::InvalidRatio(ratio));
    }
    if original_count == 0 {
        return Err(AugmentError::NoOriginals);
    }
    Ok((ratio * original_count as f64 + 0.5).floor() as usize)
}

/// Round-robin start position for `parents` parents.
pub fn start_parent(seed: u64, parents: usize) -> usize {
    if parents == 0 {
        return 0;
    }
    ChaCha8Rng::seed_from_u64(seed).random_range(0..parents)
}

/// Draws `round(ratio * original_count)` pairs from the pool.
///
/// Parents are visited in id order starting from a seed-chosen parent; each
/// visit takes that parent's next unused pair, skipping exhausted parents,
/// until the target is met. Per-parent counts therefore differ by at most one
/// among parents that still had pairs left.
pub fn sample_to_ratio(
    pool: &SyntheticPool,
    original_count: usize,
    ratio: f64,
    seed: u64,
) -> Result<Vec<SentencePair>, AugmentError> {
    let required = target_count(ratio, original_count)?;
    let available = pool.len();
    if available < required {
        return Err(AugmentError::InsufficientPool {
            available,
            required,
        });
    }
    let lists: Vec<&[SentencePair]> = pool.by_parent.values().map(Vec::as_slice).collect();
    let start = start_parent(seed, lists.len());
    let mut cursors = vec![0usize; lists.len()];
    let mut out = Vec::with_capacity(required);
    while out.len() < required {
        for offset in 0..lists.len() {
            let idx = (start + offset) % lists.len();
            if let Some(p) = lists[idx].get(cursors[idx]) {
                cursors[idx] += 1;
                out.push(p.clone());
                if out.len() == required {
                    break;
                }
            }
        }
    }
    Ok(out)
}
