//! Prompt fan-out and pool assembly for one augmentation run.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::augment::{
    combine_multi_target, combine_paraphrase, combine_storytelling, AugmentError, Combined, Method,
    SyntheticPool,
};
use crate::corpus_io::{Corpus, SentencePair};
use crate::parser::{parse_story, parse_variants};
use crate::prompt::{render_prompt, PromptKind, PromptText, Strategy};
use crate::provider::{CompletionResult, Provider, ProviderError};

/// A reply that produced no usable sentences, or a request that failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reject {
    pub pair_id: String,
    pub strategy: PromptKind,
    pub raw_text: String,
    pub reason: String,
}

#[derive(Debug)]
pub struct Generation {
    pub pool: SyntheticPool,
    pub rejects: Vec<Reject>,
    pub warnings: Vec<String>,
    pub prompts: usize,
    /// Requests that failed for good (not parse failures).
    pub provider_failures: usize,
}

/// Sends every prompt through `provider` using up to `workers` threads.
/// Results come back in prompt order.
pub fn complete_all(
    provider: &Provider,
    prompts: &[PromptText],
    workers: usize,
) -> Vec<Result<CompletionResult, ProviderError>> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<CompletionResult, ProviderError>>>> =
        Mutex::new((0..prompts.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers.clamp(1, prompts.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(prompt) = prompts.get(i) else { break };
                let result = provider.complete(prompt);
                slots.lock().unwrap()[i] = Some(result);
            });
        }
    });
    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every prompt was completed"))
        .collect()
}

/// Generates the synthetic pool for every original pair in `corpus`.
pub fn generate(
    corpus: &Corpus,
    method: Method,
    n: usize,
    seed: u64,
    provider: &Provider,
) -> Result<Generation, AugmentError> {
    let strategies = method.strategies(n)?;
    let originals: Vec<&SentencePair> = corpus.originals().collect();
    let mut prompts = Vec::with_capacity(originals.len() * strategies.len());
    for pair in &originals {
        for &s in &strategies {
            prompts.push(render_prompt(s, pair)?);
        }
    }
    let mut replies = complete_all(provider, &prompts, provider.config().max_concurrency).into_iter();

    let mut out = Generation {
        pool: SyntheticPool::new(method, n, seed),
        rejects: Vec::new(),
        warnings: Vec::new(),
        prompts: prompts.len(),
        provider_failures: 0,
    };
    for pair in originals {
        // one reply per strategy, in strategy order
        let mut texts: Vec<Option<String>> = Vec::with_capacity(strategies.len());
        for &s in &strategies {
            match replies.next().expect("one reply per prompt") {
                Ok(done) => texts.push(Some(done.raw_text)),
                Err(e) => {
                    if e.is_permanent() {
                        out.provider_failures += 1;
                    }
                    out.rejects.push(Reject {
                        pair_id: pair.id.clone(),
                        strategy: s.kind(),
                        raw_text: String::new(),
                        reason: format!("provider error: {e}"),
                    });
                    texts.push(None);
                }
            }
        }
        let combined = build(pair, method, n, &strategies, &texts, &mut out)?;
        out.warnings.extend(combined.warnings);
        if !combined.pairs.is_empty() {
            out.pool.insert(&pair.id, combined.pairs)?;
        }
    }
    Ok(out)
}

fn build(
    pair: &SentencePair,
    method: Method,
    n: usize,
    strategies: &[Strategy],
    texts: &[Option<String>],
    out: &mut Generation,
) -> Result<Combined, AugmentError> {
    let mut variant_lists: Vec<Option<Vec<String>>> = Vec::with_capacity(texts.len());
    let mut story = None;
    for (s, text) in strategies.iter().zip(texts) {
        let Some(raw) = text else {
            variant_lists.push(None);
            continue;
        };
        let reject = |reason: String| Reject {
            pair_id: pair.id.clone(),
            strategy: s.kind(),
            raw_text: raw.clone(),
            reason,
        };
        if s.kind() == PromptKind::Storytelling {
            match parse_story(raw, n) {
                Ok(parsed) => {
                    note(&mut out.warnings, pair, s.kind(), parsed.warnings);
                    story = Some(parsed.pairs);
                }
                Err(e) => out.rejects.push(reject(e.to_string())),
            }
        } else {
            match parse_variants(raw, n) {
                Ok(parsed) => {
                    note(&mut out.warnings, pair, s.kind(), parsed.warnings);
                    variant_lists.push(Some(parsed.items));
                }
                Err(e) => {
                    out.rejects.push(reject(e.to_string()));
                    variant_lists.push(None);
                }
            }
        }
    }
    match method {
        Method::Paraphrase => {
            let src = variant_lists.first().cloned().flatten().unwrap_or_default();
            let tgt = variant_lists.get(1).cloned().flatten().unwrap_or_default();
            combine_paraphrase(pair, &src, &tgt)
        }
        Method::MultiTarget => match variant_lists.into_iter().next().flatten() {
            Some(translations) => combine_multi_target(pair, &translations),
            None => Ok(Combined::default()),
        },
        Method::Storytelling => match story {
            Some(story) => combine_storytelling(pair, &story),
            None => Ok(Combined::default()),
        },
    }
}

fn note(warnings: &mut Vec<String>, pair: &SentencePair, kind: PromptKind, notes: Vec<String>) {
    warnings.extend(notes.into_iter().map(|w| format!("{} ({kind}): {w}", pair.id)));
}
