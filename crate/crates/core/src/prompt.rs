//! Prompt templates for the three augmentation methods.
//!
//! Each prompt is the embedded sentence, a single `\n`, then one instruction
//! line. The templates are fixed; `dump-prompts` prints them for auditing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus_io::SentencePair;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("unknown strategy kind `{0}`")]
    UnknownKind(String),
    #[error("strategy count must be at least 1, got {0}")]
    ZeroCount(usize),
    #[error("pair `{0}` has an empty sentence")]
    EmptySentence(String),
}

/// Which prompt is being issued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptKind {
    ParaphraseSrc,
    ParaphraseTgt,
    MultiTarget,
    Storytelling,
}

impl PromptKind {
    pub const ALL: [PromptKind; 4] = [
        PromptKind::ParaphraseSrc,
        PromptKind::ParaphraseTgt,
        PromptKind::MultiTarget,
        PromptKind::Storytelling,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PromptKind::ParaphraseSrc => "paraphrase_src",
            PromptKind::ParaphraseTgt => "paraphrase_tgt",
            PromptKind::MultiTarget => "multi_target",
            PromptKind::Storytelling => "storytelling",
        }
    }
}

impl fmt::Display for PromptKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PromptKind {
    type Err = PromptError;

    fn from_str(s: &str) -> Result<Self, PromptError> {
        PromptKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| PromptError::UnknownKind(s.to_string()))
    }
}

/// A prompt kind plus its count parameter: variants per side, translations,
/// or story sentences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Strategy {
    kind: PromptKind,
    n: usize,
}

impl Strategy {
    pub const DEFAULT_STORY_SENTENCES: usize = 3;

    pub fn new(kind: PromptKind, n: usize) -> Result<Self, PromptError> {
        if n == 0 {
            return Err(PromptError::ZeroCount(n));
        }
        Ok(Self { kind, n })
    }

    pub fn storytelling() -> Self {
        Self {
            kind: PromptKind::Storytelling,
            n: Self::DEFAULT_STORY_SENTENCES,
        }
    }

    pub fn kind(&self) -> PromptKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PromptText {
    pub text: String,
    pub strategy: Strategy,
    pub pair_id: String,
}

impl PromptText {
    /// The sentence embedded above the instruction.
    pub fn embedded_sentence(&self) -> &str {
        self.text.split_once('\n').map_or(self.text.as_str(), |(s, _)| s)
    }
}

const NUMBER_WORDS: [&str; 10] = [
    "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
];

fn unique_ways(n: usize) -> String {
    if n == 1 {
        "1 unique way".to_string()
    } else {
        format!("{n} unique ways")
    }
}

fn sentence_count(n: usize) -> String {
    match NUMBER_WORDS.get(n.wrapping_sub(1)) {
        Some(word) => (*word).to_string(),
        None => n.to_string(),
    }
}

/// Instruction line with the language names and count filled in.
fn instruction(kind: PromptKind, n: usize, src_lang: &str, tgt_lang: &str) -> String {
    match kind {
        PromptKind::ParaphraseSrc => {
            format!("Paraphrase the above sentence in {src_lang} in {}.", unique_ways(n))
        }
        PromptKind::ParaphraseTgt => {
            format!("Paraphrase the above sentence in {tgt_lang} in {}.", unique_ways(n))
        }
        PromptKind::MultiTarget => {
            format!("Translate the above sentence to {tgt_lang} in {}.", unique_ways(n))
        }
        PromptKind::Storytelling => format!(
            "Write a {}-sentence {src_lang} story based on the above sentence, and translate each sentence into {tgt_lang}.",
            sentence_count(n)
        ),
    }
}

pub fn render_prompt(strategy: Strategy, pair: &SentencePair) -> Result<PromptText, PromptError> {
    if strategy.n == 0 {
        return Err(PromptError::ZeroCount(0));
    }
    let sentence = match strategy.kind {
        PromptKind::ParaphraseTgt => &pair.target,
        _ => &pair.source,
    };
    if sentence.trim().is_empty() {
        return Err(PromptError::EmptySentence(pair.id.clone()));
    }
    let text = format!(
        "{sentence}\n{}",
        instruction(strategy.kind, strategy.n, pair.src_lang.code(), pair.tgt_lang.code())
    );
    Ok(PromptText {
        text,
        strategy,
        pair_id: pair.id.clone(),
    })
}

/// Template text with placeholders left in, for auditing.
pub fn template(strategy: Strategy) -> String {
    let sentence = match strategy.kind {
        PromptKind::ParaphraseTgt => "[original TGT sentence]",
        _ => "[original SRC sentence]",
    };
    format!(
        "{sentence}\n{}",
        instruction(strategy.kind, strategy.n, "[SRC language]", "[TGT language]")
    )
}
