//! Synthetic parallel corpus generation with LLM prompts.
//!
//! An existing parallel corpus is grown with one of three prompt methods:
//! paraphrasing both sides and crossing the variants, asking for several
//! target-side translations, or asking for a short story continuing the
//! source sentence together with its translation. Synthetic pairs are sampled
//! to a fixed ratio of the original size, and [`metrics`] measures how far
//! they drift from their originals (BLEU and embedding cosine similarity).

pub mod augment;
pub mod cli;
pub mod corpus_io;
pub mod metrics;
pub mod parser;
pub mod pipeline;
pub mod prompt;
pub mod provider;

pub use augment::{Method, SyntheticPool};
pub use corpus_io::{Corpus, Format, LanguageTag, Origin, SentencePair};
pub use prompt::{PromptKind, Strategy};
