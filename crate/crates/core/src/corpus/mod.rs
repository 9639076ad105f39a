//! Corpus manifests, per-speaker lexicons and lexicon sampling.

mod lexicon;
mod manifest;
mod sampling;

pub use lexicon::{common_types, remove_onomatopoeia, Lexicon, Register, TokenRecord, WordType};
pub use manifest::{load_manifest, parse_manifest, summarize_corpus, RegisterSummary, MANIFEST_COLUMNS};
pub use sampling::{sample_lexicons, sample_rng, SampledLexicon};
