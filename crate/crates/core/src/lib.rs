//! Sentence boundary disambiguation from part-of-speech context.
//!
//! Every `.`, `!` and `?` in a text is a candidate sentence boundary. Each
//! token around a candidate is described by the prior probabilities of its
//! parts of speech (looked up in a frequency lexicon, or guessed by
//! heuristics) folded into 18 general categories plus two capitalization
//! flags. The descriptors of the `k` surrounding tokens feed a small
//! feed-forward network whose output, compared against two thresholds,
//! labels the candidate as a boundary, not a boundary, or ambiguous.
//!
//! The pipeline, in order:
//!
//! * [`tokenizer`] splits text into tokens and finds candidate sites.
//! * [`lexicon`] resolves tokens to part-of-speech frequencies.
//! * [`descriptor`] turns frequencies into 20-element descriptor arrays.
//! * [`network`] is the `k·20 → j → 1` sigmoid network and its trainer.
//! * [`segmenter`] assembles windows, applies thresholds and labels text.
//! * [`evaluation`] scores output against gold annotation and generates
//!   synthetic annotated corpora.

pub mod descriptor;
pub mod error;
pub mod evaluation;
pub mod lexicon;
pub mod network;
pub mod segmenter;
pub mod tokenizer;

pub use descriptor::{CategoryMapping, DescriptorArray};
pub use error::{Error, Result};
pub use lexicon::{HeuristicParams, Lexicon, TagFrequencies};
pub use network::{Network, TrainConfig, TrainingReport};
pub use segmenter::{Decision, Features, Label, Segmenter, Thresholds};
pub use tokenizer::{CandidateSite, Token, TokenKind, Tokenizer};
