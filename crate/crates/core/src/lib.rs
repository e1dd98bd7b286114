//! Text preprocessing with classic algorithms and prompt-driven LLMs,
//! word-level agreement between the two, and the effect of each
//! preprocessing chain on bag-of-words classification.

pub mod agreement;
pub mod classic;
pub mod cli;
pub mod corpus;
pub mod llmproc;
pub mod runner;
pub mod textclf;
pub mod tokenize;

pub use llmprep_stem::{Language, Stemmer};
