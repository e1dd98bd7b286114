//! Seeded stratified train/validation/test split of the English fixture
//! tweets, with the per-class counts.
//!
//!     cargo run --example stratified_split -- 42

use std::collections::BTreeMap;
use std::path::PathBuf;

use llmprep::corpus::{load_corpus, stratified_split, Format, Split, SplitSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(7);
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/en_tweets.jsonl");
    let corpus = load_corpus(&path, Format::Jsonl, "en", &Default::default())?;
    let split = stratified_split(&corpus, &SplitSpec { max_train: 10, max_test: 6, validation_size: 4, seed });
    println!("corpus: {:?}", corpus.class_counts());
    for part in [Split::Train, Split::Validation, Split::Test] {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        let mut ids = Vec::new();
        for d in split.split(part) {
            *counts.entry(d.label.as_str()).or_default() += 1;
            ids.push(d.id.as_str());
        }
        println!("{part:?}: {counts:?} {ids:?}");
    }
    Ok(())
}
