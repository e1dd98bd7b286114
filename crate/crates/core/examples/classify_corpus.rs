//! Trains the three classifiers on a synthetic two-class corpus under each
//! classic combo and prints micro-F1 scores.
//!
//!     cargo run --example classify_corpus

use llmprep::classic::{Classic, Combo, Task};
use llmprep::corpus::{stratified_split, Split, SplitSpec};
use llmprep::textclf::{evaluate, synthetic_separable_corpus, TunedParams};
use llmprep::tokenize::TokenKind;
use llmprep::{Language, Stemmer};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = stratified_split(
        &synthetic_separable_corpus(200, 1),
        &SplitSpec { max_train: 100, max_test: 100, validation_size: 0, seed: 1 },
    );
    let classic = Classic::load(Language::English, Task::Topic)?;
    println!("{:<6} {:>8} {:>8} {:>8} {:>8}", "combo", "nb", "logreg", "tree", "avg");
    for combo in Combo::ALL {
        let part = |split| {
            let docs: Vec<_> = corpus.split(split).collect();
            let x: Vec<Vec<String>> = docs
                .iter()
                .map(|d| {
                    let seq = classic.preprocess(&d.text, combo, Stemmer::Porter);
                    seq.iter().filter(|t| t.kind != TokenKind::Punct).map(|t| t.norm.clone()).collect()
                })
                .collect();
            let y: Vec<String> = docs.iter().map(|d| d.label.clone()).collect();
            (x, y)
        };
        let (tx, ty) = part(Split::Train);
        let (ex, ey) = part(Split::Test);
        let r = evaluate(&tx, &ty, &ex, &ey, &TunedParams::default())?;
        println!(
            "{:<6} {:>8.3} {:>8.3} {:>8.3} {:>8.3}",
            combo.label(),
            r.naive_bayes.micro_f1,
            r.logreg.micro_f1,
            r.tree.micro_f1,
            r.average
        );
    }
    Ok(())
}
