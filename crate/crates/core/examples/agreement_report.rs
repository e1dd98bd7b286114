//! Word-level agreement between hand-written "LLM" outputs and classic
//! preprocessing for two documents.
//!
//!     cargo run --example agreement_report

use llmprep::agreement::{agreement_report, align, AgreementOptions, DocOutputs};
use llmprep::classic::{Classic, Task};
use llmprep::tokenize::tokenize;
use llmprep::{Language, Stemmer};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let classic = Classic::load(Language::English, Task::Sentiment)?;
    let rows = [
        ("d1", "The cats were sleeping on the warm mats", "cats sleeping warm mats", "the cat be sleep on the warm mat", "the cat were sleep on the warm mat"),
        ("d2", "I really loved these movies", "really loved movies", "I really love this movie", "i realli love these movi"),
    ];
    let docs: Vec<DocOutputs> = rows
        .iter()
        .map(|(id, orig, sw, lemma, stem)| DocOutputs {
            id: id.to_string(),
            orig: tokenize(orig),
            stopwords: Some(tokenize(sw)),
            lemma: Some(tokenize(lemma)),
            stem: Some(tokenize(stem)),
        })
        .collect();

    let a = align(&docs[0].orig, docs[0].stopwords.as_ref().unwrap());
    println!("alignment of d1: pairs {:?}, removed {:?}", a.pairs, a.removed);

    let stemmers = Stemmer::available_for(Language::English);
    let r = agreement_report(&docs, &classic.stopwords, &classic.lemmas, &stemmers, &AgreementOptions::default());
    let pct = |v: Option<f64>| v.map_or("-".into(), |v| format!("{v:.2}"));
    println!("SW {}  NSW {}  L {}  Any {}", pct(r.sw_pct), pct(r.nsw_pct), pct(r.l_pct), pct(r.s_any_pct));
    for (algo, v) in &r.s_pct {
        println!("S ({algo}) {v:.2}");
    }
    println!("stem consistency {:.2}", r.stem_consistency);
    println!("removed non-stopwords {:?}", r.top_removed_non_stopwords);
    Ok(())
}
