use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::OnceLock;

use llmprep::classic::{
    lemmatize, load_wordlists, remove_stopwords, stem, stem_sequence, Classic, ClassicError, Combo, LemmaTable, Op,
    StopwordInventory, Task,
};
use llmprep::corpus::{load_corpus, Columns, Format};
use llmprep::tokenize::tokenize;
use llmprep::{Language, Stemmer};
use proptest::prelude::*;

fn inv(words: &[&str]) -> StopwordInventory {
    StopwordInventory::new(Language::English, words)
}

fn english() -> &'static StopwordInventory {
    static INV: OnceLock<StopwordInventory> = OnceLock::new();
    INV.get_or_init(|| load_wordlists("en", Task::Sentiment).unwrap().0)
}

fn render(seq: &llmprep::tokenize::TokenSequence) -> String {
    seq.render()
}

#[test]
fn stopwords_removed_by_membership() {
    let out = remove_stopwords(&tokenize("the cat sat on the mat"), &inv(&["the", "on"]));
    assert_eq!(render(&out), "cat sat mat");
    assert_eq!(render(&remove_stopwords(&tokenize(""), &inv(&["the"]))), "");
}

#[test]
fn retained_negation_survives() {
    let i = inv(&["this", "is", "not"]).with_retained(["not"]);
    assert_eq!(render(&remove_stopwords(&tokenize("this is not good"), &i)), "not good");
}

#[test]
fn stemming_examples() {
    assert_eq!(stem("programs", Stemmer::Porter), "program");
    assert_eq!(stem("caresses", Stemmer::Porter), "caress");
    for s in [Stemmer::Porter, Stemmer::Lancaster, Stemmer::Snowball(Language::English)] {
        assert_eq!(stem("x", s), "x");
    }
    assert_eq!(render(&stem_sequence(&tokenize("programs!"), Stemmer::Porter)), "program !");
    assert!(stem_sequence(&tokenize(""), Stemmer::Porter).is_empty());
    assert_eq!(render(&stem_sequence(&tokenize("argue argued arguing"), Stemmer::Porter)), "argu argu argu");
}

#[test]
fn lemma_lookup_rules() {
    let mut entries = HashMap::new();
    entries.insert("is".to_string(), vec!["be".to_string()]);
    entries.insert("leaves".to_string(), vec!["leaf".to_string(), "leave".to_string()]);
    let table = LemmaTable::new(Language::English, entries, vec![]);
    assert_eq!(render(&lemmatize(&tokenize("is"), &table)), "be");
    assert_eq!(render(&lemmatize(&tokenize("cat"), &table)), "cat");
    assert_eq!(render(&lemmatize(&tokenize("leaves"), &table)), "leaf");
}

#[test]
fn bundled_english_lemmas() {
    let (_, table) = load_wordlists("en", Task::Sentiment).unwrap();
    for (w, l) in [("is", "be"), ("are", "be"), ("being", "be"), ("going", "go")] {
        assert_eq!(table.lemma(w), l, "{w}");
    }
}

#[test]
fn negations_kept_only_for_sentiment() {
    let (sentiment, _) = load_wordlists("en", Task::Sentiment).unwrap();
    let (news, _) = load_wordlists("en", Task::Topic).unwrap();
    assert!(!sentiment.effective().contains("not"));
    assert!(news.effective().contains("not"));
    assert!(news.contains("the") && sentiment.contains("the"));
}

#[test]
fn unknown_language_rejected() {
    assert!(matches!(load_wordlists("xx", Task::Sentiment), Err(ClassicError::UnknownLanguage(_))));
}

#[test]
fn every_language_has_word_lists() {
    for lang in Language::ALL {
        let c = Classic::load(lang, Task::Sentiment).unwrap();
        assert!(c.stopwords.words.len() > 50, "{lang}");
        assert!(!c.lemmas.entries.is_empty(), "{lang}");
    }
}

#[test]
fn combo_order() {
    assert_eq!(Combo::SwL.ops(), [Op::Lemma, Op::Stopwords]);
    assert_eq!(Combo::SwS.ops(), [Op::Stopwords, Op::Stem]);
    let labels: Vec<&str> = Combo::ALL.iter().map(|c| c.label()).collect();
    assert_eq!(labels, ["SW", "SW+L", "L", "SW+S", "S"]);
    for c in Combo::ALL {
        assert_eq!(c.label().parse::<Combo>().unwrap(), c);
    }
}

#[test]
fn lemma_then_stopwords_drops_lemmatized_auxiliaries() {
    let c = Classic::load(Language::English, Task::Sentiment).unwrap();
    let out = c.preprocess("he's going home", Combo::SwL, Stemmer::Porter);
    assert!(!out.norms().contains(&"be"), "{:?}", out.norms());
    assert!(out.norms().contains(&"go"));
}

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

// The bundled classic outputs are regenerated by the prime_fixture_cache
// example; drift here means the word lists or a stemmer changed.
#[test]
fn fixture_outputs_are_current() {
    for (name, file, lang) in [("en-tweets", "en_tweets.jsonl", Language::English), ("it-tweets", "it_tweets.jsonl", Language::Italian)] {
        let corpus = load_corpus(&fixtures().join(file), Format::Jsonl, lang.code(), &Columns::default()).unwrap();
        let classic = Classic::load(lang, Task::Sentiment).unwrap();
        for combo in Combo::ALL {
            let stemmers = if combo.uses_stemmer() { Stemmer::available_for(lang) } else { vec![Stemmer::available_for(lang)[0]] };
            for s in stemmers {
                let file = if combo.uses_stemmer() {
                    format!("{}-{}.jsonl", combo.slug(), s.label().to_lowercase())
                } else {
                    format!("{}.jsonl", combo.slug())
                };
                let raw = std::fs::read_to_string(fixtures().join("classic").join(name).join(&file)).unwrap();
                let want: Vec<serde_json::Value> = raw.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
                assert_eq!(want.len(), corpus.len(), "{file}");
                for (d, w) in corpus.docs.iter().zip(&want) {
                    assert_eq!(w["id"], d.id.as_str());
                    assert_eq!(classic.preprocess(&d.text, combo, s).render(), w["text"].as_str().unwrap(), "{name}/{file} {}", d.id);
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn stopword_removal_idempotent(text in "[a-z ,.!]{0,60}") {
        let i = english();
        let once = remove_stopwords(&tokenize(&text), i);
        let twice = remove_stopwords(&once, i);
        prop_assert_eq!(&once, &twice);
    }

    #[test]
    fn stopword_removal_keeps_order(text in "[a-z ]{0,60}") {
        let i = english();
        let seq = tokenize(&text);
        let out = remove_stopwords(&seq, i);
        let kept: Vec<&str> = seq.iter().filter(|t| !i.contains(&t.norm)).map(|t| t.norm.as_str()).collect();
        prop_assert_eq!(out.norms(), kept);
    }

    #[test]
    fn stemming_keeps_length_and_offsets(text in "[a-zA-Z ,!]{0,50}") {
        let seq = tokenize(&text);
        let out = stem_sequence(&seq, Stemmer::Lancaster);
        prop_assert_eq!(out.len(), seq.len());
        for (a, b) in seq.iter().zip(&out) {
            prop_assert_eq!((a.start, a.end, a.kind), (b.start, b.end, b.kind));
        }
    }
}
