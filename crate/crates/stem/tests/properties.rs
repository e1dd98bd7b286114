//! Stemmer invariants: determinism, passthrough of non-words, non-empty
//! output, and the pinned idempotence counts on the reference vocabulary.

use std::path::PathBuf;

use llmprep_stem::{Language, Stemmer};
use proptest::prelude::*;

fn vocabulary(file: &str) -> Vec<String> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(file);
    std::fs::read_to_string(path)
        .expect("oracle table")
        .lines()
        .skip(1)
        .filter_map(|l| l.split('\t').next())
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect()
}

fn idempotent_count(stemmer: Stemmer, words: &[String]) -> usize {
    words
        .iter()
        .filter(|w| {
            let once = stemmer.stem(w);
            stemmer.stem(&once) == once
        })
        .count()
}

// Stemming a stem again is not a no-op under the published rules (for
// example Porter maps "used" to "us" and then "us" to "u").
// These are the observed counts; a change means the rules changed.
#[test]
fn idempotence_counts_are_pinned() {
    assert_eq!(Stemmer::Porter.stem("used"), "us");
    assert_eq!(Stemmer::Porter.stem("us"), "u");
    let english = vocabulary("english.tsv");
    let cases = [
        (Stemmer::Porter, &english, 5851),
        (Stemmer::Lancaster, &english, 5753),
        (Stemmer::Snowball(Language::English), &english, 5907),
    ];
    for (s, words, want) in cases {
        assert_eq!(words.len(), 6073);
        assert_eq!(idempotent_count(s, words), want, "{s}");
    }
    let others = [
        (Language::French, 2607, 2995),
        (Language::German, 2964, 3000),
        (Language::Italian, 2907, 2998),
        (Language::Portuguese, 2556, 3000),
        (Language::Spanish, 2817, 3000),
    ];
    for (lang, want, total) in others {
        let words = vocabulary(&format!("snowball_{}.tsv", lang.name()));
        assert_eq!(words.len(), total);
        assert_eq!(idempotent_count(Stemmer::Snowball(lang), &words), want, "{lang}");
    }
}

#[test]
fn single_letters_pass_through() {
    for lang in Language::ALL {
        for s in Stemmer::available_for(lang) {
            assert_eq!(s.stem("x"), "x", "{s}");
        }
    }
}

fn any_stemmer() -> impl Strategy<Value = Stemmer> {
    prop_oneof![
        Just(Stemmer::Porter),
        Just(Stemmer::Lancaster),
        proptest::sample::select(Language::ALL.to_vec()).prop_map(Stemmer::Snowball),
    ]
}

proptest! {
    #[test]
    fn deterministic_and_non_empty(s in any_stemmer(), w in "[a-zàèéìòóùäöüßçñãõâêô]{1,14}") {
        let a = s.stem(&w);
        prop_assert_eq!(&a, &s.stem(&w));
        prop_assert!(!a.is_empty());
    }

    #[test]
    fn non_words_unchanged(s in any_stemmer(), w in "[0-9.,!?#@%-]{1,10}") {
        prop_assert_eq!(s.stem(&w), w);
    }

    #[test]
    fn english_stems_stay_ascii(s in proptest::sample::select(Stemmer::available_for(Language::English)), w in "[a-z]{1,16}") {
        prop_assert!(s.stem(&w).is_ascii());
    }

    #[test]
    fn case_is_ignored(s in any_stemmer(), w in "[a-z]{1,12}") {
        prop_assert_eq!(s.stem(&w.to_uppercase()), s.stem(&w));
    }
}
