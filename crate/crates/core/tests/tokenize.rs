use llmprep::tokenize::{normalize, tokenize, word_tokens, TokenKind, WordFilter};
use proptest::prelude::*;

fn parts(text: &str) -> Vec<(String, TokenKind)> {
    tokenize(text).iter().map(|t| (t.surface.clone(), t.kind)).collect()
}

fn surfaces(text: &str) -> Vec<String> {
    tokenize(text).iter().map(|t| t.surface.clone()).collect()
}

#[test]
fn empty_text() {
    assert!(tokenize("").is_empty());
    assert!(tokenize("   \n\t").is_empty());
}

#[test]
fn hashtag_and_punct() {
    use TokenKind::*;
    let want = [("I", Word), ("love", Word), ("#NLP", Hashtag), ("!", Punct)];
    let got = parts("I love #NLP!");
    assert_eq!(got, want.map(|(s, k)| (s.to_string(), k)));
}

#[test]
fn clitics_split() {
    assert_eq!(surfaces("he's going"), ["he", "'s", "going"]);
    assert_eq!(surfaces("don't"), ["do", "n't"]);
}

#[test]
fn elision_keeps_apostrophe_left() {
    assert_eq!(surfaces("l'homme"), ["l'", "homme"]);
}

#[test]
fn urls_mentions_numbers() {
    use TokenKind::*;
    let got = parts("@bob see https://x.org/a?b=1, 3.14 now");
    let kinds: Vec<TokenKind> = got.iter().map(|p| p.1).collect();
    assert_eq!(kinds, [Mention, Word, Url, Punct, Number, Word]);
    assert_eq!(got[2].0, "https://x.org/a?b=1");
}

#[test]
fn word_tokens_filters_by_kind() {
    let words: Vec<String> = word_tokens(&tokenize("I love #NLP!")).iter().map(|t| t.surface.clone()).collect();
    assert_eq!(words, ["I", "love"]);
    assert!(word_tokens(&tokenize("")).is_empty());
    assert!(word_tokens(&tokenize("?! ... ;")).is_empty());
}

#[test]
fn word_filter_defaults_keep_hashtags_only() {
    let f = WordFilter::default();
    assert!(f.accepts(TokenKind::Word));
    assert!(f.accepts(TokenKind::Hashtag));
    assert!(!f.accepts(TokenKind::Mention));
    assert!(!f.accepts(TokenKind::Url));
    assert_eq!(f.apply(&tokenize("@a #b c !")).len(), 2);
}

#[test]
fn norms_are_lowercase() {
    let seq = tokenize("ÉCOLE Straße");
    assert_eq!(seq.norms(), ["école", "straße"]);
}

proptest! {
    #[test]
    fn offsets_point_at_surfaces(text in "[a-zA-Zàé0-9#@'.,!? :/_-]{0,60}") {
        let seq = tokenize(&text);
        let mut last = 0;
        for t in &seq {
            prop_assert_eq!(&text[t.start..t.end], t.surface.as_str());
            prop_assert!(t.start >= last);
            prop_assert!(!t.surface.trim().is_empty());
            last = t.end;
        }
    }

    #[test]
    fn normalize_is_idempotent(s in "\\PC{0,20}") {
        let once = normalize(&s);
        prop_assert_eq!(normalize(&once), once.clone());
    }

    #[test]
    fn deterministic(text in "\\PC{0,40}") {
        prop_assert_eq!(tokenize(&text), tokenize(&text));
    }
}
