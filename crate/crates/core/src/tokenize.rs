//! Unicode tokenizer shared by the classic pipeline and the agreement
//! metrics, so both sides count the same word units.
//!
//! Rules, applied per whitespace-separated chunk:
//! - a chunk starting with `scheme://` is a URL (trailing punctuation split off)
//! - `#` / `@` followed by word characters form hashtag / mention tokens
//! - runs of letters, digits and `_` form words; pure digit runs (with
//!   inner `.`/`,`/`:` between digits) are numbers
//! - English clitics are split off: `he's` -> `he` `'s`, `don't` -> `do` `n't`
//! - elisions keep the apostrophe on the left: `l'homme` -> `l'` `homme`
//! - everything else groups into punctuation runs

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Word,
    Number,
    Punct,
    Hashtag,
    Mention,
    Url,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub norm: String,
    /// Byte offsets into the source text. Tokens rewritten by a
    /// preprocessing step keep the offsets of the token they replace.
    pub start: usize,
    pub end: usize,
    pub kind: TokenKind,
}

impl Token {
    pub fn new(surface: &str, start: usize, end: usize, kind: TokenKind) -> Token {
        Token {
            surface: surface.to_string(),
            norm: normalize(surface),
            start,
            end,
            kind,
        }
    }

    /// Same position and kind, new text.
    pub fn with_text(&self, text: &str) -> Token {
        Token {
            surface: text.to_string(),
            norm: normalize(text),
            start: self.start,
            end: self.end,
            kind: self.kind,
        }
    }
}

/// Simple Unicode lowercase; no compatibility normalization.
pub fn normalize(s: &str) -> String {
    s.to_lowercase()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSequence {
    pub tokens: Vec<Token>,
}

impl TokenSequence {
    pub fn new(tokens: Vec<Token>) -> Self {
        TokenSequence { tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Token> {
        self.tokens.iter()
    }

    pub fn norms(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.norm.as_str()).collect()
    }

    pub fn surfaces(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    /// Surfaces joined by single spaces. Tokenizing the result gives back
    /// the same norms.
    pub fn render(&self) -> String {
        self.surfaces().join(" ")
    }
}

impl<'a> IntoIterator for &'a TokenSequence {
    type Item = &'a Token;
    type IntoIter = std::slice::Iter<'a, Token>;

    fn into_iter(self) -> Self::IntoIter {
        self.tokens.iter()
    }
}

impl FromIterator<Token> for TokenSequence {
    fn from_iter<I: IntoIterator<Item = Token>>(iter: I) -> Self {
        TokenSequence::new(iter.into_iter().collect())
    }
}

const CLITICS: [&str; 6] = ["s", "re", "ve", "ll", "d", "m"];

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// True when `chunk` begins with `scheme://`.
fn starts_with_scheme(chunk: &str) -> bool {
    let Some(pos) = chunk.find("://") else {
        return false;
    };
    let scheme = &chunk[..pos];
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

pub fn tokenize(text: &str) -> TokenSequence {
    let mut out = Vec::new();
    let mut chunk_start = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = chunk_start.take() {
                tokenize_chunk(text, s, i, &mut out);
            }
        } else if chunk_start.is_none() {
            chunk_start = Some(i);
        }
    }
    if let Some(s) = chunk_start {
        tokenize_chunk(text, s, text.len(), &mut out);
    }
    TokenSequence::new(out)
}

fn tokenize_chunk(text: &str, start: usize, end: usize, out: &mut Vec<Token>) {
    let chunk = &text[start..end];
    if starts_with_scheme(chunk) {
        let trimmed = chunk.trim_end_matches(|c: char| ".,!?;:)]}\"'".contains(c) || c == '\u{2019}');
        let url_end = start + trimmed.len();
        out.push(Token::new(trimmed, start, url_end, TokenKind::Url));
        if url_end < end {
            out.push(Token::new(&text[url_end..end], url_end, end, TokenKind::Punct));
        }
        return;
    }

    let chars: Vec<(usize, char)> = chunk.char_indices().map(|(i, c)| (start + i, c)).collect();
    let pos = |k: usize| if k < chars.len() { chars[k].0 } else { end };
    let at = |k: usize| chars.get(k).map(|&(_, c)| c);
    let word_run = |mut k: usize| {
        while matches!(at(k), Some(c) if is_word_char(c)) {
            k += 1;
        }
        k
    };

    let mut k = 0;
    let mut punct_from: Option<usize> = None;
    // set when the current word run was opened by a quote-like apostrophe
    let mut quoted = false;
    let flush_punct = |punct_from: &mut Option<usize>, upto: usize, out: &mut Vec<Token>| {
        if let Some(p) = punct_from.take() {
            let (s, e) = (pos(p), pos(upto));
            out.push(Token::new(&text[s..e], s, e, TokenKind::Punct));
        }
    };

    while k < chars.len() {
        let c = chars[k].1;

        if (c == '#' || c == '@') && matches!(at(k + 1), Some(n) if is_word_char(n)) {
            flush_punct(&mut punct_from, k, out);
            let e = word_run(k + 1);
            let kind = if c == '#' { TokenKind::Hashtag } else { TokenKind::Mention };
            out.push(Token::new(&text[pos(k)..pos(e)], pos(k), pos(e), kind));
            k = e;
            continue;
        }

        if is_apostrophe(c) {
            // standalone clitic such as "'s" (as produced by rendering)
            let e = word_run(k + 1);
            let suffix = &text[pos(k + 1)..pos(e)];
            let prev_is_word = k > 0 && is_word_char(chars[k - 1].1);
            if !prev_is_word && e > k + 1 && CLITICS.contains(&suffix.to_lowercase().as_str()) {
                flush_punct(&mut punct_from, k, out);
                out.push(Token::new(&text[pos(k)..pos(e)], pos(k), pos(e), TokenKind::Word));
                k = e;
                quoted = false;
                continue;
            }
            quoted = !prev_is_word && e > k + 1;
            if punct_from.is_none() {
                punct_from = Some(k);
            }
            k += 1;
            continue;
        }

        if is_word_char(c) {
            flush_punct(&mut punct_from, k, out);
            let e = word_run(k);
            k = emit_word(text, &chars, k, e, end, quoted, out);
            quoted = false;
            continue;
        }

        if punct_from.is_none() {
            punct_from = Some(k);
        }
        k += 1;
    }
    flush_punct(&mut punct_from, chars.len(), out);
}

/// Emits the word run `chars[s..e]` plus whatever apostrophe handling
/// applies right after it; returns the index to continue from.
fn emit_word(
    text: &str,
    chars: &[(usize, char)],
    s: usize,
    e: usize,
    end: usize,
    quoted: bool,
    out: &mut Vec<Token>,
) -> usize {
    let pos = |k: usize| if k < chars.len() { chars[k].0 } else { end };
    let at = |k: usize| chars.get(k).map(|&(_, c)| c);
    let word = |a: usize, b: usize, out: &mut Vec<Token>| {
        let (ps, pe) = (pos(a), pos(b));
        let t = &text[ps..pe];
        let kind = if is_number(t) { TokenKind::Number } else { TokenKind::Word };
        out.push(Token::new(t, ps, pe, kind));
    };

    // numbers like 3.14 or 1,000 or 10:30
    if chars[s..e].iter().all(|&(_, c)| c.is_ascii_digit()) {
        let mut e2 = e;
        while matches!(at(e2), Some('.' | ',' | ':')) && matches!(at(e2 + 1), Some(c) if c.is_ascii_digit()) {
            e2 += 1;
            while matches!(at(e2), Some(c) if c.is_ascii_digit()) {
                e2 += 1;
            }
        }
        word(s, e2, out);
        return e2;
    }

    if !matches!(at(e), Some(c) if is_apostrophe(c)) {
        word(s, e, out);
        return e;
    }

    let after = {
        let mut k = e + 1;
        while matches!(at(k), Some(c) if is_word_char(c)) {
            k += 1;
        }
        k
    };
    if after == e + 1 {
        // trailing apostrophe: elided form ("l'", "dell'") unless it closes a quote
        if quoted {
            word(s, e, out);
            return e;
        }
        word(s, e + 1, out);
        return e + 1;
    }
    let suffix: String = chars[e + 1..after].iter().map(|&(_, c)| c).collect::<String>().to_lowercase();
    let left_last = chars[e - 1].1.to_lowercase().next().unwrap_or(' ');
    if suffix == "t" && left_last == 'n' {
        // don't -> do n't
        if e - 1 > s {
            word(s, e - 1, out);
        }
        let (ps, pe) = (pos(e - 1), pos(after));
        out.push(Token::new(&text[ps..pe], ps, pe, TokenKind::Word));
        return after;
    }
    if CLITICS.contains(&suffix.as_str()) {
        word(s, e, out);
        let (ps, pe) = (pos(e), pos(after));
        out.push(Token::new(&text[ps..pe], ps, pe, TokenKind::Word));
        return after;
    }
    // elision: apostrophe stays with the left part
    word(s, e + 1, out);
    e + 1
}

fn is_number(t: &str) -> bool {
    t.starts_with(|c: char| c.is_ascii_digit())
        && t.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | ',' | ':'))
}

/// Keeps only `kind = word` tokens.
pub fn word_tokens(seq: &TokenSequence) -> TokenSequence {
    seq.iter().filter(|t| t.kind == TokenKind::Word).cloned().collect()
}

/// Which token kinds count as words for the agreement metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordFilter {
    pub hashtags: bool,
    pub mentions: bool,
}

impl Default for WordFilter {
    fn default() -> Self {
        WordFilter {
            hashtags: true,
            mentions: false,
        }
    }
}

impl WordFilter {
    pub fn accepts(&self, kind: TokenKind) -> bool {
        match kind {
            TokenKind::Word => true,
            TokenKind::Hashtag => self.hashtags,
            TokenKind::Mention => self.mentions,
            _ => false,
        }
    }

    pub fn apply(&self, seq: &TokenSequence) -> TokenSequence {
        seq.iter().filter(|t| self.accepts(t.kind)).cloned().collect()
    }
}
