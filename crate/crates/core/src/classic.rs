//! Classic preprocessing: list-based stopword removal, rule stemmers and a
//! lookup lemmatizer, plus the combo chains used throughout the pipeline.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::tokenize::{tokenize, Token, TokenKind, TokenSequence};
use crate::{Language, Stemmer};

/// Overrides the bundled data directory.
pub const DATA_DIR_ENV: &str = "LLMPREP_DATA_DIR";

#[derive(Debug, thiserror::Error)]
pub enum ClassicError {
    #[error("unknown language code {0:?} (expected one of en, fr, de, it, pt, es)")]
    UnknownLanguage(String),
    #[error("missing data file {}", .0.display())]
    MissingData(PathBuf),
    #[error("{path}:{line}: {message}")]
    Malformed { path: PathBuf, line: usize, message: String },
    #[error("unknown task {0:?} (expected sentiment or topic)")]
    UnknownTask(String),
    #[error(transparent)]
    Stemmer(#[from] llmprep_stem::RuleError),
}

/// Task type, which decides whether negation words survive stopword removal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Sentiment,
    #[default]
    Topic,
}

impl Task {
    pub fn keeps_negations(self) -> bool {
        self == Task::Sentiment
    }
}

impl FromStr for Task {
    type Err = ClassicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "sentiment" | "polarity" => Ok(Task::Sentiment),
            "topic" | "news" | "other" => Ok(Task::Topic),
            _ => Err(ClassicError::UnknownTask(s.to_string())),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Sentiment => "sentiment",
            Task::Topic => "topic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopwordInventory {
    pub language: Language,
    pub words: BTreeSet<String>,
    pub retained: BTreeSet<String>,
}

impl StopwordInventory {
    pub fn new<I, S>(language: Language, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        StopwordInventory {
            language,
            words: words.into_iter().map(|w| w.as_ref().to_lowercase()).collect(),
            retained: BTreeSet::new(),
        }
    }

    pub fn with_retained<I, S>(mut self, retained: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.retained = retained.into_iter().map(|w| w.as_ref().to_lowercase()).collect();
        self
    }

    /// Membership in the effective inventory (words minus retained).
    pub fn contains(&self, norm: &str) -> bool {
        self.words.contains(norm) && !self.retained.contains(norm)
    }

    pub fn effective(&self) -> BTreeSet<&str> {
        self.words
            .iter()
            .filter(|w| !self.retained.contains(*w))
            .map(String::as_str)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaTable {
    pub language: Language,
    pub entries: HashMap<String, Vec<String>>,
    /// Sorted longest pattern first; file order among equal lengths.
    pub suffix_rules: Vec<(String, String)>,
}

impl LemmaTable {
    pub fn new(language: Language, entries: HashMap<String, Vec<String>>, mut suffix_rules: Vec<(String, String)>) -> Self {
        entries.values().for_each(|c| assert!(!c.is_empty(), "lemma candidate list must be non-empty"));
        suffix_rules.sort_by_key(|(p, _)| std::cmp::Reverse(p.chars().count()));
        LemmaTable {
            language,
            entries,
            suffix_rules,
        }
    }

    pub fn empty(language: Language) -> Self {
        LemmaTable::new(language, HashMap::new(), Vec::new())
    }

    /// First table candidate, else the first matching suffix rule, else
    /// the input itself. A rule needs at least two characters left over.
    pub fn lemma(&self, norm: &str) -> String {
        if let Some(c) = self.entries.get(norm) {
            return c[0].clone();
        }
        let len = norm.chars().count();
        for (pattern, replacement) in &self.suffix_rules {
            if len >= pattern.chars().count() + 2 && norm.ends_with(pattern.as_str()) {
                return format!("{}{}", &norm[..norm.len() - pattern.len()], replacement);
            }
        }
        norm.to_string()
    }
}

pub fn remove_stopwords(seq: &TokenSequence, inv: &StopwordInventory) -> TokenSequence {
    seq.iter()
        .filter(|t| !(t.kind == TokenKind::Word && inv.contains(&t.norm)))
        .cloned()
        .collect()
}

/// Stems one word; input without letters comes back unchanged.
pub fn stem(word: &str, algo: Stemmer) -> String {
    algo.stem(word)
}

fn stemmable(t: &Token) -> bool {
    t.kind == TokenKind::Word && t.surface.chars().all(char::is_alphabetic)
}

/// Stems purely alphabetic word tokens. Clitics, elisions and everything
/// that is not a word pass through.
pub fn stem_sequence(seq: &TokenSequence, algo: Stemmer) -> TokenSequence {
    seq.iter()
        .map(|t| if stemmable(t) { t.with_text(&algo.stem(&t.norm)) } else { t.clone() })
        .collect()
}

pub fn lemmatize(seq: &TokenSequence, table: &LemmaTable) -> TokenSequence {
    seq.iter()
        .map(|t| {
            if t.kind != TokenKind::Word {
                return t.clone();
            }
            let lemma = table.lemma(&t.norm);
            if lemma == t.norm {
                t.clone()
            } else {
                t.with_text(&lemma)
            }
        })
        .collect()
}

/// Directory holding `<code>/stopwords.txt` and friends.
pub fn data_dir() -> PathBuf {
    match std::env::var_os(DATA_DIR_ENV) {
        Some(dir) => PathBuf::from(dir),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("data"),
    }
}

fn read_data(path: &Path) -> Result<String, ClassicError> {
    fs::read_to_string(path).map_err(|_| ClassicError::MissingData(path.to_path_buf()))
}

fn entries(raw: &str) -> impl Iterator<Item = (usize, &str)> {
    raw.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn read_list(path: &Path) -> Result<Vec<String>, ClassicError> {
    Ok(entries(&read_data(path)?).map(|(_, l)| l.trim().to_lowercase()).collect())
}

fn read_pairs(path: &Path) -> Result<Vec<(String, String)>, ClassicError> {
    let raw = read_data(path)?;
    entries(&raw)
        .map(|(line, l)| match l.split_once('\t') {
            Some((a, b)) => Ok((a.to_string(), b.to_string())),
            None => Err(ClassicError::Malformed {
                path: path.to_path_buf(),
                line,
                message: "expected two tab-separated fields".into(),
            }),
        })
        .collect()
}

pub fn load_stopwords_from(dir: &Path, language: Language, task: Task) -> Result<StopwordInventory, ClassicError> {
    let base = dir.join(language.code());
    let inv = StopwordInventory::new(language, read_list(&base.join("stopwords.txt"))?);
    Ok(if task.keeps_negations() {
        inv.with_retained(read_list(&base.join("negations.txt"))?)
    } else {
        inv
    })
}

pub fn load_lemmas_from(dir: &Path, language: Language) -> Result<LemmaTable, ClassicError> {
    let base = dir.join(language.code());
    let table_path = base.join("lemmas.tsv");
    let mut table = HashMap::new();
    for (surface, lemmas) in read_pairs(&table_path)? {
        let candidates: Vec<String> = lemmas.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect();
        if candidates.is_empty() {
            return Err(ClassicError::Malformed {
                path: table_path,
                line: 0,
                message: format!("no lemma for {surface:?}"),
            });
        }
        table.insert(surface, candidates);
    }
    let rules = read_pairs(&base.join("lemma_rules.tsv"))?;
    Ok(LemmaTable::new(language, table, rules))
}

/// Loads the stopword inventory and lemma table for a language code from
/// [`data_dir`].
pub fn load_wordlists(language: &str, task: Task) -> Result<(StopwordInventory, LemmaTable), ClassicError> {
    let language: Language = language.parse().map_err(|_| ClassicError::UnknownLanguage(language.to_string()))?;
    let dir = data_dir();
    Ok((load_stopwords_from(&dir, language, task)?, load_lemmas_from(&dir, language)?))
}

/// One preprocessing operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    Stopwords,
    Lemma,
    Stem,
}

impl Op {
    pub fn label(self) -> &'static str {
        match self {
            Op::Stopwords => "SW",
            Op::Lemma => "L",
            Op::Stem => "S",
        }
    }
}

impl FromStr for Op {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "sw" | "stopwords" | "stopword" | "stopword_removal" => Ok(Op::Stopwords),
            "lemma" | "l" | "lemmatize" | "lemmatization" => Ok(Op::Lemma),
            "stem" | "s" | "stemming" => Ok(Op::Stem),
            other => Err(format!("unknown operation {other:?} (expected sw, lemma or stem)")),
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Op::Stopwords => "sw",
            Op::Lemma => "lemma",
            Op::Stem => "stem",
        })
    }
}

/// A preprocessing chain evaluated in classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Combo {
    #[serde(rename = "SW")]
    Sw,
    #[serde(rename = "SW+L")]
    SwL,
    #[serde(rename = "L")]
    L,
    #[serde(rename = "SW+S")]
    SwS,
    #[serde(rename = "S")]
    S,
}

impl Combo {
    pub const ALL: [Combo; 5] = [Combo::Sw, Combo::SwL, Combo::L, Combo::SwS, Combo::S];

    pub fn label(self) -> &'static str {
        match self {
            Combo::Sw => "SW",
            Combo::SwL => "SW+L",
            Combo::L => "L",
            Combo::SwS => "SW+S",
            Combo::S => "S",
        }
    }

    /// Operations in application order: lemmatization runs before
    /// stopword removal, stopword removal before stemming.
    pub fn ops(self) -> &'static [Op] {
        match self {
            Combo::Sw => &[Op::Stopwords],
            Combo::SwL => &[Op::Lemma, Op::Stopwords],
            Combo::L => &[Op::Lemma],
            Combo::SwS => &[Op::Stopwords, Op::Stem],
            Combo::S => &[Op::Stem],
        }
    }

    pub fn uses_stemmer(self) -> bool {
        self.ops().contains(&Op::Stem)
    }

    /// File-name friendly form.
    pub fn slug(self) -> &'static str {
        match self {
            Combo::Sw => "sw",
            Combo::SwL => "sw_l",
            Combo::L => "l",
            Combo::SwS => "sw_s",
            Combo::S => "s",
        }
    }
}

impl fmt::Display for Combo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Combo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| !c.is_whitespace() && *c != '_').collect::<String>().to_uppercase();
        match key.as_str() {
            "SW" => Ok(Combo::Sw),
            "SW+L" | "SWL" => Ok(Combo::SwL),
            "L" => Ok(Combo::L),
            "SW+S" | "SWS" => Ok(Combo::SwS),
            "S" => Ok(Combo::S),
            _ => Err(format!("unknown combo {s:?} (expected SW, SW+L, L, SW+S or S)")),
        }
    }
}

/// Word lists for one language and task, ready to run chains.
#[derive(Debug, Clone)]
pub struct Classic {
    pub stopwords: StopwordInventory,
    pub lemmas: LemmaTable,
}

impl Classic {
    pub fn new(stopwords: StopwordInventory, lemmas: LemmaTable) -> Self {
        Classic { stopwords, lemmas }
    }

    pub fn load(language: Language, task: Task) -> Result<Self, ClassicError> {
        let dir = data_dir();
        Ok(Classic::new(load_stopwords_from(&dir, language, task)?, load_lemmas_from(&dir, language)?))
    }

    pub fn language(&self) -> Language {
        self.stopwords.language
    }

    pub fn apply(&self, op: Op, seq: &TokenSequence, stemmer: Stemmer) -> TokenSequence {
        match op {
            Op::Stopwords => remove_stopwords(seq, &self.stopwords),
            Op::Lemma => lemmatize(seq, &self.lemmas),
            Op::Stem => stem_sequence(seq, stemmer),
        }
    }

    pub fn run_ops(&self, ops: &[Op], seq: &TokenSequence, stemmer: Stemmer) -> TokenSequence {
        ops.iter().fold(seq.clone(), |acc, &op| self.apply(op, &acc, stemmer))
    }

    /// Tokenizes `text` and applies the combo chain.
    pub fn preprocess(&self, text: &str, combo: Combo, stemmer: Stemmer) -> TokenSequence {
        self.run_ops(combo.ops(), &tokenize(text), stemmer)
    }
}
