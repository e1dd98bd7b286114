//! Labeled corpora: loading from JSONL/TSV/CSV and deterministic
//! stratified train/validation/test assignment.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::Language;

/// Name of the PRNG behind every seeded choice, recorded in run reports.
pub const PRNG_NAME: &str = "ChaCha8 (rand_chacha 0.3, seed_from_u64)";

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown language code {0:?} (expected one of en, fr, de, it, pt, es)")]
    UnknownLanguage(String),
    #[error("unknown corpus format {0:?} (expected jsonl, tsv or csv)")]
    UnknownFormat(String),
    #[error("line {line}: missing field '{field}'")]
    MissingField { line: usize, field: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate id {id:?}")]
    DuplicateId { line: usize, id: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
    #[default]
    Unassigned,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
            Split::Unassigned => "unassigned",
        })
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "validation" | "valid" | "dev" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            "unassigned" | "" => Ok(Split::Unassigned),
            other => Err(format!("unknown split {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub label: String,
    pub language: Language,
    #[serde(default)]
    pub split: Split,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub docs: Vec<Document>,
}

impl Corpus {
    pub fn new(docs: Vec<Document>) -> Self {
        Corpus { docs }
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &Document> {
        self.docs.iter().filter(move |d| d.split == split)
    }

    /// Documents per label, labels in lexicographic order.
    pub fn class_counts(&self) -> BTreeMap<&str, usize> {
        let mut counts = BTreeMap::new();
        for d in &self.docs {
            *counts.entry(d.label.as_str()).or_insert(0) += 1;
        }
        counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Jsonl,
    Tsv,
    Csv,
}

impl FromStr for Format {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "jsonl" | "ndjson" => Ok(Format::Jsonl),
            "tsv" => Ok(Format::Tsv),
            "csv" => Ok(Format::Csv),
            _ => Err(CorpusError::UnknownFormat(s.to_string())),
        }
    }
}

impl Format {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Format> {
        path.extension()?.to_str()?.parse().ok()
    }
}

/// Field names to read from each record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Columns {
    pub text: String,
    pub label: String,
    /// Used when present in the record; otherwise ids are `<filename>:<line>`.
    pub id: String,
    /// Optional pre-assigned split column.
    pub split: String,
}

impl Default for Columns {
    fn default() -> Self {
        Columns {
            text: "text".into(),
            label: "label".into(),
            id: "id".into(),
            split: "split".into(),
        }
    }
}

struct RawRecord {
    line: usize,
    text: Option<String>,
    label: Option<String>,
    id: Option<String>,
    split: Option<String>,
}

/// Loads a corpus in file order. The language code is validated before
/// the file is opened.
pub fn load_corpus(path: &Path, format: Format, language: &str, columns: &Columns) -> Result<Corpus, CorpusError> {
    let language: Language = language
        .parse()
        .map_err(|_| CorpusError::UnknownLanguage(language.to_string()))?;
    let raw = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let records = match format {
        Format::Jsonl => read_jsonl(&raw, columns)?,
        Format::Tsv => read_delimited(&raw, b'\t', false, columns)?,
        Format::Csv => read_delimited(&raw, b',', true, columns)?,
    };
    let file_name = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();

    let mut seen = HashSet::new();
    let mut docs = Vec::with_capacity(records.len());
    for r in records {
        let text = r.text.ok_or_else(|| CorpusError::MissingField {
            line: r.line,
            field: columns.text.clone(),
        })?;
        let label = r.label.filter(|l| !l.is_empty()).ok_or_else(|| CorpusError::MissingField {
            line: r.line,
            field: columns.label.clone(),
        })?;
        let id = r.id.filter(|i| !i.is_empty()).unwrap_or_else(|| format!("{file_name}:{}", r.line));
        if !seen.insert(id.clone()) {
            return Err(CorpusError::DuplicateId { line: r.line, id });
        }
        let split = match r.split {
            Some(s) => s.parse().map_err(|message| CorpusError::Malformed { line: r.line, message })?,
            None => Split::Unassigned,
        };
        docs.push(Document {
            id,
            text,
            label,
            language,
            split,
        });
    }
    Ok(Corpus::new(docs))
}

fn json_field(obj: &serde_json::Map<String, serde_json::Value>, key: &str) -> Option<String> {
    match obj.get(key)? {
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Null => None,
        serde_json::Value::Number(n) => Some(n.to_string()),
        serde_json::Value::Bool(b) => Some(b.to_string()),
        other => Some(other.to_string()),
    }
}

fn read_jsonl(raw: &str, columns: &Columns) -> Result<Vec<RawRecord>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(line).map_err(|e| CorpusError::Malformed {
            line: line_no,
            message: format!("invalid JSON: {e}"),
        })?;
        let obj = value.as_object().ok_or_else(|| CorpusError::Malformed {
            line: line_no,
            message: "expected a JSON object".into(),
        })?;
        out.push(RawRecord {
            line: line_no,
            text: json_field(obj, &columns.text),
            label: json_field(obj, &columns.label),
            id: json_field(obj, &columns.id),
            split: json_field(obj, &columns.split),
        });
    }
    Ok(out)
}

fn read_delimited(raw: &str, delimiter: u8, quoting: bool, columns: &Columns) -> Result<Vec<RawRecord>, CorpusError> {
    if raw.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .quoting(quoting)
        .flexible(true)
        .has_headers(true)
        .from_reader(raw.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CorpusError::Malformed {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (text_col, label_col, id_col, split_col) =
        (col(&columns.text), col(&columns.label), col(&columns.id), col(&columns.split));

    let mut out = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| CorpusError::Malformed {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let get = |c: Option<usize>| c.and_then(|i| record.get(i)).map(str::to_string);
        out.push(RawRecord {
            line,
            text: get(text_col),
            label: get(label_col),
            id: get(id_col),
            split: get(split_col).filter(|s| !s.is_empty()),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    pub max_train: usize,
    pub max_test: usize,
    pub validation_size: usize,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            max_train: 3000,
            max_test: 3000,
            validation_size: 2000,
            seed: 0,
        }
    }
}

/// Seats per class for a sample of `size` out of `counts`: the floor of
/// the proportional share, then one extra seat each to the largest classes
/// (ties by label) until the sample is full. Never exceeds a class count.
pub fn apportion(counts: &BTreeMap<String, usize>, size: usize) -> BTreeMap<String, usize> {
    let total: usize = counts.values().sum();
    let size = size.min(total);
    let mut seats: BTreeMap<String, usize> = counts
        .iter()
        .map(|(label, &n)| {
            let share = if total == 0 { 0 } else { (size as u128 * n as u128 / total as u128) as usize };
            (label.clone(), share)
        })
        .collect();
    let mut order: Vec<(&String, &usize)> = counts.iter().collect();
    order.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    let mut left = size - seats.values().sum::<usize>();
    while left > 0 {
        let mut progressed = false;
        for (label, &n) in &order {
            if left == 0 {
                break;
            }
            let s = seats.get_mut(*label).expect("label present");
            if *s < n {
                *s += 1;
                left -= 1;
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    seats
}

fn counts_of(docs: &[&Document]) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for d in docs {
        *counts.entry(d.label.clone()).or_insert(0) += 1;
    }
    counts
}

/// Shuffles each class of `pool` with `rng` (classes in label order) and
/// returns the per-class queues.
fn shuffled_by_class<'a>(pool: &[&'a Document], rng: &mut ChaCha8Rng) -> BTreeMap<String, Vec<&'a Document>> {
    let mut by_class: BTreeMap<String, Vec<&Document>> = BTreeMap::new();
    for d in pool {
        by_class.entry(d.label.clone()).or_default().push(d);
    }
    for docs in by_class.values_mut() {
        docs.shuffle(rng);
    }
    by_class
}

/// Takes `seats[c]` documents from the front of each class queue.
fn take(queues: &mut BTreeMap<String, Vec<&Document>>, seats: &BTreeMap<String, usize>) -> Vec<String> {
    let mut ids = Vec::new();
    for (label, queue) in queues.iter_mut() {
        let n = seats.get(label).copied().unwrap_or(0).min(queue.len());
        ids.extend(queue.drain(..n).map(|d| d.id.clone()));
    }
    ids
}

/// Assigns train/validation/test splits.
///
/// Without pre-assigned splits the whole corpus is one pool: the train
/// sample is apportioned first from the corpus class counts, then the test
/// sample, then validation, each from what is left. With pre-assigned
/// splits, train and validation are drawn from the documents marked
/// train/validation and test from those marked test. Counts are capped at
/// what is available.
pub fn stratified_split(corpus: &Corpus, spec: &SplitSpec) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let preassigned = corpus.docs.iter().any(|d| d.split != Split::Unassigned);
    let mut assignment: BTreeMap<String, Split> = BTreeMap::new();

    if preassigned {
        let train_pool: Vec<&Document> = corpus
            .docs
            .iter()
            .filter(|d| matches!(d.split, Split::Train | Split::Validation))
            .collect();
        let test_pool: Vec<&Document> = corpus.docs.iter().filter(|d| d.split == Split::Test).collect();

        let train_counts = counts_of(&train_pool);
        let train_seats = apportion(&train_counts, spec.max_train);
        let mut queues = shuffled_by_class(&train_pool, &mut rng);
        for id in take(&mut queues, &train_seats) {
            assignment.insert(id, Split::Train);
        }
        let rest: BTreeMap<String, usize> = queues.iter().map(|(l, q)| (l.clone(), q.len())).collect();
        for id in take(&mut queues, &apportion(&rest, spec.validation_size)) {
            assignment.insert(id, Split::Validation);
        }

        let test_counts = counts_of(&test_pool);
        let mut test_queues = shuffled_by_class(&test_pool, &mut rng);
        for id in take(&mut test_queues, &apportion(&test_counts, spec.max_test)) {
            assignment.insert(id, Split::Test);
        }
    } else {
        let pool: Vec<&Document> = corpus.docs.iter().collect();
        let counts = counts_of(&pool);
        let mut queues = shuffled_by_class(&pool, &mut rng);
        for id in take(&mut queues, &apportion(&counts, spec.max_train)) {
            assignment.insert(id, Split::Train);
        }
        for (split, size) in [(Split::Test, spec.max_test), (Split::Validation, spec.validation_size)] {
            let rest: BTreeMap<String, usize> = queues.iter().map(|(l, q)| (l.clone(), q.len())).collect();
            for id in take(&mut queues, &apportion(&rest, size)) {
                assignment.insert(id, split);
            }
        }
    }

    let docs = corpus
        .docs
        .iter()
        .map(|d| Document {
            split: assignment.get(&d.id).copied().unwrap_or(Split::Unassigned),
            ..d.clone()
        })
        .collect();
    Corpus::new(docs)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub id: String,
    pub split: Split,
}

/// Writes `{id, split}` lines in corpus order.
pub fn write_split_sidecar(corpus: &Corpus, path: &Path) -> std::io::Result<()> {
    let mut out = Vec::new();
    for d in &corpus.docs {
        let rec = SplitRecord {
            id: d.id.clone(),
            split: d.split,
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.push(b'\n');
    }
    let mut f = fs::File::create(path)?;
    f.write_all(&out)
}

/// Applies a sidecar written by [`write_split_sidecar`]; documents not
/// listed become unassigned.
pub fn read_split_sidecar(corpus: &Corpus, path: &Path) -> Result<Corpus, CorpusError> {
    let raw = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut splits = BTreeMap::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: SplitRecord = serde_json::from_str(line).map_err(|e| CorpusError::Malformed {
            line: i + 1,
            message: e.to_string(),
        })?;
        splits.insert(rec.id, rec.split);
    }
    let docs = corpus
        .docs
        .iter()
        .map(|d| Document {
            split: splits.get(&d.id).copied().unwrap_or(Split::Unassigned),
            ..d.clone()
        })
        .collect();
    Ok(Corpus::new(docs))
}
