//! Markdown, CSV and JSON emission of run results. Emission is a pure
//! function of the run object, so equal runs give equal bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{io_err, AgreementCell, AgreementRun, ClassificationCell, ClassificationRun, RunError, TuningRun};
use crate::agreement::Averaging;
use crate::Language;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
    Json,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 3] = [ReportFormat::Markdown, ReportFormat::Csv, ReportFormat::Json];

    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Markdown => "md",
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(format!("unknown report format {s:?} (expected markdown, csv or json)")),
        }
    }
}

pub const AGREEMENT_STEM: &str = "agreement";
pub const CLASSIFICATION_STEM: &str = "classification";
pub const TUNING_STEM: &str = "tuning";

pub fn fmt2(v: f64) -> String {
    format!("{v:.2}")
}

fn full(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Parses a JSON report written by this module.
pub fn from_json<T: DeserializeOwned>(source: &str) -> Result<T, RunError> {
    serde_json::from_str(source).map_err(|e| RunError::Config(format!("unreadable report JSON: {e}")))
}

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in rows {
        w.write_record(&r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

/// One rendered table cell: values in display order, joined by `sep`.
struct Cell {
    values: Vec<Option<f64>>,
    sep: &'static str,
}

fn render_cell(cell: &Cell, best: Option<f64>) -> String {
    if cell.values.is_empty() {
        return "n/a".into();
    }
    let parts: Vec<String> = cell
        .values
        .iter()
        .map(|v| match v {
            Some(v) if best.is_some_and(|b| fmt2(b) == fmt2(*v)) => format!("**{}**", fmt2(*v)),
            Some(v) => fmt2(*v),
            None => "n/a".into(),
        })
        .collect();
    parts.join(cell.sep)
}

fn best_of<'a>(cells: impl Iterator<Item = &'a Cell>, lower_is_better: bool) -> Option<f64> {
    cells.flat_map(|c| c.values.iter().flatten().copied()).fold(None, |acc, v| match acc {
        None => Some(v),
        Some(a) if (lower_is_better && v < a) || (!lower_is_better && v > a) => Some(v),
        keep => keep,
    })
}

fn display_name(lang: Language) -> String {
    let name = lang.name();
    let mut chars = name.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Columns in `numeric` are right-aligned.
fn table(out: &mut String, header: &[String], numeric: std::ops::Range<usize>, rows: &[Vec<String>]) {
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let rule: Vec<&str> = (0..header.len()).map(|i| if numeric.contains(&i) { "---:" } else { "---" }).collect();
    let _ = writeln!(out, "| {} |", rule.join(" | "));
    for r in rows {
        let _ = writeln!(out, "| {} |", r.join(" | "));
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Metric<'a> {
    Sw,
    Nsw,
    L,
    S(&'a str),
    Any,
}

impl Metric<'_> {
    fn header(&self) -> String {
        match self {
            Metric::Sw => "SW".into(),
            Metric::Nsw => "NSW".into(),
            Metric::L => "L".into(),
            Metric::S(label) => format!("S ({label})"),
            Metric::Any => "Any".into(),
        }
    }

    fn csv_name(&self) -> String {
        match self {
            Metric::S(label) => format!("S:{label}"),
            other => other.header(),
        }
    }

    fn value(&self, c: &AgreementCell) -> Option<f64> {
        let r = &c.report;
        match self {
            Metric::Sw => r.sw_pct,
            Metric::Nsw => r.nsw_pct,
            Metric::L => r.l_pct,
            Metric::S(label) => r.s_pct.get(*label).copied(),
            Metric::Any => r.s_any_pct,
        }
    }
}

const STEM_LABELS: [&str; 3] = ["Porter", "Lancaster", "Snowball"];

fn prompt_code(p: Option<Language>) -> &'static str {
    p.map_or("none", |l| l.code())
}

/// Rows keyed by `key`, keeping first-appearance order.
fn group_rows<'a, T, K: PartialEq>(items: impl Iterator<Item = &'a T>, key: impl Fn(&T) -> K) -> Vec<(K, Vec<&'a T>)>
where
    T: 'a,
{
    let mut rows: Vec<(K, Vec<&T>)> = Vec::new();
    for it in items {
        let k = key(it);
        match rows.iter_mut().find(|(rk, _)| *rk == k) {
            Some((_, v)) => v.push(it),
            None => rows.push((k, vec![it])),
        }
    }
    rows
}

fn languages_in<'a>(langs: impl Iterator<Item = &'a Language>) -> Vec<Language> {
    let present: Vec<Language> = langs.copied().collect();
    Language::ALL.into_iter().filter(|l| present.contains(l)).collect()
}

fn provenance_md(out: &mut String, p: &super::Provenance) {
    let _ = writeln!(out, "## Provenance\n");
    let _ = writeln!(out, "- tool: {}", p.tool);
    let _ = writeln!(out, "- config: version {}, sha256 {}", p.config_version, p.config_hash);
    let _ = writeln!(out, "- seed: {} ({})", p.seed, p.prng);
    let _ = writeln!(out, "- generations per prompt: {}", p.generations);
    let averaging = match p.averaging {
        Averaging::Macro => "macro (mean of per-document values)",
        Averaging::Micro => "micro (pooled counts)",
    };
    let _ = writeln!(out, "- averaging: {averaging}");
    let mut units = vec!["words"];
    if p.word_filter.hashtags {
        units.push("hashtags");
    }
    if p.word_filter.mentions {
        units.push("mentions");
    }
    let _ = writeln!(out, "- agreement word units: {}", units.join(", "));
    if !p.chain_order.is_empty() {
        let orders: Vec<String> = p.chain_order.iter().map(|(combo, order)| format!("{combo} = {order}")).collect();
        let _ = writeln!(out, "- operation order: {}; LLM backends send one prompt per operation", orders.join(", "));
    }
    for (name, c) in &p.cache {
        let _ = writeln!(out, "- cache {name}: {} hit(s), {} miss(es)", c.hits, c.misses);
    }
    for (key, n) in p.excluded_documents.iter().filter(|(_, n)| **n > 0) {
        let _ = writeln!(out, "- excluded documents {key}: {n}");
    }
    for (name, n) in p.degenerate_responses.iter().filter(|(_, n)| **n > 0) {
        let _ = writeln!(out, "- degenerate responses {name}: {n}");
    }
    for (name, n) in p.truncated_responses.iter().filter(|(_, n)| **n > 0) {
        let _ = writeln!(out, "- truncated responses {name}: {n}");
    }
}

pub fn agreement_markdown(run: &AgreementRun) -> String {
    let mut out = String::from("# Agreement with classic preprocessing\n\n");
    out.push_str(
        "Percent of word tokens handled like the classic tools: SW = inventory stopwords removed, \
         NSW = other words removed, L = lemmas matching the lemmatizer, S = stems matching each stemmer, \
         Any = matching at least one stemmer. Best value per column in bold (lowest for NSW).\n",
    );
    for lang in languages_in(run.cells.iter().map(|c| &c.language)) {
        let cells: Vec<&AgreementCell> = run.cells.iter().filter(|c| c.language == lang).collect();
        let labels: Vec<&str> =
            STEM_LABELS.into_iter().filter(|l| cells.iter().any(|c| c.stemmers.iter().any(|s| s.label() == *l))).collect();
        let mut metrics = vec![Metric::Sw, Metric::Nsw, Metric::L];
        metrics.extend(labels.iter().map(|l| Metric::S(l)));
        metrics.push(Metric::Any);

        let rows = group_rows(cells.iter().copied(), |c| (c.dataset.clone(), c.backend.clone()));
        let grid: Vec<Vec<Cell>> = rows
            .iter()
            .map(|(_, cs)| {
                metrics
                    .iter()
                    .map(|m| Cell {
                        values: cs.iter().map(|c| m.value(c)).collect(),
                        sep: " / ",
                    })
                    .collect()
            })
            .collect();
        let best: Vec<Option<f64>> =
            (0..metrics.len()).map(|j| best_of(grid.iter().map(|r| &r[j]), metrics[j] == Metric::Nsw)).collect();

        let _ = writeln!(out, "\n## {} ({})\n", display_name(lang), lang.code());
        if rows.iter().any(|(_, cs)| cs.len() > 1) {
            let _ = writeln!(out, "Paired cells: English prompt / {} prompt.\n", display_name(lang));
        }
        let mut header: Vec<String> = ["Dataset", "Backend", "Model"].map(String::from).to_vec();
        header.extend(metrics.iter().map(Metric::header));
        let body: Vec<Vec<String>> = rows
            .iter()
            .zip(&grid)
            .map(|(((dataset, backend), cs), cells)| {
                let mut r = vec![dataset.clone(), backend.clone(), cs[0].model.clone()];
                r.extend(cells.iter().zip(&best).map(|(c, b)| render_cell(c, *b)));
                r
            })
            .collect();
        table(&mut out, &header, 3..header.len(), &body);
    }

    out.push_str("\n## Diagnostics\n\n");
    let header = ["Dataset", "Backend", "Prompt", "Docs", "Excluded", "Stem consistency", "Top removed non-stopwords"].map(String::from);
    let body: Vec<Vec<String>> = run
        .cells
        .iter()
        .map(|c| {
            let consistency = if c.report.stem_consistency_vacuous {
                format!("{} (vacuous)", fmt2(c.report.stem_consistency))
            } else {
                fmt2(c.report.stem_consistency)
            };
            let top: Vec<String> = c.report.top_removed_non_stopwords.iter().take(10).map(|(w, n)| format!("{w} ({n})")).collect();
            vec![
                c.dataset.clone(),
                c.backend.clone(),
                prompt_code(c.prompt_language).to_string(),
                c.report.docs.to_string(),
                c.excluded.to_string(),
                consistency,
                if top.is_empty() { "-".into() } else { top.join(", ") },
            ]
        })
        .collect();
    table(&mut out, &header, 3..6, &body);
    out.push('\n');
    provenance_md(&mut out, &run.provenance);
    out
}

pub const AGREEMENT_CSV_HEADER: [&str; 7] = ["dataset", "language", "backend", "model", "prompt_language", "metric", "value"];

/// Long format, one row per (cell, metric), values at full precision.
pub fn agreement_csv(run: &AgreementRun) -> String {
    let mut rows = Vec::new();
    for c in &run.cells {
        let mut metrics = vec![Metric::Sw, Metric::Nsw, Metric::L];
        metrics.extend(STEM_LABELS.into_iter().filter(|l| c.stemmers.iter().any(|s| s.label() == *l)).map(Metric::S));
        metrics.push(Metric::Any);
        let base = [c.dataset.clone(), c.language.code().into(), c.backend.clone(), c.model.clone(), prompt_code(c.prompt_language).into()];
        for m in &metrics {
            let mut r = base.to_vec();
            r.push(m.csv_name());
            r.push(full(m.value(c)));
            rows.push(r);
        }
        let mut r = base.to_vec();
        r.push("stem_consistency".into());
        r.push(full(Some(c.report.stem_consistency)));
        rows.push(r);
    }
    csv_string(&AGREEMENT_CSV_HEADER, rows)
}

pub fn tuning_markdown(t: &TuningRun) -> String {
    let b = &t.result.best;
    let depth = if b.tree_depth == 0 { "unlimited".to_string() } else { b.tree_depth.to_string() };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Hyperparameters tuned on the {} validation split ({} train, {} validation documents, classic {} chain): \
         n-grams {}-{}, max_features {}, alpha {}, lambda {}, tree depth {}; validation averaged micro-F1 {}.",
        t.dataset,
        t.train_docs,
        t.validation_docs,
        t.combo.label(),
        b.vectorizer.ngram_min,
        b.vectorizer.ngram_max,
        b.vectorizer.max_features,
        b.alpha,
        b.lambda,
        depth,
        fmt2(t.result.validation_f1 * 100.0),
    );
    out
}

pub fn classification_markdown(run: &ClassificationRun) -> String {
    let mut out = String::from("# Classification\n\n");
    out.push_str(
        "Micro-F1 (%) averaged over naive Bayes, logistic regression and a decision tree on TF-IDF features. \
         Best value per dataset and combo in bold.\n\n",
    );
    out.push_str(&tuning_markdown(&run.tuning));
    let combos: Vec<_> = crate::classic::Combo::ALL.into_iter().filter(|k| run.cells.iter().any(|c| c.combo == *k)).collect();
    let datasets = group_rows(run.cells.iter(), |c| c.dataset.clone());
    for (dataset, cells) in &datasets {
        let lang = cells[0].language;
        let rows = group_rows(cells.iter().copied(), |c| c.backend.clone());
        let grid: Vec<Vec<Cell>> = rows
            .iter()
            .map(|(_, cs)| {
                combos
                    .iter()
                    .map(|k| {
                        let hits: Vec<&ClassificationCell> = cs.iter().copied().filter(|c| c.combo == *k).collect();
                        let sep = if hits.iter().any(|c| c.stemmer.is_some()) { " \\| " } else { " / " };
                        Cell {
                            values: hits.iter().map(|c| Some(c.average * 100.0)).collect(),
                            sep,
                        }
                    })
                    .collect()
            })
            .collect();
        let best: Vec<Option<f64>> = (0..combos.len()).map(|j| best_of(grid.iter().map(|r| &r[j]), false)).collect();

        let _ = writeln!(out, "\n## {dataset} ({})\n", display_name(lang));
        let stem_labels: Vec<&str> = STEM_LABELS
            .into_iter()
            .filter(|l| cells.iter().any(|c| c.stemmer.is_some_and(|s| s.label() == *l)))
            .collect();
        if stem_labels.len() > 1 {
            let _ = writeln!(out, "Classic stemming cells: {}.\n", stem_labels.join(" | "));
        }
        if rows.iter().any(|(_, cs)| cs.iter().any(|c| c.prompt_language.is_some_and(|p| p != Language::English))) {
            let _ = writeln!(out, "Paired cells: English prompt / {} prompt.\n", display_name(lang));
        }
        let mut header: Vec<String> = ["Backend", "Model"].map(String::from).to_vec();
        header.extend(combos.iter().map(|k| k.label().to_string()));
        let body: Vec<Vec<String>> = rows
            .iter()
            .zip(&grid)
            .map(|((backend, cs), cells)| {
                let mut r = vec![backend.clone(), cs[0].model.clone()];
                r.extend(cells.iter().zip(&best).map(|(c, b)| render_cell(c, *b)));
                r
            })
            .collect();
        table(&mut out, &header, 2..header.len(), &body);
    }
    out.push('\n');
    provenance_md(&mut out, &run.provenance);
    out
}

pub const CLASSIFICATION_CSV_HEADER: [&str; 14] = [
    "dataset",
    "language",
    "backend",
    "model",
    "prompt_language",
    "combo",
    "stemmer",
    "train_docs",
    "test_docs",
    "excluded",
    "naive_bayes",
    "logreg",
    "tree",
    "average",
];

pub fn classification_csv(run: &ClassificationRun) -> String {
    let rows = run
        .cells
        .iter()
        .map(|c| {
            vec![
                c.dataset.clone(),
                c.language.code().into(),
                c.backend.clone(),
                c.model.clone(),
                prompt_code(c.prompt_language).into(),
                c.combo.label().into(),
                c.stemmer.map(|s| s.to_string()).unwrap_or_default(),
                c.train_docs.to_string(),
                c.test_docs.to_string(),
                c.excluded.to_string(),
                full(Some(c.naive_bayes)),
                full(Some(c.logreg)),
                full(Some(c.tree)),
                full(Some(c.average)),
            ]
        })
        .collect();
    csv_string(&CLASSIFICATION_CSV_HEADER, rows)
}

pub fn emit_agreement(run: &AgreementRun, format: ReportFormat) -> String {
    match format {
        ReportFormat::Markdown => agreement_markdown(run),
        ReportFormat::Csv => agreement_csv(run),
        ReportFormat::Json => to_json(run),
    }
}

pub fn emit_classification(run: &ClassificationRun, format: ReportFormat) -> String {
    match format {
        ReportFormat::Markdown => classification_markdown(run),
        ReportFormat::Csv => classification_csv(run),
        ReportFormat::Json => to_json(run),
    }
}

pub fn emit_tuning(run: &TuningRun, format: ReportFormat) -> Option<String> {
    match format {
        ReportFormat::Markdown => Some(format!("# Tuning\n\n{}", tuning_markdown(run))),
        ReportFormat::Csv => None,
        ReportFormat::Json => Some(to_json(run)),
    }
}

fn write_all(dir: &Path, stem: &str, emit: impl Fn(ReportFormat) -> Option<String>) -> Result<Vec<PathBuf>, RunError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for f in ReportFormat::ALL {
        if let Some(body) = emit(f) {
            let path = dir.join(format!("{stem}.{}", f.extension()));
            fs::write(&path, body).map_err(io_err(&path))?;
            written.push(path);
        }
    }
    Ok(written)
}

pub fn write_agreement(run: &AgreementRun, dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    write_all(dir, AGREEMENT_STEM, |f| Some(emit_agreement(run, f)))
}

pub fn write_classification(run: &ClassificationRun, dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    write_all(dir, CLASSIFICATION_STEM, |f| Some(emit_classification(run, f)))
}

pub fn write_tuning(run: &TuningRun, dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    write_all(dir, TUNING_STEM, |f| emit_tuning(run, f))
}

/// Re-renders Markdown and CSV from the JSON reports found in `dir`.
pub fn rewrite_from_json(dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let mut written = Vec::new();
    let read = |stem: &str| -> Result<Option<String>, RunError> {
        let path = dir.join(format!("{stem}.json"));
        match fs::read_to_string(&path) {
            Ok(s) => Ok(Some(s)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(io_err(&path)(e)),
        }
    };
    if let Some(s) = read(AGREEMENT_STEM)? {
        written.extend(write_agreement(&from_json::<AgreementRun>(&s)?, dir)?);
    }
    if let Some(s) = read(CLASSIFICATION_STEM)? {
        written.extend(write_classification(&from_json::<ClassificationRun>(&s)?, dir)?);
    }
    if let Some(s) = read(TUNING_STEM)? {
        written.extend(write_tuning(&from_json::<TuningRun>(&s)?, dir)?);
    }
    if written.is_empty() {
        return Err(RunError::Config(format!("no report JSON found in {}", dir.display())));
    }
    Ok(written)
}

/// Parses a report CSV into rows of `header -> value`.
pub fn read_csv(source: &str) -> Result<Vec<BTreeMap<String, String>>, RunError> {
    let mut r = csv::Reader::from_reader(source.as_bytes());
    let header = r.headers().map_err(|e| RunError::Config(e.to_string()))?.clone();
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| RunError::Config(e.to_string()))?;
            Ok(header.iter().zip(rec.iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect())
        })
        .collect()
}
