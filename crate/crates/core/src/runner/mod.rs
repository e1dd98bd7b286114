//! Config-driven experiment runs: agreement tables, hyperparameter tuning
//! and classification tables.

mod config;
pub mod report;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

pub use config::{
    BackendConfig, BackendKind, DatasetConfig, ExperimentConfig, PromptLanguage, SplitSizes, StemmerFamily, TuningConfig,
    CONFIG_VERSION,
};

use crate::agreement::{agreement_report, AgreementOptions, AgreementReport, Averaging, DocOutputs};
use crate::classic::{Classic, ClassicError, Combo, Op};
use crate::corpus::{load_corpus, stratified_split, write_split_sidecar, Corpus, CorpusError, Document, Split, PRNG_NAME};
use crate::llmproc::{Backend, Cache, LlmClient, LlmError, PreprocessSpec, PreprocessedText, Preprocessor, Templates};
use crate::textclf::{evaluate, tune, EvalResult, TextClfError, TuneResult};
use crate::tokenize::{TokenKind, TokenSequence, WordFilter};
use crate::{Language, Stemmer};

/// Version of the report JSON layout.
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Classic(#[from] ClassicError),
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error("dataset {dataset}: {source}")]
    TextClf {
        dataset: String,
        #[source]
        source: TextClfError,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("replay mode: {} prompt(s) missing from the cache:\n  {}", keys.len(), keys.join("\n  "))]
    MissingCache { keys: Vec<String> },
    #[error("dataset {dataset}: {message}")]
    Dataset { dataset: String, message: String },
}

impl RunError {
    /// Errors caused by the configuration rather than by running it.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            RunError::Config(_) | RunError::Llm(LlmError::Config(_)) | RunError::Corpus(CorpusError::UnknownFormat(_))
        )
    }
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Cache traffic of one backend, summed over every preprocessing step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheUse {
    pub hits: u64,
    pub misses: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub config_version: u32,
    pub config_hash: String,
    pub seed: u64,
    pub prng: String,
    pub generations: u32,
    pub averaging: Averaging,
    pub word_filter: WordFilter,
    /// Operation order per combo, shared by all backends (LLM backends send
    /// one prompt per operation).
    pub chain_order: BTreeMap<String, String>,
    /// Per backend name.
    pub cache: BTreeMap<String, CacheUse>,
    /// Documents dropped after a preprocessing failure, per
    /// `dataset/backend/prompt-language`.
    pub excluded_documents: BTreeMap<String, usize>,
    /// Steps whose response cleaned to nothing, per backend name.
    pub degenerate_responses: BTreeMap<String, u64>,
    pub truncated_responses: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementCell {
    pub dataset: String,
    pub language: Language,
    pub backend: String,
    pub kind: BackendKind,
    pub model: String,
    /// `None` for backends that take no prompt.
    pub prompt_language: Option<Language>,
    /// Stemmer behind the echo backend's stem run.
    pub echo_stemmer: Option<Stemmer>,
    /// Reference stemmers, in column order.
    pub stemmers: Vec<Stemmer>,
    pub generations: u32,
    pub excluded: usize,
    /// Summary percentages are means over generations; the per-document
    /// rows and word lists come from the first generation.
    pub report: AgreementReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementRun {
    pub format_version: u32,
    pub provenance: Provenance,
    pub cells: Vec<AgreementCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationCell {
    pub dataset: String,
    pub language: Language,
    pub backend: String,
    pub kind: BackendKind,
    pub model: String,
    pub prompt_language: Option<Language>,
    pub combo: Combo,
    /// Set for classic and echo chains that stem.
    pub stemmer: Option<Stemmer>,
    pub generations: u32,
    pub train_docs: usize,
    pub test_docs: usize,
    pub excluded: usize,
    /// Micro-F1 per model and their average, as means over generations.
    pub naive_bayes: f64,
    pub logreg: f64,
    pub tree: f64,
    pub average: f64,
    /// First generation in full, with confusion matrices.
    pub detail: EvalResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningRun {
    pub format_version: u32,
    pub provenance: Provenance,
    pub dataset: String,
    pub combo: Combo,
    pub stemmer: Stemmer,
    pub train_docs: usize,
    pub validation_docs: usize,
    pub result: TuneResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRun {
    pub format_version: u32,
    pub provenance: Provenance,
    pub tuning: TuningRun,
    pub cells: Vec<ClassificationCell>,
}

/// Per-document outputs of one preprocessing pass, aligned with the input
/// documents; failed documents are `None`.
struct Pass {
    outputs: Vec<Option<PreprocessedText>>,
    missing: Vec<String>,
}

#[derive(Default)]
struct Tally {
    cache: BTreeMap<String, CacheUse>,
    excluded: BTreeMap<String, usize>,
    degenerate: BTreeMap<String, u64>,
    truncated: BTreeMap<String, u64>,
    missing: BTreeSet<String>,
}

struct PreparedDataset {
    config: DatasetConfig,
    corpus: Corpus,
    classic: Classic,
    stemmers: Vec<Stemmer>,
}

struct PreparedBackend {
    config: BackendConfig,
    backend: Backend,
}

impl PreparedBackend {
    fn kind(&self) -> BackendKind {
        self.config.kind
    }

    fn max_in_flight(&self) -> usize {
        match self.config.kind {
            BackendKind::Llm => self.config.llm.max_in_flight,
            _ => 1,
        }
    }
}

/// Executes an experiment config.
pub struct Runner {
    config: ExperimentConfig,
    base_dir: PathBuf,
    replay: bool,
    caches: Mutex<HashMap<PathBuf, Arc<Cache>>>,
}

fn features(tokens: &TokenSequence) -> Vec<String> {
    tokens.iter().filter(|t| t.kind != TokenKind::Punct).map(|t| t.norm.clone()).collect()
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Averages the summary numbers of per-generation reports.
fn mean_reports(mut reports: Vec<AgreementReport>) -> AgreementReport {
    if reports.len() <= 1 {
        return reports.pop().unwrap_or_default();
    }
    let avg = |f: &dyn Fn(&AgreementReport) -> Option<f64>| mean(reports.iter().filter_map(f));
    let mut out = reports[0].clone();
    out.sw_pct = avg(&|r| r.sw_pct);
    out.nsw_pct = avg(&|r| r.nsw_pct);
    out.l_pct = avg(&|r| r.l_pct);
    out.s_any_pct = avg(&|r| r.s_any_pct);
    out.s_pct = out.s_pct.keys().filter_map(|k| avg(&|r| r.s_pct.get(k).copied()).map(|v| (k.clone(), v))).collect();
    out.stem_consistency = mean(reports.iter().map(|r| r.stem_consistency)).unwrap_or(1.0);
    out.stem_consistency_vacuous = reports.iter().all(|r| r.stem_consistency_vacuous);
    out
}

fn chain(ops: &[Op]) -> String {
    ops.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(" -> ")
}

impl Runner {
    pub fn new(config: ExperimentConfig, base_dir: impl Into<PathBuf>, replay: bool) -> Result<Self, RunError> {
        config.validate()?;
        Ok(Runner {
            config,
            base_dir: base_dir.into(),
            replay,
            caches: Mutex::new(HashMap::new()),
        })
    }

    /// Loads a config file; relative paths resolve against its directory.
    pub fn from_file(path: &Path, replay: bool) -> Result<Self, RunError> {
        let (config, base) = ExperimentConfig::load(path)?;
        Runner::new(config, base, replay)
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn is_replay(&self) -> bool {
        self.replay
    }

    pub fn config_mut(&mut self) -> &mut ExperimentConfig {
        &mut self.config
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.config.output_dir)
    }

    /// Cache files of all LLM backends, resolved.
    pub fn cache_paths(&self) -> Vec<PathBuf> {
        let mut out: Vec<PathBuf> = Vec::new();
        for b in self.config.backends.iter().filter(|b| b.kind == BackendKind::Llm) {
            let p = self.resolve(&b.llm.cache);
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out
    }

    fn provenance(&self, tally: Tally) -> Provenance {
        let mut chain_order = BTreeMap::new();
        for c in self.config.combos_in_order() {
            chain_order.insert(c.label().to_string(), chain(c.ops()));
        }
        Provenance {
            tool: format!("llmprep {}", env!("CARGO_PKG_VERSION")),
            config_version: self.config.version,
            config_hash: self.config.hash(),
            seed: self.config.seed,
            prng: PRNG_NAME.to_string(),
            generations: self.config.generations,
            averaging: self.config.averaging,
            word_filter: self.config.word_filter,
            chain_order,
            cache: tally.cache,
            excluded_documents: tally.excluded,
            degenerate_responses: tally.degenerate,
            truncated_responses: tally.truncated,
        }
    }

    fn prepare_dataset(&self, config: &DatasetConfig) -> Result<PreparedDataset, RunError> {
        let path = self.resolve(&config.path);
        let corpus = load_corpus(&path, config.format()?, config.language.code(), &config.columns)?;
        if corpus.is_empty() {
            return Err(RunError::Dataset {
                dataset: config.name.clone(),
                message: format!("{} holds no documents", path.display()),
            });
        }
        let spec = config.split.unwrap_or(self.config.split).with_seed(self.config.seed);
        let corpus = stratified_split(&corpus, &spec);
        Ok(PreparedDataset {
            classic: Classic::load(config.language, config.task)?,
            stemmers: self.config.stemmers_for(config.language),
            config: config.clone(),
            corpus,
        })
    }

    fn prepare_backend(&self, config: &BackendConfig) -> Result<PreparedBackend, RunError> {
        let backend = match config.kind {
            BackendKind::Classic => Backend::Classic,
            BackendKind::Echo => Backend::Echo,
            BackendKind::Llm => {
                let path = self.resolve(&config.llm.cache);
                let cache = {
                    let mut caches = self.caches.lock().expect("cache map lock");
                    match caches.get(&path) {
                        Some(c) => Arc::clone(c),
                        None => {
                            let c = Arc::new(Cache::open(&path)?);
                            caches.insert(path, Arc::clone(&c));
                            c
                        }
                    }
                };
                Backend::Llm(Arc::new(LlmClient::new(config.llm.clone(), cache, self.replay)?))
            }
        };
        Ok(PreparedBackend {
            config: config.clone(),
            backend,
        })
    }

    fn prepare_all(&self) -> Result<(Vec<PreparedDataset>, Vec<PreparedBackend>), RunError> {
        let datasets = self.config.datasets.iter().map(|d| self.prepare_dataset(d)).collect::<Result<Vec<_>, _>>()?;
        let backends = self.config.backends.iter().map(|b| self.prepare_backend(b)).collect::<Result<Vec<_>, _>>()?;
        let out = self.output_dir();
        for ds in &datasets {
            let dir = out.join("intermediate").join(&ds.config.name);
            fs::create_dir_all(&dir).map_err(io_err(&dir))?;
            let path = dir.join("split.jsonl");
            write_split_sidecar(&ds.corpus, &path).map_err(io_err(&path))?;
        }
        Ok((datasets, backends))
    }

    fn prompt_languages(&self, ds: &PreparedDataset, be: &PreparedBackend) -> Vec<Option<Language>> {
        match be.kind() {
            BackendKind::Llm => self.config.prompt_language.resolve(ds.config.language).into_iter().map(Some).collect(),
            _ => vec![None],
        }
    }

    fn generations(&self, be: &PreparedBackend) -> u32 {
        match be.kind() {
            BackendKind::Llm => self.config.generations,
            _ => 1,
        }
    }

    fn preprocessor(&self, ds: &PreparedDataset, be: &PreparedBackend, prompt: Option<Language>) -> Result<Preprocessor, RunError> {
        let lang = prompt.unwrap_or(ds.config.language);
        let templates = Templates::builtin(lang, ds.config.task, ds.config.task_context_for(lang))?;
        Ok(Preprocessor::new(be.backend.clone(), ds.classic.clone(), templates))
    }

    fn intermediate_path(&self, ds: &PreparedDataset, be: &PreparedBackend, prompt: Option<Language>, file: &str) -> PathBuf {
        self.output_dir()
            .join("intermediate")
            .join(&ds.config.name)
            .join(&be.config.name)
            .join(prompt.map_or("none", |l| l.code()))
            .join(file)
    }

    /// Runs one chain over `docs` and persists the successful outputs.
    #[allow(clippy::too_many_arguments)]
    fn pass(
        &self,
        ds: &PreparedDataset,
        be: &PreparedBackend,
        pre: &Preprocessor,
        prompt: Option<Language>,
        docs: &[Document],
        spec: &PreprocessSpec,
        tag: &str,
        tally: &Mutex<Tally>,
    ) -> Result<Pass, RunError> {
        let results = pre.preprocess_all(docs, spec, be.max_in_flight());
        let mut missing = Vec::new();
        let mut outputs = Vec::with_capacity(results.len());
        let mut used = CacheUse::default();
        let (mut degenerate, mut truncated) = (0u64, 0u64);
        for r in results {
            match r {
                Ok(p) => {
                    used.hits += u64::from(p.cache_hits);
                    used.misses += u64::from(p.cache_misses);
                    degenerate += u64::from(p.degenerate);
                    truncated += u64::from(p.truncated);
                    outputs.push(Some(p));
                }
                Err(e) => {
                    let keys = e.missing_keys();
                    if keys.is_empty() {
                        log::warn!("{} / {}: {e}", ds.config.name, be.config.name);
                    }
                    missing.extend(keys.iter().cloned());
                    outputs.push(None);
                }
            }
        }
        {
            let mut t = tally.lock().expect("tally lock");
            if be.kind() == BackendKind::Llm {
                let c = t.cache.entry(be.config.name.clone()).or_default();
                c.hits += used.hits;
                c.misses += used.misses;
            }
            if be.kind() != BackendKind::Classic {
                *t.degenerate.entry(be.config.name.clone()).or_default() += degenerate;
                *t.truncated.entry(be.config.name.clone()).or_default() += truncated;
            }
        }
        let file = if spec.generation == 0 {
            format!("{tag}.jsonl")
        } else {
            format!("{tag}.g{}.jsonl", spec.generation)
        };
        let path = self.intermediate_path(ds, be, prompt, &file);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        let mut buf = Vec::new();
        for p in outputs.iter().flatten() {
            serde_json::to_writer(&mut buf, p).expect("preprocessed text serializes");
            buf.push(b'\n');
        }
        fs::File::create(&path).and_then(|mut f| f.write_all(&buf)).map_err(io_err(&path))?;
        Ok(Pass { outputs, missing })
    }

    fn record_excluded(tally: &Mutex<Tally>, ds: &PreparedDataset, be: &PreparedBackend, prompt: Option<Language>, n: usize) {
        let key = format!("{}/{}/{}", ds.config.name, be.config.name, prompt.map_or("none", |l| l.code()));
        let mut t = tally.lock().expect("tally lock");
        *t.excluded.entry(key).or_default() += n;
    }

    fn echo_stemmer(&self, ds: &PreparedDataset, be: &PreparedBackend) -> Result<Stemmer, RunError> {
        match be.config.stemmer {
            Some(f) => f.resolve(ds.config.language).ok_or_else(|| {
                RunError::Config(format!(
                    "backend {}: stemmer {f:?} does not support {}",
                    be.config.name,
                    ds.config.language.name()
                ))
            }),
            None => Ok(ds.stemmers[0]),
        }
    }

    fn agreement_cells(
        &self,
        ds: &PreparedDataset,
        be: &PreparedBackend,
        tally: &Mutex<Tally>,
    ) -> Result<Vec<AgreementCell>, RunError> {
        let docs = &ds.corpus.docs;
        let stem_with = self.echo_stemmer(ds, be)?;
        let opts = AgreementOptions {
            filter: self.config.word_filter,
            averaging: self.config.averaging,
            ..Default::default()
        };
        let mut cells = Vec::new();
        for prompt in self.prompt_languages(ds, be) {
            let pre = self.preprocessor(ds, be, prompt)?;
            let mut reports = Vec::new();
            let mut excluded = BTreeSet::new();
            let mut cell_missing = false;
            for generation in 0..self.generations(be) {
                let run = |op: Op| -> Result<Pass, RunError> {
                    let spec = PreprocessSpec {
                        ops: vec![op],
                        stemmer: stem_with,
                        generation,
                    };
                    self.pass(ds, be, &pre, prompt, docs, &spec, &format!("op-{}", op.label()), tally)
                };
                let sw = run(Op::Stopwords)?;
                let lemma = run(Op::Lemma)?;
                let stem = run(Op::Stem)?;
                let missing: Vec<String> = [&sw, &lemma, &stem].iter().flat_map(|p| p.missing.iter().cloned()).collect();
                if !missing.is_empty() {
                    tally.lock().expect("tally lock").missing.extend(missing);
                    cell_missing = true;
                    continue;
                }
                let mut outputs = Vec::new();
                for (i, d) in docs.iter().enumerate() {
                    match (&sw.outputs[i], &lemma.outputs[i], &stem.outputs[i]) {
                        (Some(a), Some(b), Some(c)) => outputs.push(DocOutputs {
                            id: d.id.clone(),
                            orig: crate::tokenize::tokenize(&d.text),
                            stopwords: Some(a.tokens.clone()),
                            lemma: Some(b.tokens.clone()),
                            stem: Some(c.tokens.clone()),
                        }),
                        _ => {
                            excluded.insert(i);
                        }
                    }
                }
                reports.push(agreement_report(&outputs, &ds.classic.stopwords, &ds.classic.lemmas, &ds.stemmers, &opts));
            }
            if cell_missing {
                continue;
            }
            Self::record_excluded(tally, ds, be, prompt, excluded.len());
            cells.push(AgreementCell {
                dataset: ds.config.name.clone(),
                language: ds.config.language,
                backend: be.config.name.clone(),
                kind: be.kind(),
                model: be.config.model_label().to_string(),
                prompt_language: prompt,
                echo_stemmer: (be.kind() == BackendKind::Echo).then_some(stem_with),
                stemmers: ds.stemmers.clone(),
                generations: self.generations(be),
                excluded: excluded.len(),
                report: mean_reports(reports),
            });
        }
        Ok(cells)
    }

    /// Runs every (dataset, backend) cell in parallel and returns results
    /// in config order.
    fn per_cell<T: Send>(
        &self,
        datasets: &[PreparedDataset],
        backends: &[PreparedBackend],
        include: impl Fn(&PreparedBackend) -> bool + Sync,
        work: impl Fn(&PreparedDataset, &PreparedBackend) -> Result<Vec<T>, RunError> + Sync,
    ) -> Result<Vec<T>, RunError> {
        let jobs: Vec<(&PreparedDataset, &PreparedBackend)> =
            datasets.iter().flat_map(|d| backends.iter().filter(|b| include(b)).map(move |b| (d, b))).collect();
        let results: Vec<Result<Vec<T>, RunError>> = std::thread::scope(|s| {
            let handles: Vec<_> = jobs.iter().map(|&(d, b)| s.spawn(|| work(d, b))).collect();
            handles.into_iter().map(|h| h.join().expect("cell thread")).collect()
        });
        let mut out = Vec::new();
        for r in results {
            out.extend(r?);
        }
        Ok(out)
    }

    fn finish_tally(tally: Mutex<Tally>) -> Result<Tally, RunError> {
        let tally = tally.into_inner().expect("tally lock");
        if !tally.missing.is_empty() {
            return Err(RunError::MissingCache {
                keys: tally.missing.iter().cloned().collect(),
            });
        }
        Ok(tally)
    }

    /// Compares single-operation outputs of every non-classic backend with
    /// the classic reference.
    pub fn run_agreement(&self) -> Result<AgreementRun, RunError> {
        let (datasets, backends) = self.prepare_all()?;
        let tally = Mutex::new(Tally::default());
        let cells = self.per_cell(
            &datasets,
            &backends,
            |b| b.kind() != BackendKind::Classic,
            |d, b| self.agreement_cells(d, b, &tally),
        )?;
        let tally = Self::finish_tally(tally)?;
        let mut provenance = self.provenance(tally);
        provenance.chain_order.clear();
        Ok(AgreementRun {
            format_version: REPORT_VERSION,
            provenance,
            cells,
        })
    }

    fn tune_on(&self, ds: &PreparedDataset, tally: Tally) -> Result<TuningRun, RunError> {
        let combo = self.config.tuning.combo;
        let stemmer = ds.stemmers[0];
        let side = |split: Split| -> (Vec<Vec<String>>, Vec<String>) {
            ds.corpus
                .split(split)
                .map(|d| (features(&ds.classic.preprocess(&d.text, combo, stemmer)), d.label.clone()))
                .unzip()
        };
        let (train, train_labels) = side(Split::Train);
        let (validation, validation_labels) = side(Split::Validation);
        let clf = |source| RunError::TextClf {
            dataset: ds.config.name.clone(),
            source,
        };
        if validation.is_empty() {
            return Err(RunError::Dataset {
                dataset: ds.config.name.clone(),
                message: "tuning needs a non-empty validation split".into(),
            });
        }
        let result = tune(&train, &train_labels, &validation, &validation_labels, &self.config.grid).map_err(clf)?;
        Ok(TuningRun {
            format_version: REPORT_VERSION,
            provenance: self.provenance(tally),
            dataset: ds.config.name.clone(),
            combo,
            stemmer,
            train_docs: train.len(),
            validation_docs: validation.len(),
            result,
        })
    }

    /// Grid search on the tuning dataset's validation split with classic
    /// preprocessing.
    pub fn run_tuning(&self) -> Result<TuningRun, RunError> {
        let ds = self.prepare_dataset(self.config.tuning_dataset())?;
        self.tune_on(&ds, Tally::default())
    }

    fn classification_cells(
        &self,
        ds: &PreparedDataset,
        be: &PreparedBackend,
        tuning: &TuningRun,
        tally: &Mutex<Tally>,
    ) -> Result<Vec<ClassificationCell>, RunError> {
        let docs: Vec<Document> = ds.corpus.docs.iter().filter(|d| matches!(d.split, Split::Train | Split::Test)).cloned().collect();
        let n_train = docs.iter().filter(|d| d.split == Split::Train).count();
        if n_train == 0 || n_train == docs.len() {
            return Err(RunError::Dataset {
                dataset: ds.config.name.clone(),
                message: format!("needs non-empty train and test splits, got {n_train} train and {} test", docs.len() - n_train),
            });
        }
        let mut cells = Vec::new();
        for prompt in self.prompt_languages(ds, be) {
            let pre = self.preprocessor(ds, be, prompt)?;
            let mut excluded = BTreeSet::new();
            for combo in self.config.combos_in_order() {
                let stemmers: Vec<Option<Stemmer>> = if combo.uses_stemmer() && be.kind() != BackendKind::Llm {
                    ds.stemmers.iter().copied().map(Some).collect()
                } else {
                    vec![None]
                };
                for stemmer in stemmers {
                    let mut results = Vec::new();
                    let mut missing = false;
                    for generation in 0..self.generations(be) {
                        let spec = PreprocessSpec {
                            ops: combo.ops().to_vec(),
                            stemmer: stemmer.unwrap_or(ds.stemmers[0]),
                            generation,
                        };
                        let tag = match stemmer {
                            Some(s) => format!("combo-{}-{}", combo.slug(), s.label().to_lowercase()),
                            None => format!("combo-{}", combo.slug()),
                        };
                        let pass = self.pass(ds, be, &pre, prompt, &docs, &spec, &tag, tally)?;
                        if !pass.missing.is_empty() {
                            tally.lock().expect("tally lock").missing.extend(pass.missing);
                            missing = true;
                            continue;
                        }
                        let mut split = [(Vec::new(), Vec::new()), (Vec::new(), Vec::new())];
                        for (i, (d, out)) in docs.iter().zip(&pass.outputs).enumerate() {
                            match out {
                                Some(p) => {
                                    let side = &mut split[usize::from(d.split == Split::Test)];
                                    side.0.push(features(&p.tokens));
                                    side.1.push(d.label.clone());
                                }
                                None => {
                                    excluded.insert(i);
                                }
                            }
                        }
                        let [(train, train_labels), (test, test_labels)] = split;
                        let r = evaluate(&train, &train_labels, &test, &test_labels, &tuning.result.best).map_err(|source| {
                            RunError::TextClf {
                                dataset: ds.config.name.clone(),
                                source,
                            }
                        })?;
                        results.push((r, train.len(), test.len()));
                    }
                    if missing {
                        continue;
                    }
                    let avg = |f: &dyn Fn(&EvalResult) -> f64| mean(results.iter().map(|(r, _, _)| f(r))).unwrap_or(0.0);
                    let (detail, train_docs, test_docs) = results[0].clone();
                    cells.push(ClassificationCell {
                        dataset: ds.config.name.clone(),
                        language: ds.config.language,
                        backend: be.config.name.clone(),
                        kind: be.kind(),
                        model: be.config.model_label().to_string(),
                        prompt_language: prompt,
                        combo,
                        stemmer,
                        generations: self.generations(be),
                        train_docs,
                        test_docs,
                        excluded: 0,
                        naive_bayes: avg(&|r| r.naive_bayes.micro_f1),
                        logreg: avg(&|r| r.logreg.micro_f1),
                        tree: avg(&|r| r.tree.micro_f1),
                        average: avg(&|r| r.average),
                        detail,
                    });
                }
            }
            let first = cells.len() - cells.iter().rev().take_while(|c| c.prompt_language == prompt).count();
            for c in &mut cells[first..] {
                c.excluded = excluded.len();
            }
            Self::record_excluded(tally, ds, be, prompt, excluded.len());
        }
        Ok(cells)
    }

    /// Tunes on the tuning dataset, then trains and scores every
    /// (dataset, backend, prompt language, combo) cell with the frozen
    /// hyperparameters.
    pub fn run_classification(&self) -> Result<ClassificationRun, RunError> {
        let (datasets, backends) = self.prepare_all()?;
        let tuning_name = &self.config.tuning_dataset().name;
        let tuning_ds = datasets.iter().find(|d| &d.config.name == tuning_name).expect("validated");
        let tuning = self.tune_on(tuning_ds, Tally::default())?;
        let tally = Mutex::new(Tally::default());
        let cells = self.per_cell(&datasets, &backends, |_| true, |d, b| self.classification_cells(d, b, &tuning, &tally))?;
        let tally = Self::finish_tally(tally)?;
        Ok(ClassificationRun {
            format_version: REPORT_VERSION,
            provenance: self.provenance(tally),
            tuning,
            cells,
        })
    }
}
