use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::agreement::Averaging;
use crate::classic::{Combo, Task};
use crate::corpus::{Columns, Format, SplitSpec};
use crate::llmproc::{LlmConfig, API_KEY_ENV};
use crate::textclf::Grid;
use crate::tokenize::WordFilter;
use crate::{Language, Stemmer};

use super::RunError;

pub const CONFIG_VERSION: u32 = 1;

/// Which prompt languages to run for a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PromptLanguage {
    English,
    Native,
    #[default]
    Both,
}

impl PromptLanguage {
    /// Prompt languages for a dataset in `language`, English first. An
    /// English dataset has a single prompt language whatever the policy.
    pub fn resolve(self, language: Language) -> Vec<Language> {
        if language == Language::English {
            return vec![Language::English];
        }
        match self {
            PromptLanguage::English => vec![Language::English],
            PromptLanguage::Native => vec![language],
            PromptLanguage::Both => vec![Language::English, language],
        }
    }
}

/// Stemming algorithm family; resolved per dataset language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StemmerFamily {
    Porter,
    Lancaster,
    Snowball,
}

impl StemmerFamily {
    pub fn resolve(self, language: Language) -> Option<Stemmer> {
        let s = match self {
            StemmerFamily::Porter => Stemmer::Porter,
            StemmerFamily::Lancaster => Stemmer::Lancaster,
            StemmerFamily::Snowball => Stemmer::Snowball(language),
        };
        s.for_language(language).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSizes {
    pub max_train: usize,
    pub max_test: usize,
    pub validation_size: usize,
}

impl Default for SplitSizes {
    fn default() -> Self {
        let d = SplitSpec::default();
        SplitSizes {
            max_train: d.max_train,
            max_test: d.max_test,
            validation_size: d.validation_size,
        }
    }
}

impl SplitSizes {
    pub fn with_seed(self, seed: u64) -> SplitSpec {
        SplitSpec {
            max_train: self.max_train,
            max_test: self.max_test,
            validation_size: self.validation_size,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    /// Used in file names and report rows.
    pub name: String,
    pub path: PathBuf,
    /// Guessed from the file extension when absent.
    #[serde(default)]
    pub format: Option<Format>,
    pub language: Language,
    #[serde(default)]
    pub task: Task,
    /// Task description inserted into English stopword prompts.
    #[serde(default)]
    pub task_context: Option<String>,
    /// Task description for prompts in the dataset language.
    #[serde(default)]
    pub task_context_native: Option<String>,
    #[serde(default)]
    pub columns: Columns,
    /// Overrides the top-level split sizes.
    #[serde(default)]
    pub split: Option<SplitSizes>,
}

impl DatasetConfig {
    pub fn format(&self) -> Result<Format, RunError> {
        self.format
            .or_else(|| Format::from_path(&self.path))
            .ok_or_else(|| RunError::Config(format!("dataset {}: cannot infer format of {}", self.name, self.path.display())))
    }

    /// Task description for prompts written in `prompt_language`.
    pub fn task_context_for(&self, prompt_language: Language) -> Option<&str> {
        if prompt_language == Language::English {
            self.task_context.as_deref()
        } else {
            self.task_context_native.as_deref()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Classic,
    Echo,
    Llm,
}

impl BackendKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BackendKind::Classic => "classic",
            BackendKind::Echo => "echo",
            BackendKind::Llm => "llm",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendConfig {
    pub name: String,
    pub kind: BackendKind,
    /// Stemmer the echo backend uses for its single stem run; defaults to
    /// the first configured stemmer available for the language.
    #[serde(default)]
    pub stemmer: Option<StemmerFamily>,
    /// Endpoint settings; ignored unless `kind = "llm"`.
    #[serde(flatten)]
    pub llm: LlmConfig,
}

impl BackendConfig {
    /// Model label used in reports.
    pub fn model_label(&self) -> &str {
        match self.kind {
            BackendKind::Llm => &self.llm.model,
            other => other.as_str(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TuningConfig {
    /// Dataset whose validation split drives the grid search; the first
    /// dataset when absent.
    pub dataset: Option<String>,
    /// Classic chain applied before tuning.
    pub combo: Combo,
}

impl Default for TuningConfig {
    fn default() -> Self {
        TuningConfig {
            dataset: None,
            combo: Combo::Sw,
        }
    }
}

fn default_version() -> u32 {
    CONFIG_VERSION
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_combos() -> Vec<Combo> {
    Combo::ALL.to_vec()
}

fn default_stemmers() -> Vec<StemmerFamily> {
    vec![StemmerFamily::Porter, StemmerFamily::Lancaster, StemmerFamily::Snowball]
}

fn default_generations() -> u32 {
    1
}

/// The experiment matrix. Relative paths are resolved against the
/// directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_combos")]
    pub combos: Vec<Combo>,
    #[serde(default = "default_stemmers")]
    pub stemmers: Vec<StemmerFamily>,
    #[serde(default)]
    pub prompt_language: PromptLanguage,
    /// Generations per prompt; scores are averaged over them.
    #[serde(default = "default_generations")]
    pub generations: u32,
    #[serde(default)]
    pub averaging: Averaging,
    #[serde(default)]
    pub word_filter: WordFilter,
    #[serde(default)]
    pub split: SplitSizes,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default)]
    pub tuning: TuningConfig,
    pub datasets: Vec<DatasetConfig>,
    pub backends: Vec<BackendConfig>,
}

const BACKEND_KEYS: [&str; 13] = [
    "name",
    "kind",
    "stemmer",
    "endpoint",
    "model",
    "temperature",
    "sampling",
    "max_in_flight",
    "timeout_secs",
    "cache",
    "max_retries",
    "backoff_ms",
    "api_key_env",
];

/// Rejects unknown keys in `[[backends]]` tables.
fn check_backend_keys(raw: &toml::Table) -> Result<(), RunError> {
    let Some(backends) = raw.get("backends").and_then(toml::Value::as_array) else {
        return Ok(());
    };
    for (i, b) in backends.iter().enumerate() {
        let Some(table) = b.as_table() else { continue };
        for key in table.keys() {
            if key == "api_key" {
                return Err(RunError::Config(format!(
                    "backends[{i}]: api_key is not accepted in config files; put the key in the environment variable named by api_key_env (default {API_KEY_ENV})"
                )));
            }
            if !BACKEND_KEYS.contains(&key.as_str()) {
                return Err(RunError::Config(format!(
                    "backends[{i}]: unknown field `{key}`, expected one of {}",
                    BACKEND_KEYS.join(", ")
                )));
            }
        }
    }
    Ok(())
}

fn safe_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.')) && name != "." && name != ".."
}

impl ExperimentConfig {
    pub fn from_toml(source: &str) -> Result<Self, RunError> {
        let raw: toml::Table = source.parse().map_err(|e: toml::de::Error| RunError::Config(e.to_string()))?;
        check_backend_keys(&raw)?;
        let config: ExperimentConfig = raw.try_into().map_err(|e: toml::de::Error| RunError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads and validates a config file, returning it with the directory
    /// relative paths resolve against.
    pub fn load(path: &Path) -> Result<(Self, PathBuf), RunError> {
        let source = std::fs::read_to_string(path).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
        let config = Self::from_toml(&source).map_err(|e| match e {
            RunError::Config(m) => RunError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((config, base))
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let err = |m: String| Err(RunError::Config(m));
        if self.version != CONFIG_VERSION {
            return err(format!("unsupported config version {} (expected {CONFIG_VERSION})", self.version));
        }
        if self.datasets.is_empty() {
            return err("at least one dataset is required".into());
        }
        if self.backends.is_empty() {
            return err("at least one backend is required".into());
        }
        if self.combos.is_empty() {
            return err("at least one combo is required".into());
        }
        if self.stemmers.is_empty() {
            return err("at least one stemmer is required".into());
        }
        if self.generations == 0 {
            return err("generations must be >= 1".into());
        }
        let mut names = BTreeSet::new();
        for d in &self.datasets {
            if !safe_name(&d.name) {
                return err(format!("dataset name {:?} must be non-empty and use only letters, digits, '-', '_' or '.'", d.name));
            }
            if !names.insert(&d.name) {
                return err(format!("duplicate dataset name {:?}", d.name));
            }
            d.format()?;
            if !self.stemmers.iter().any(|f| f.resolve(d.language).is_some()) {
                return err(format!("dataset {}: no configured stemmer supports {}", d.name, d.language.name()));
            }
        }
        let mut names = BTreeSet::new();
        for b in &self.backends {
            if !safe_name(&b.name) {
                return err(format!("backend name {:?} must be non-empty and use only letters, digits, '-', '_' or '.'", b.name));
            }
            if !names.insert(&b.name) {
                return err(format!("duplicate backend name {:?}", b.name));
            }
            if b.kind == BackendKind::Llm {
                b.llm.validate().map_err(|e| RunError::Config(format!("backend {}: {e}", b.name)))?;
            }
        }
        if let Some(t) = &self.tuning.dataset {
            if !self.datasets.iter().any(|d| &d.name == t) {
                return err(format!("tuning dataset {t:?} is not among the datasets"));
            }
        }
        Ok(())
    }

    /// Configured stemmers available for `language`, in config order.
    pub fn stemmers_for(&self, language: Language) -> Vec<Stemmer> {
        let mut out = Vec::new();
        for f in &self.stemmers {
            if let Some(s) = f.resolve(language) {
                if !out.contains(&s) {
                    out.push(s);
                }
            }
        }
        out
    }

    /// Combos in canonical column order.
    pub fn combos_in_order(&self) -> Vec<Combo> {
        Combo::ALL.into_iter().filter(|c| self.combos.contains(c)).collect()
    }

    pub fn tuning_dataset(&self) -> &DatasetConfig {
        match &self.tuning.dataset {
            Some(name) => self.datasets.iter().find(|d| &d.name == name).expect("validated"),
            None => &self.datasets[0],
        }
    }

    /// SHA-256 of the canonical JSON form without fields that cannot
    /// change any reported number (output location, concurrency,
    /// timeouts, retry policy, cache location, key variable).
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("output_dir");
            if let Some(backends) = obj.get_mut("backends").and_then(|b| b.as_array_mut()) {
                for b in backends.iter_mut().filter_map(|b| b.as_object_mut()) {
                    for k in ["max_in_flight", "timeout_secs", "max_retries", "backoff_ms", "cache", "api_key_env"] {
                        b.remove(k);
                    }
                }
            }
        }
        let canonical = serde_json::to_string(&v).expect("value serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
