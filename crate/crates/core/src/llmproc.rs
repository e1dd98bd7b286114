//! Prompt-driven preprocessing through a chat-completion endpoint, with a
//! persistent response cache, replay mode and response cleaning.

use std::collections::{BTreeSet, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classic::{Classic, Op, Task};
use crate::corpus::Document;
use crate::tokenize::{tokenize, TokenSequence};
use crate::{Language, Stemmer};

/// Environment variable read for the bearer token.
pub const API_KEY_ENV: &str = "LLMPREP_API_KEY";

const SLOT: &str = "{paragraph}";

#[derive(Debug, thiserror::Error)]
pub enum LlmError {
    #[error("{op} template must contain exactly one {{paragraph}} slot, found {found}")]
    Template { op: Op, found: usize },
    #[error("prompt file for {language}: {message}")]
    PromptFile { language: Language, message: String },
    #[error("cache miss in replay mode ({} missing key(s)): {}", keys.len(), keys.join(", "))]
    CacheMiss { keys: Vec<String> },
    #[error("HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("network error after {attempts} attempt(s): {message}")]
    Network { attempts: u32, message: String },
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("cache {}: {source}", path.display())]
    CacheIo {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid LLM config: {0}")]
    Config(String),
    #[error("document {id}: {source}")]
    Document {
        id: String,
        #[source]
        source: Box<LlmError>,
    },
}

impl LlmError {
    /// Missing cache keys carried by this error, looking through the
    /// per-document wrapper.
    pub fn missing_keys(&self) -> &[String] {
        match self {
            LlmError::CacheMiss { keys } => keys,
            LlmError::Document { source, .. } => source.missing_keys(),
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
struct PromptFile {
    sentiment_context: String,
    topic_context: String,
    retention: String,
    stopwords: String,
    lemma: String,
    stem: String,
}

fn prompt_source(language: Language) -> &'static str {
    match language {
        Language::English => include_str!("../prompts/en.toml"),
        Language::French => include_str!("../prompts/fr.toml"),
        Language::German => include_str!("../prompts/de.toml"),
        Language::Italian => include_str!("../prompts/it.toml"),
        Language::Portuguese => include_str!("../prompts/pt.toml"),
        Language::Spanish => include_str!("../prompts/es.toml"),
    }
}

fn prompt_file(language: Language) -> Result<PromptFile, LlmError> {
    toml::from_str(prompt_source(language)).map_err(|e| LlmError::PromptFile {
        language,
        message: e.to_string(),
    })
}

/// Default task description for a task type, in the prompt language.
pub fn default_task_context(language: Language, task: Task) -> Result<String, LlmError> {
    let file = prompt_file(language)?;
    Ok(match task {
        Task::Sentiment => file.sentiment_context,
        Task::Topic => file.topic_context,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub operation: Op,
    pub language: Language,
    pub task_context: String,
    pub body: String,
}

impl PromptTemplate {
    pub fn new(operation: Op, language: Language, task_context: &str, body: &str) -> Result<Self, LlmError> {
        let found = body.matches(SLOT).count();
        if found != 1 {
            return Err(LlmError::Template { op: operation, found });
        }
        Ok(PromptTemplate {
            operation,
            language,
            task_context: task_context.to_string(),
            body: body.to_string(),
        })
    }

    /// Bundled template. Stopword templates for sentiment tasks carry the
    /// negation retention sentence; `task_context` defaults to the bundled
    /// description of `task`.
    pub fn builtin(operation: Op, language: Language, task: Task, task_context: Option<&str>) -> Result<Self, LlmError> {
        let file = prompt_file(language)?;
        let context = match (task_context, task) {
            (Some(c), _) => c.to_string(),
            (None, Task::Sentiment) => file.sentiment_context.clone(),
            (None, Task::Topic) => file.topic_context.clone(),
        };
        let body = match operation {
            Op::Stopwords => {
                let retention = if task.keeps_negations() { file.retention.as_str() } else { "" };
                fill(&fill(&file.stopwords, "{task_context}", &context), "{retention}", retention)
            }
            Op::Lemma => file.lemma.clone(),
            Op::Stem => file.stem.clone(),
        };
        PromptTemplate::new(operation, language, &context, &body)
    }

    /// Substitutes the paragraph verbatim; braces inside it stay literal.
    pub fn render(&self, paragraph: &str) -> String {
        let (head, tail) = self.body.split_once(SLOT).expect("slot checked at construction");
        let mut out = String::with_capacity(self.body.len() + paragraph.len());
        out.push_str(head);
        out.push_str(paragraph);
        out.push_str(tail);
        out
    }
}

fn fill(template: &str, placeholder: &str, value: &str) -> String {
    match template.split_once(placeholder) {
        Some((head, tail)) => format!("{head}{value}{tail}"),
        None => template.to_string(),
    }
}

/// Templates for the three operations in one prompt language.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Templates {
    pub stopwords: PromptTemplate,
    pub lemma: PromptTemplate,
    pub stem: PromptTemplate,
}

impl Templates {
    pub fn builtin(language: Language, task: Task, task_context: Option<&str>) -> Result<Self, LlmError> {
        Ok(Templates {
            stopwords: PromptTemplate::builtin(Op::Stopwords, language, task, task_context)?,
            lemma: PromptTemplate::builtin(Op::Lemma, language, task, task_context)?,
            stem: PromptTemplate::builtin(Op::Stem, language, task, task_context)?,
        })
    }

    pub fn get(&self, op: Op) -> &PromptTemplate {
        match op {
            Op::Stopwords => &self.stopwords,
            Op::Lemma => &self.lemma,
            Op::Stem => &self.stem,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmConfig {
    /// Full chat-completions URL, e.g. `http://localhost:8000/v1/chat/completions`.
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    /// When off, requests are sent with temperature 0.
    pub sampling: bool,
    pub max_in_flight: usize,
    pub timeout_secs: f64,
    pub cache: PathBuf,
    pub max_retries: u32,
    pub backoff_ms: u64,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
}

impl Default for LlmConfig {
    fn default() -> Self {
        LlmConfig {
            endpoint: String::new(),
            model: String::new(),
            temperature: 0.7,
            sampling: true,
            max_in_flight: 4,
            timeout_secs: 120.0,
            cache: PathBuf::from("llm_cache.jsonl"),
            max_retries: 4,
            backoff_ms: 500,
            api_key_env: API_KEY_ENV.to_string(),
        }
    }
}

impl LlmConfig {
    pub fn validate(&self) -> Result<(), LlmError> {
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(LlmError::Config(format!("temperature must be >= 0, got {}", self.temperature)));
        }
        if self.max_in_flight == 0 {
            return Err(LlmError::Config("max_in_flight must be >= 1".into()));
        }
        if !(self.timeout_secs > 0.0) {
            return Err(LlmError::Config("timeout_secs must be > 0".into()));
        }
        if self.model.is_empty() {
            return Err(LlmError::Config("model name is empty".into()));
        }
        Ok(())
    }

    pub fn effective_temperature(&self) -> f64 {
        if self.sampling {
            self.temperature
        } else {
            0.0
        }
    }
}

/// SHA-256 over length-prefixed model, temperature bits and prompt. The
/// generation index joins the hash only for repeat generations, so
/// generation 0 keys are stable whatever the generation count.
pub fn cache_key(model: &str, temperature: f64, prompt: &str, generation: u32) -> String {
    let mut h = Sha256::new();
    for field in [model.as_bytes(), prompt.as_bytes()] {
        h.update((field.len() as u64).to_le_bytes());
        h.update(field);
    }
    h.update(temperature.to_bits().to_le_bytes());
    if generation > 0 {
        h.update(b"generation");
        h.update(generation.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub model: String,
    pub temperature: f64,
    #[serde(default)]
    pub generation: u32,
    pub prompt: String,
    pub response: String,
    pub timestamp: u64,
}

impl CacheEntry {
    pub fn new(model: &str, temperature: f64, prompt: &str, generation: u32, response: &str) -> Self {
        CacheEntry {
            key: cache_key(model, temperature, prompt, generation),
            model: model.to_string(),
            temperature,
            generation,
            prompt: prompt.to_string(),
            response: response.to_string(),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        }
    }

    fn matches(&self, model: &str, temperature: f64, prompt: &str, generation: u32) -> bool {
        self.model == model
            && self.temperature.to_bits() == temperature.to_bits()
            && self.prompt == prompt
            && self.generation == generation
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheStats {
    pub entries: usize,
    pub hits: u64,
    pub misses: u64,
}

/// Append-only JSONL response cache. Each entry is one line written with a
/// single `write_all` and synced before the response is handed back; an
/// unterminated last line (an interrupted write) is ignored on load.
#[derive(Debug)]
pub struct Cache {
    path: Option<PathBuf>,
    entries: RwLock<HashMap<String, CacheEntry>>,
    file: Mutex<Option<File>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl Cache {
    pub fn in_memory() -> Self {
        Cache {
            path: None,
            entries: RwLock::new(HashMap::new()),
            file: Mutex::new(None),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    /// Loads `path` if it exists; the file is created on first insert.
    pub fn open(path: &Path) -> Result<Self, LlmError> {
        let io = |source| LlmError::CacheIo {
            path: path.to_path_buf(),
            source,
        };
        let mut entries = HashMap::new();
        if path.exists() {
            let raw = fs::read(path).map_err(io)?;
            for (i, line) in complete_lines(&raw).into_iter().enumerate() {
                match serde_json::from_slice::<CacheEntry>(line) {
                    Ok(e) => {
                        entries.entry(e.key.clone()).or_insert(e);
                    }
                    Err(e) => log::warn!("{}:{}: skipping unreadable cache line: {e}", path.display(), i + 1),
                }
            }
        }
        Ok(Cache {
            path: Some(path.to_path_buf()),
            entries: RwLock::new(entries),
            file: Mutex::new(None),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cached response for exactly this (model, temperature, prompt,
    /// generation); counts a hit or a miss.
    pub fn lookup(&self, model: &str, temperature: f64, prompt: &str, generation: u32) -> Option<String> {
        let key = cache_key(model, temperature, prompt, generation);
        let found = self
            .entries
            .read()
            .expect("cache lock")
            .get(&key)
            .filter(|e| e.matches(model, temperature, prompt, generation))
            .map(|e| e.response.clone());
        let counter = if found.is_some() { &self.hits } else { &self.misses };
        counter.fetch_add(1, Ordering::Relaxed);
        found
    }

    /// Distinct model names with stored responses, sorted.
    pub fn models(&self) -> Vec<String> {
        let entries = self.entries.read().expect("cache lock");
        let models: BTreeSet<&str> = entries.values().map(|e| e.model.as_str()).collect();
        models.into_iter().map(String::from).collect()
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.entries.read().expect("cache lock").contains_key(key)
    }

    /// Stores an entry; an existing key is left untouched.
    pub fn insert(&self, entry: CacheEntry) -> Result<(), LlmError> {
        let mut entries = self.entries.write().expect("cache lock");
        if entries.contains_key(&entry.key) {
            return Ok(());
        }
        if let Some(path) = &self.path {
            let io = |source| LlmError::CacheIo {
                path: path.clone(),
                source,
            };
            let mut line = serde_json::to_vec(&entry).map_err(|e| LlmError::Malformed(e.to_string()))?;
            line.push(b'\n');
            let mut file = self.file.lock().expect("cache file lock");
            if file.is_none() {
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir).map_err(io)?;
                }
                let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
                // terminate a torn final line first
                if f.metadata().map_err(io)?.len() > 0 && !ends_with_newline(path).map_err(io)? {
                    f.write_all(b"\n").map_err(io)?;
                }
                *file = Some(f);
            }
            let f = file.as_mut().expect("opened above");
            f.write_all(&line).map_err(io)?;
            f.sync_data().map_err(io)?;
        }
        entries.insert(entry.key.clone(), entry);
        Ok(())
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            entries: self.len(),
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
        }
    }
}

fn ends_with_newline(path: &Path) -> std::io::Result<bool> {
    let raw = fs::read(path)?;
    Ok(raw.last() == Some(&b'\n'))
}

fn complete_lines(raw: &[u8]) -> Vec<&[u8]> {
    let mut lines: Vec<&[u8]> = raw.split(|&b| b == b'\n').collect();
    // the segment after the last newline is empty or an interrupted write
    lines.pop();
    lines.into_iter().filter(|l| !l.iter().all(u8::is_ascii_whitespace)).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub entries: usize,
    /// Line numbers that are not valid cache entries.
    pub bad_lines: Vec<usize>,
    /// Line numbers whose key does not hash from the stored fields.
    pub key_mismatches: Vec<usize>,
    /// Line numbers repeating an earlier key.
    pub duplicate_keys: Vec<usize>,
    pub partial_tail: bool,
}

impl VerifyReport {
    pub fn is_ok(&self) -> bool {
        self.bad_lines.is_empty() && self.key_mismatches.is_empty() && self.duplicate_keys.is_empty() && !self.partial_tail
    }
}

/// Checks every line of a cache file.
pub fn verify_cache(path: &Path) -> Result<VerifyReport, LlmError> {
    let raw = fs::read(path).map_err(|source| LlmError::CacheIo {
        path: path.to_path_buf(),
        source,
    })?;
    let mut report = VerifyReport {
        partial_tail: !raw.is_empty() && raw.last() != Some(&b'\n'),
        ..Default::default()
    };
    let mut seen = BTreeSet::new();
    let body = if report.partial_tail {
        &raw[..raw.iter().rposition(|&b| b == b'\n').map(|p| p + 1).unwrap_or(0)]
    } else {
        &raw[..]
    };
    for (i, line) in body.split(|&b| b == b'\n').enumerate() {
        let line_no = i + 1;
        if line.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        match serde_json::from_slice::<CacheEntry>(line) {
            Ok(e) => {
                report.entries += 1;
                if cache_key(&e.model, e.temperature, &e.prompt, e.generation) != e.key {
                    report.key_mismatches.push(line_no);
                }
                if !seen.insert(e.key) {
                    report.duplicate_keys.push(line_no);
                }
            }
            Err(_) => report.bad_lines.push(line_no),
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
struct ChatMessage<'a> {
    role: &'static str,
    content: &'a str,
}

#[derive(Debug, Clone, Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: [ChatMessage<'a>; 1],
    temperature: f64,
}

#[derive(Debug, Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Debug, Deserialize)]
struct ChatChoice {
    message: ChatContent,
}

#[derive(Debug, Deserialize)]
struct ChatContent {
    content: Option<String>,
}

/// Builds the request body: one user message holding the whole prompt.
pub fn chat_request_body(model: &str, prompt: &str, temperature: f64) -> serde_json::Value {
    serde_json::to_value(ChatRequest {
        model,
        messages: [ChatMessage {
            role: "user",
            content: prompt,
        }],
        temperature,
    })
    .expect("request serializes")
}

/// Extracts `choices[0].message.content`.
pub fn parse_chat_response(body: &str) -> Result<String, LlmError> {
    let resp: ChatResponse = serde_json::from_str(body).map_err(|e| LlmError::Malformed(format!("{e}: {body}")))?;
    resp.choices
        .into_iter()
        .next()
        .and_then(|c| c.message.content)
        .ok_or_else(|| LlmError::Malformed(format!("no choices[0].message.content in {body}")))
}

fn is_retryable(status: u16) -> bool {
    status == 429 || (500..600).contains(&status)
}

#[derive(Debug)]
struct HttpClient {
    agent: ureq::Agent,
    endpoint: String,
    api_key: Option<String>,
    max_retries: u32,
    backoff: Duration,
}

impl HttpClient {
    fn new(config: &LlmConfig) -> Self {
        let agent_config = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs_f64(config.timeout_secs)))
            .build();
        HttpClient {
            agent: ureq::Agent::new_with_config(agent_config),
            endpoint: config.endpoint.clone(),
            api_key: std::env::var(&config.api_key_env).ok().filter(|k| !k.is_empty()),
            max_retries: config.max_retries,
            backoff: Duration::from_millis(config.backoff_ms),
        }
    }

    fn post(&self, body: &serde_json::Value) -> Result<String, LlmError> {
        let mut attempt = 0;
        loop {
            attempt += 1;
            let mut req = self.agent.post(&self.endpoint).header("Content-Type", "application/json");
            if let Some(key) = &self.api_key {
                req = req.header("Authorization", &format!("Bearer {key}"));
            }
            let outcome: Result<String, LlmError> = match req.send_json(body) {
                Ok(resp) => {
                    let status = resp.status().as_u16();
                    match resp.into_body().read_to_string() {
                        Ok(text) if (200..300).contains(&status) => return parse_chat_response(&text),
                        Ok(text) if is_retryable(status) => Err(LlmError::Http { status, body: text }),
                        Ok(text) => return Err(LlmError::Http { status, body: text }),
                        Err(e) => Err(LlmError::Network {
                            attempts: attempt,
                            message: e.to_string(),
                        }),
                    }
                }
                Err(e) => Err(LlmError::Network {
                    attempts: attempt,
                    message: e.to_string(),
                }),
            };
            let err = outcome.expect_err("success returns early");
            if attempt > self.max_retries {
                return Err(err);
            }
            let wait = self.backoff * 2u32.saturating_pow(attempt - 1);
            log::warn!("request failed ({err}); retry {attempt}/{} in {wait:?}", self.max_retries);
            std::thread::sleep(wait);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub cached: bool,
}

/// Cache-first chat client. In replay mode a miss is an error and the
/// network is never touched.
#[derive(Debug)]
pub struct LlmClient {
    config: LlmConfig,
    cache: Arc<Cache>,
    replay: bool,
    http: Option<HttpClient>,
    calls: AtomicU64,
}

impl LlmClient {
    pub fn new(config: LlmConfig, cache: Arc<Cache>, replay: bool) -> Result<Self, LlmError> {
        config.validate()?;
        let http = if replay || config.endpoint.is_empty() {
            None
        } else {
            Some(HttpClient::new(&config))
        };
        Ok(LlmClient {
            config,
            cache,
            replay,
            http,
            calls: AtomicU64::new(0),
        })
    }

    pub fn config(&self) -> &LlmConfig {
        &self.config
    }

    pub fn cache(&self) -> &Arc<Cache> {
        &self.cache
    }

    pub fn is_replay(&self) -> bool {
        self.replay
    }

    /// Network calls made so far.
    pub fn network_calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn key_for(&self, prompt: &str, generation: u32) -> String {
        cache_key(&self.config.model, self.config.effective_temperature(), prompt, generation)
    }

    pub fn complete(&self, prompt: &str, generation: u32) -> Result<Completion, LlmError> {
        let model = &self.config.model;
        let temperature = self.config.effective_temperature();
        if let Some(text) = self.cache.lookup(model, temperature, prompt, generation) {
            return Ok(Completion { text, cached: true });
        }
        if self.replay {
            return Err(LlmError::CacheMiss {
                keys: vec![self.key_for(prompt, generation)],
            });
        }
        let http = self
            .http
            .as_ref()
            .ok_or_else(|| LlmError::Config("no endpoint configured and the prompt is not cached".into()))?;
        self.calls.fetch_add(1, Ordering::Relaxed);
        let text = http.post(&chat_request_body(model, prompt, temperature))?;
        self.cache.insert(CacheEntry::new(model, temperature, prompt, generation, &text))?;
        Ok(Completion { text, cached: false })
    }
}

const LABEL_PREFIXES: [&str; 3] = ["Here is", "Output", "Result"];
const QUOTE_PAIRS: [(char, char); 6] = [('"', '"'), ('\'', '\''), ('“', '”'), ('‘', '’'), ('«', '»'), ('`', '`')];

/// True for a line like `Here is the result:`.
pub fn is_label_line(line: &str) -> bool {
    let line = line.trim();
    line.ends_with(':') && LABEL_PREFIXES.iter().any(|p| line.starts_with(p))
}

fn clean_step(s: &str) -> String {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("```") {
        // opening fence, optionally with a language tag
        let body = match rest.split_once('\n') {
            Some((_, body)) => body,
            None => rest,
        };
        return body.strip_suffix("```").unwrap_or(body).to_string();
    }
    if let Some((first, rest)) = s.split_once('\n') {
        if is_label_line(first) {
            return rest.to_string();
        }
    } else if is_label_line(s) {
        return String::new();
    }
    let mut chars = s.chars();
    if let (Some(a), Some(b)) = (chars.next(), chars.next_back()) {
        if QUOTE_PAIRS.contains(&(a, b)) {
            let inner = &s[a.len_utf8()..s.len() - b.len_utf8()];
            if !has_quote_boundary(inner, a, b) {
                return inner.to_string();
            }
        }
    }
    s.to_string()
}

/// A quote char inside `inner` that starts or ends a quoted span, i.e. is
/// not flanked by word characters on both sides.
fn has_quote_boundary(inner: &str, open: char, close: char) -> bool {
    let chars: Vec<char> = inner.chars().collect();
    chars.iter().enumerate().any(|(i, &c)| {
        (c == open || c == close) && {
            let before = i.checked_sub(1).map(|j| chars[j].is_alphanumeric()).unwrap_or(false);
            let after = chars.get(i + 1).map(|n| n.is_alphanumeric()).unwrap_or(false);
            !(before && after)
        }
    })
}

/// Strips surrounding whitespace, quotes, markdown fences and a leading
/// label line, repeatedly, until nothing changes. Interior text is kept.
pub fn clean_response(raw: &str) -> String {
    let mut current = raw.to_string();
    loop {
        let next = clean_step(&current);
        if next == current {
            return current;
        }
        current = next;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanedResponse {
    pub text: String,
    pub degenerate: bool,
    pub truncated: bool,
}

/// Cleans a response and caps it at four times the input length.
pub fn postprocess(raw: &str, input: &str) -> CleanedResponse {
    let mut text = clean_response(raw);
    let cap = 4 * input.chars().count();
    let truncated = text.chars().count() > cap;
    if truncated {
        text = text.chars().take(cap).collect();
    }
    CleanedResponse {
        degenerate: text.trim().is_empty(),
        text,
        truncated,
    }
}

/// Where preprocessing happens.
#[derive(Debug, Clone)]
pub enum Backend {
    Classic,
    /// Runs the classic chain, then feeds the rendered result through the
    /// same cleaning and tokenizing path as an LLM response.
    Echo,
    Llm(Arc<LlmClient>),
}

impl Backend {
    pub fn kind(&self) -> &'static str {
        match self {
            Backend::Classic => "classic",
            Backend::Echo => "echo",
            Backend::Llm(_) => "llm",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessSpec {
    /// Operations in application order.
    pub ops: Vec<Op>,
    pub stemmer: Stemmer,
    pub generation: u32,
}

impl PreprocessSpec {
    pub fn new(ops: &[Op], stemmer: Stemmer) -> Self {
        PreprocessSpec {
            ops: ops.to_vec(),
            stemmer,
            generation: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessedText {
    pub id: String,
    pub text: String,
    #[serde(skip)]
    pub tokens: TokenSequence,
    pub cache_hits: u32,
    pub cache_misses: u32,
    /// Steps whose response cleaned to nothing; the step input was kept.
    pub degenerate: u32,
    pub truncated: u32,
}

/// Everything needed to preprocess documents of one language.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    pub backend: Backend,
    pub classic: Classic,
    pub templates: Templates,
}

impl Preprocessor {
    pub fn new(backend: Backend, classic: Classic, templates: Templates) -> Self {
        Preprocessor {
            backend,
            classic,
            templates,
        }
    }

    pub fn preprocess(&self, doc: &Document, spec: &PreprocessSpec) -> Result<PreprocessedText, LlmError> {
        let mut out = PreprocessedText {
            id: doc.id.clone(),
            text: String::new(),
            tokens: TokenSequence::default(),
            cache_hits: 0,
            cache_misses: 0,
            degenerate: 0,
            truncated: 0,
        };
        match &self.backend {
            Backend::Classic => {
                out.tokens = self.classic.run_ops(&spec.ops, &tokenize(&doc.text), spec.stemmer);
                out.text = out.tokens.render();
            }
            Backend::Echo => {
                let rendered = self.classic.run_ops(&spec.ops, &tokenize(&doc.text), spec.stemmer).render();
                let cleaned = postprocess(&rendered, &doc.text);
                out.text = if cleaned.degenerate {
                    out.degenerate += 1;
                    rendered
                } else {
                    cleaned.text
                };
                out.tokens = tokenize(&out.text);
            }
            Backend::Llm(client) => {
                let mut text = doc.text.clone();
                for &op in &spec.ops {
                    let prompt = self.templates.get(op).render(&text);
                    let completion = client.complete(&prompt, spec.generation).map_err(|e| LlmError::Document {
                        id: doc.id.clone(),
                        source: Box::new(e),
                    })?;
                    if completion.cached {
                        out.cache_hits += 1;
                    } else {
                        out.cache_misses += 1;
                    }
                    let cleaned = postprocess(&completion.text, &text);
                    out.truncated += u32::from(cleaned.truncated);
                    if cleaned.degenerate {
                        out.degenerate += 1;
                    } else {
                        text = cleaned.text;
                    }
                }
                out.tokens = tokenize(&text);
                out.text = text;
            }
        }
        Ok(out)
    }

    /// Preprocesses documents on up to `max_in_flight` threads. Results
    /// come back in input order.
    pub fn preprocess_all(
        &self,
        docs: &[Document],
        spec: &PreprocessSpec,
        max_in_flight: usize,
    ) -> Vec<Result<PreprocessedText, LlmError>> {
        let workers = max_in_flight.max(1).min(docs.len());
        if workers <= 1 {
            return docs.iter().map(|d| self.preprocess(d, spec)).collect();
        }
        let next = AtomicUsize::new(0);
        let slots: Vec<Mutex<Option<Result<PreprocessedText, LlmError>>>> = docs.iter().map(|_| Mutex::new(None)).collect();
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= docs.len() {
                        break;
                    }
                    let result = self.preprocess(&docs[i], spec);
                    *slots[i].lock().expect("slot lock") = Some(result);
                });
            }
        });
        slots
            .into_iter()
            .map(|s| s.into_inner().expect("slot lock").expect("every slot filled"))
            .collect()
    }
}

/// All missing cache keys across results, sorted and deduplicated.
pub fn missing_keys(results: &[Result<PreprocessedText, LlmError>]) -> Vec<String> {
    let keys: BTreeSet<&String> = results.iter().filter_map(|r| r.as_ref().err()).flat_map(|e| e.missing_keys()).collect();
    keys.into_iter().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundled_template_has_one_slot() {
        for lang in Language::ALL {
            for task in [Task::Sentiment, Task::Topic] {
                Templates::builtin(lang, task, None).unwrap();
            }
        }
    }

    #[test]
    fn clean_examples() {
        assert_eq!(clean_response("```\ncat sat mat\n```"), "cat sat mat");
        assert_eq!(clean_response("cat sat mat"), "cat sat mat");
        assert_eq!(clean_response("Here is the result:\ncat sat"), "cat sat");
        assert_eq!(clean_response("Output:\n\"cat sat\"\n"), "cat sat");
        assert_eq!(clean_response("```text\n'cat'\n```"), "cat");
        assert_eq!(clean_response("Result:"), "");
        assert_eq!(clean_response("'it's fine'"), "it's fine");
        assert_eq!(clean_response("'cat' sat 'mat'"), "'cat' sat 'mat'");
    }

    #[test]
    fn key_depends_on_every_field() {
        let k = cache_key("m", 0.7, "p", 0);
        assert_ne!(k, cache_key("m2", 0.7, "p", 0));
        assert_ne!(k, cache_key("m", 0.0, "p", 0));
        assert_ne!(k, cache_key("m", 0.7, "p ", 0));
        assert_ne!(k, cache_key("m", 0.7, "p", 1));
        assert_ne!(cache_key("ab", 0.7, "c", 0), cache_key("a", 0.7, "bc", 0));
    }
}
