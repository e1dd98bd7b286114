//! Command-line front end. Exit codes: 0 success, 1 usage or config
//! error, 2 runtime failure.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classic::{Classic, Combo, Op, Task};
use crate::corpus::{Document, Split};
use crate::llmproc::{verify_cache, Backend, Cache, LlmClient, LlmConfig, PreprocessSpec, Preprocessor, Templates};
use crate::runner::report::{rewrite_from_json, write_agreement, write_classification, write_tuning};
use crate::runner::{BackendKind, RunError, Runner, StemmerFamily};
use crate::Language;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "llmprep", version, about = "Classic vs LLM text preprocessing experiments", arg_required_else_help = true)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Answer prompts from the cache only; a miss aborts the run.
    #[arg(long, global = true)]
    replay: bool,
    /// Chat-completions URL for every LLM backend.
    #[arg(long, global = true)]
    endpoint: Option<String>,
    /// Model name for every LLM backend.
    #[arg(long, global = true)]
    model: Option<String>,
    #[arg(long, global = true)]
    temperature: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Generations per prompt; scores are averaged.
    #[arg(long, global = true)]
    generations: Option<u32>,
    /// More logging (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one text through a backend and print the result.
    Preprocess(PreprocessArgs),
    /// Agreement tables between LLM and classic preprocessing.
    Agree,
    /// Classification tables for every backend and combo.
    Classify,
    /// Hyperparameter search on the tuning dataset.
    Tune,
    /// Inspect response cache files.
    Cache {
        #[command(subcommand)]
        action: CacheCommand,
    },
    /// Re-render Markdown and CSV from the JSON reports in the output directory.
    Report,
}

#[derive(Debug, Subcommand)]
enum CacheCommand {
    /// Entry counts per cache file.
    Stats {
        /// Cache files; defaults to those of the config's LLM backends.
        paths: Vec<PathBuf>,
    },
    /// Check every line of each cache file.
    Verify { paths: Vec<PathBuf> },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BackendArg {
    Classic,
    Echo,
    Llm,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgoArg {
    Porter,
    Lancaster,
    Snowball,
}

#[derive(Debug, Args)]
struct PreprocessArgs {
    /// Operations in order (sw, lemma, stem); comma separated or repeated.
    #[arg(long, value_delimiter = ',', required_unless_present = "combo")]
    op: Vec<Op>,
    /// A named chain instead of --op: SW, SW+L, L, SW+S or S.
    #[arg(long, conflicts_with = "op")]
    combo: Option<Combo>,
    #[arg(long, value_enum, default_value = "classic")]
    backend: BackendArg,
    /// Stemming algorithm; defaults to the first one available for the language.
    #[arg(long, value_enum)]
    algo: Option<AlgoArg>,
    /// Language code of the text.
    #[arg(long, default_value = "en")]
    lang: Language,
    /// sentiment keeps negations during stopword removal.
    #[arg(long, default_value = "topic")]
    task: Task,
    /// Prompt language for the LLM backend; defaults to --lang.
    #[arg(long)]
    prompt_lang: Option<Language>,
    /// Task description for the stopword prompt.
    #[arg(long)]
    task_context: Option<String>,
    /// Response cache for the LLM backend; in memory when absent.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Text to process; read from stdin when absent.
    text: Option<String>,
}

/// Failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        Failure {
            code: if e.is_config() { EXIT_CONFIG } else { EXIT_RUNTIME },
            message: e.to_string(),
        }
    }
}

fn config_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message: message.into(),
    }
}

fn runtime_error(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_RUNTIME,
        message: message.to_string(),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if code == EXIT_OK { stdout } else { stderr };
            let _ = write!(sink, "{rendered}");
            return code;
        }
    };
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match dispatch(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<(), Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Preprocess(args) => preprocess(g, args, stdout),
        Command::Agree => {
            let runner = runner(g)?;
            let started = now();
            let run = runner.run_agreement()?;
            let files = write_agreement(&run, &runner.output_dir())?;
            finish(&runner, "agree", started, files, stdout)
        }
        Command::Classify => {
            let runner = runner(g)?;
            let started = now();
            let run = runner.run_classification()?;
            let out = runner.output_dir();
            let mut files = write_tuning(&run.tuning, &out)?;
            files.extend(write_classification(&run, &out)?);
            finish(&runner, "classify", started, files, stdout)
        }
        Command::Tune => {
            let runner = runner(g)?;
            let started = now();
            let run = runner.run_tuning()?;
            let files = write_tuning(&run, &runner.output_dir())?;
            finish(&runner, "tune", started, files, stdout)
        }
        Command::Report => {
            let dir = match (&g.out, &g.config) {
                (Some(out), _) => out.clone(),
                (None, Some(_)) => runner(g)?.output_dir(),
                (None, None) => return Err(config_error("report needs --out or --config")),
            };
            for f in rewrite_from_json(&dir)? {
                let _ = writeln!(stdout, "{}", f.display());
            }
            Ok(())
        }
        Command::Cache { action } => cache(g, action, stdout),
    }
}

fn runner(g: &GlobalArgs) -> Result<Runner, Failure> {
    let Some(path) = &g.config else {
        return Err(config_error("this command needs --config <file>"));
    };
    let mut runner = Runner::from_file(path, g.replay)?;
    let cfg = runner.config_mut();
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    if let Some(n) = g.generations {
        cfg.generations = n;
    }
    if let Some(out) = &g.out {
        cfg.output_dir = absolute(out)?;
    }
    for b in cfg.backends.iter_mut().filter(|b| b.kind == BackendKind::Llm) {
        if let Some(e) = &g.endpoint {
            b.llm.endpoint = e.clone();
        }
        if let Some(m) = &g.model {
            b.llm.model = m.clone();
        }
        if let Some(t) = g.temperature {
            b.llm.temperature = t;
        }
    }
    cfg.validate()?;
    Ok(runner)
}

fn absolute(path: &Path) -> Result<PathBuf, Failure> {
    if path.is_absolute() {
        return Ok(path.to_path_buf());
    }
    let cwd = std::env::current_dir().map_err(runtime_error)?;
    Ok(cwd.join(path))
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

#[derive(Serialize)]
struct RunRecord<'a> {
    command: &'a str,
    config_hash: String,
    replay: bool,
    started_unix: u64,
    finished_unix: u64,
    files: Vec<String>,
}

/// Writes `run.json` (the only output carrying wall-clock times) and lists
/// the written files.
fn finish(runner: &Runner, command: &str, started: u64, files: Vec<PathBuf>, stdout: &mut dyn Write) -> Result<(), Failure> {
    let out = runner.output_dir();
    let record = RunRecord {
        command,
        config_hash: runner.config().hash(),
        replay: runner.is_replay(),
        started_unix: started,
        finished_unix: now(),
        files: files.iter().map(|f| f.strip_prefix(&out).unwrap_or(f).display().to_string()).collect(),
    };
    let path = out.join("run.json");
    let body = serde_json::to_string_pretty(&record).expect("run record serializes") + "\n";
    std::fs::write(&path, body).map_err(|e| runtime_error(format!("{}: {e}", path.display())))?;
    for f in &files {
        let _ = writeln!(stdout, "{}", f.display());
    }
    Ok(())
}

fn preprocess(g: &GlobalArgs, args: &PreprocessArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let text = match &args.text {
        Some(t) => t.clone(),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(runtime_error)?;
            s
        }
    };
    let ops: Vec<Op> = match args.combo {
        Some(c) => c.ops().to_vec(),
        None => args.op.clone(),
    };
    let stemmer = match args.algo {
        None => crate::Stemmer::available_for(args.lang)[0],
        Some(a) => {
            let family = match a {
                AlgoArg::Porter => StemmerFamily::Porter,
                AlgoArg::Lancaster => StemmerFamily::Lancaster,
                AlgoArg::Snowball => StemmerFamily::Snowball,
            };
            family
                .resolve(args.lang)
                .ok_or_else(|| config_error(format!("{a:?} stemming is not available for {}", args.lang.name())))?
        }
    };
    let classic = Classic::load(args.lang, args.task).map_err(runtime_error)?;
    let prompt_lang = args.prompt_lang.unwrap_or(args.lang);
    let templates = Templates::builtin(prompt_lang, args.task, args.task_context.as_deref()).map_err(runtime_error)?;
    let backend = match args.backend {
        BackendArg::Classic => Backend::Classic,
        BackendArg::Echo => Backend::Echo,
        BackendArg::Llm => {
            let mut config = LlmConfig {
                endpoint: g.endpoint.clone().unwrap_or_default(),
                model: g.model.clone().unwrap_or_default(),
                ..Default::default()
            };
            if let Some(t) = g.temperature {
                config.temperature = t;
            }
            config.validate().map_err(|e| config_error(e.to_string()))?;
            if config.endpoint.is_empty() && !g.replay {
                return Err(config_error("the llm backend needs --endpoint (or --replay with --cache)"));
            }
            let cache = match &args.cache {
                Some(p) => Cache::open(p).map_err(runtime_error)?,
                None => Cache::in_memory(),
            };
            Backend::Llm(Arc::new(LlmClient::new(config, Arc::new(cache), g.replay).map_err(runtime_error)?))
        }
    };
    let doc = Document {
        id: "cli".into(),
        text,
        label: String::new(),
        language: args.lang,
        split: Split::Unassigned,
    };
    let spec = PreprocessSpec::new(&ops, stemmer);
    let out = Preprocessor::new(backend, classic, templates).preprocess(&doc, &spec).map_err(runtime_error)?;
    let _ = writeln!(stdout, "{}", out.text);
    Ok(())
}

#[derive(Serialize)]
struct CacheStatsLine {
    path: String,
    entries: usize,
    models: Vec<String>,
    bytes: u64,
}

fn cache(g: &GlobalArgs, action: &CacheCommand, stdout: &mut dyn Write) -> Result<(), Failure> {
    let given = match action {
        CacheCommand::Stats { paths } | CacheCommand::Verify { paths } => paths.clone(),
    };
    let paths = if given.is_empty() {
        match &g.config {
            Some(_) => runner(g)?.cache_paths(),
            None => return Err(config_error("give cache file paths or --config")),
        }
    } else {
        given
    };
    if paths.is_empty() {
        return Err(config_error("the config has no LLM backends"));
    }
    let mut all_ok = true;
    for path in &paths {
        match action {
            CacheCommand::Stats { .. } => {
                let cache = Cache::open(path).map_err(runtime_error)?;
                let models = cache.models();
                let bytes = std::fs::metadata(path).map(|m| m.len()).unwrap_or(0);
                let line = CacheStatsLine {
                    path: path.display().to_string(),
                    entries: cache.len(),
                    models,
                    bytes,
                };
                let _ = writeln!(stdout, "{}", serde_json::to_string(&line).expect("stats serialize"));
            }
            CacheCommand::Verify { .. } => {
                let report = verify_cache(path).map_err(runtime_error)?;
                all_ok &= report.is_ok();
                let _ = writeln!(
                    stdout,
                    "{}: {} ({})",
                    path.display(),
                    if report.is_ok() { "ok" } else { "damaged" },
                    serde_json::to_string(&report).expect("report serializes")
                );
            }
        }
    }
    if all_ok {
        Ok(())
    } else {
        Err(runtime_error("cache verification failed"))
    }
}
