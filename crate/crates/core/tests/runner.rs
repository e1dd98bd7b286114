mod common;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use common::server::{chat_body, serve};
use llmprep::classic::{Combo, Op, Task};
use llmprep::llmproc::{CacheEntry, PromptTemplate};
use llmprep::runner::report::{
    emit_agreement, emit_classification, from_json, read_csv, rewrite_from_json, write_agreement, write_classification,
    AGREEMENT_CSV_HEADER, CLASSIFICATION_CSV_HEADER, ReportFormat,
};
use llmprep::runner::{
    AgreementRun, BackendKind, ClassificationRun, ExperimentConfig, PromptLanguage, RunError, Runner,
};
use llmprep::Language;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn fixture_runner(out: &Path) -> Runner {
    let mut r = Runner::from_file(&fixtures().join("experiment.toml"), true).unwrap();
    r.config_mut().output_dir = out.to_path_buf();
    r
}

const MINIMAL: &str = r#"
version = 1
[[datasets]]
name = "d"
path = "d.jsonl"
language = "en"
[[backends]]
name = "classic"
kind = "classic"
"#;

fn config_err(src: &str) -> String {
    match ExperimentConfig::from_toml(src) {
        Err(e @ RunError::Config(_)) => {
            assert!(e.is_config());
            e.to_string()
        }
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn minimal_config_gets_defaults() {
    let c = ExperimentConfig::from_toml(MINIMAL).unwrap();
    assert_eq!(c.combos_in_order(), Combo::ALL.to_vec());
    assert_eq!(c.generations, 1);
    assert_eq!(c.stemmers_for(Language::English).len(), 3);
    assert_eq!(c.stemmers_for(Language::Italian).len(), 1);
    assert_eq!(c.tuning_dataset().name, "d");
}

#[test]
fn config_validation_errors() {
    let e = config_err("version = 1\ndatasets = []\n[[backends]]\nname = \"c\"\nkind = \"classic\"\n");
    assert!(e.contains("at least one dataset"), "{e}");
    let e = config_err(&MINIMAL.replace("version = 1", "version = 2"));
    assert!(e.contains("unsupported config version 2"), "{e}");
    let dup = format!("{MINIMAL}[[datasets]]\nname = \"d\"\npath = \"e.jsonl\"\nlanguage = \"en\"\n");
    assert!(config_err(&dup).contains("duplicate dataset name"));
    let e = config_err(&MINIMAL.replace("name = \"d\"", "name = \"../d\""));
    assert!(e.contains("dataset name"), "{e}");
    let e = config_err(&format!("{MINIMAL}[tuning]\ndataset = \"nope\"\n"));
    assert!(e.contains("tuning dataset"), "{e}");
    let e = config_err(&MINIMAL.replace("version = 1", "version = 1\ngenerations = 0"));
    assert!(e.contains("generations"), "{e}");
    let e = config_err(&MINIMAL.replace("version = 1", "version = 1\ncolour = 3"));
    assert!(e.contains("colour"), "{e}");
    let e = config_err(&MINIMAL.replace("\"en\"", "\"xx\""));
    assert!(!e.is_empty());
    let e = config_err(&format!("{MINIMAL}[[backends]]\nname = \"llm\"\nkind = \"llm\"\nmodel = \"\"\nendpoint = \"http://x\"\n"));
    assert!(e.contains("backend llm"), "{e}");
}

#[test]
fn api_key_in_config_is_rejected() {
    let src = format!("{MINIMAL}[[backends]]\nname = \"llm\"\nkind = \"llm\"\nmodel = \"m\"\nendpoint = \"http://x\"\napi_key = \"sk-secret\"\n");
    let e = config_err(&src);
    assert!(e.contains("api_key is not accepted"), "{e}");
    assert!(e.contains("LLMPREP_API_KEY"), "{e}");
    assert!(!e.contains("sk-secret"));
    let e = config_err(&src.replace("api_key =", "apikey ="));
    assert!(e.contains("unknown field `apikey`"), "{e}");
}

#[test]
fn hash_tracks_semantic_fields_only() {
    let (base, _) = ExperimentConfig::load(&fixtures().join("experiment.toml")).unwrap();
    let h = base.hash();
    assert_eq!(h.len(), 64);
    let same = |f: &dyn Fn(&mut ExperimentConfig)| {
        let mut c = base.clone();
        f(&mut c);
        c.hash() == h
    };
    assert!(same(&|c| c.output_dir = "/elsewhere".into()));
    assert!(same(&|c| c.backends[2].llm.timeout_secs += 10.0));
    assert!(same(&|c| c.backends[2].llm.max_in_flight += 1));
    assert!(same(&|c| c.backends[2].llm.cache = "other.jsonl".into()));
    assert!(!same(&|c| c.seed += 1));
    assert!(!same(&|c| c.backends[2].llm.model.push('x')));
    assert!(!same(&|c| c.backends[2].llm.temperature = 0.0));
    assert!(!same(&|c| c.combos.pop().map(drop).unwrap_or_default()));
    assert!(!same(&|c| c.generations = 3));
}

#[test]
fn prompt_language_policy() {
    use Language::*;
    assert_eq!(PromptLanguage::Both.resolve(English), [English]);
    assert_eq!(PromptLanguage::Native.resolve(English), [English]);
    assert_eq!(PromptLanguage::English.resolve(Italian), [English]);
    assert_eq!(PromptLanguage::Native.resolve(Italian), [Italian]);
    assert_eq!(PromptLanguage::Both.resolve(Italian), [English, Italian]);
}

#[test]
fn fixture_agreement_replay() {
    let dir = tempfile::tempdir().unwrap();
    let run = fixture_runner(dir.path()).run_agreement().unwrap();
    for c in run.cells.iter().filter(|c| c.kind == BackendKind::Echo) {
        let r = &c.report;
        assert_eq!(r.sw_pct, Some(100.0), "{}", c.dataset);
        assert_eq!(r.nsw_pct, Some(0.0));
        assert_eq!(r.l_pct, Some(100.0));
        assert_eq!(r.s_any_pct, Some(100.0));
        let echo = c.echo_stemmer.unwrap().label();
        assert_eq!(r.s_pct[echo], 100.0);
        assert_eq!(r.stem_consistency, 1.0);
    }
    let llm: Vec<_> = run.cells.iter().filter(|c| c.kind == BackendKind::Llm).collect();
    let it: Vec<_> = llm.iter().filter(|c| c.language == Language::Italian).map(|c| c.prompt_language).collect();
    assert_eq!(it, [Some(Language::English), Some(Language::Italian)]);
    assert!(llm.iter().all(|c| c.report.sw_pct.unwrap() < 100.0));
    assert_eq!(run.provenance.cache["sim-llm"].misses, 0);
    assert!(run.provenance.cache["sim-llm"].hits > 0);
    assert!(run.provenance.excluded_documents.values().all(|&n| n == 0));
}

#[test]
fn echo_classification_equals_classic() {
    let dir = tempfile::tempdir().unwrap();
    let run = fixture_runner(dir.path()).run_classification().unwrap();
    let classic: Vec<_> = run.cells.iter().filter(|c| c.backend == "classic").collect();
    let echo: Vec<_> = run.cells.iter().filter(|c| c.backend == "echo").collect();
    assert_eq!(classic.len(), echo.len());
    for (a, b) in classic.iter().zip(&echo) {
        assert_eq!((a.combo, a.stemmer, &a.dataset), (b.combo, b.stemmer, &b.dataset));
        assert_eq!(a.detail, b.detail);
        assert_eq!(a.average, b.average);
    }
    for c in &run.cells {
        let mean = (c.naive_bayes + c.logreg + c.tree) / 3.0;
        assert!((c.average - mean).abs() < 1e-12);
    }
}

fn copy_fixtures(to: &Path) -> PathBuf {
    for f in ["experiment.toml", "en_tweets.jsonl", "it_tweets.jsonl", "llm_cache.jsonl"] {
        std::fs::copy(fixtures().join(f), to.join(f)).unwrap();
    }
    to.join("experiment.toml")
}

fn missing_keys(r: Result<AgreementRun, RunError>) -> Vec<String> {
    match r {
        Err(e @ RunError::MissingCache { .. }) => {
            assert!(!e.is_config());
            let RunError::MissingCache { keys } = e else { unreachable!() };
            keys
        }
        other => panic!("expected missing cache keys, got {:?}", other.map(|_| ())),
    }
}

#[test]
fn replay_reports_every_missing_key() {
    let dir = tempfile::tempdir().unwrap();
    let config = copy_fixtures(dir.path());
    let cache = dir.path().join("llm_cache.jsonl");
    let lines: Vec<String> = std::fs::read_to_string(&cache).unwrap().lines().map(str::to_string).collect();
    let (keep, drop): (Vec<_>, Vec<_>) = lines.iter().enumerate().partition(|(i, _)| i % 3 != 0);
    let dropped: BTreeSet<String> =
        drop.iter().map(|(_, l)| serde_json::from_str::<CacheEntry>(l).unwrap().key).collect();
    let body: String = keep.iter().map(|(_, l)| format!("{l}\n")).collect();
    std::fs::write(&cache, body).unwrap();

    let mut runner = Runner::from_file(&config, true).unwrap();
    runner.config_mut().output_dir = dir.path().join("out");
    let keys = missing_keys(runner.run_agreement());
    assert!(!keys.is_empty());
    assert!(keys.windows(2).all(|w| w[0] < w[1]), "sorted and unique");
    assert!(keys.iter().all(|k| dropped.contains(k)));
    assert!(!dir.path().join("out/agreement.json").exists());
}

#[test]
fn extra_generations_miss_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let mut runner = fixture_runner(dir.path());
    runner.config_mut().generations = 2;
    let keys = missing_keys(runner.run_agreement());
    let cached: BTreeSet<String> = std::fs::read_to_string(fixtures().join("llm_cache.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str::<CacheEntry>(l).unwrap().key)
        .collect();
    assert!(!keys.is_empty());
    assert!(keys.iter().all(|k| !cached.contains(k)));
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let run1 = fixture_runner(a.path()).run_agreement().unwrap();
    let run2 = fixture_runner(b.path()).run_agreement().unwrap();
    for f in ReportFormat::ALL {
        assert_eq!(emit_agreement(&run1, f), emit_agreement(&run2, f));
    }
    let json = emit_agreement(&run1, ReportFormat::Json);
    let back: AgreementRun = from_json(&json).unwrap();
    assert_eq!(back, run1);

    let rows = read_csv(&emit_agreement(&run1, ReportFormat::Csv)).unwrap();
    let header: BTreeSet<&str> = rows[0].keys().map(String::as_str).collect();
    assert_eq!(header, AGREEMENT_CSV_HEADER.into_iter().collect());
    for row in rows.iter().filter(|r| r["metric"] == "SW") {
        let cell = run1
            .cells
            .iter()
            .find(|c| c.dataset == row["dataset"] && c.backend == row["backend"] && c.prompt_language.map_or("none", |l| l.code()) == row["prompt_language"])
            .unwrap();
        assert_eq!(row["value"].parse::<f64>().unwrap(), cell.report.sw_pct.unwrap());
    }

    let written = write_agreement(&run1, a.path()).unwrap();
    let before: Vec<Vec<u8>> = written.iter().map(|p| std::fs::read(p).unwrap()).collect();
    std::fs::remove_file(a.path().join("agreement.md")).unwrap();
    std::fs::remove_file(a.path().join("agreement.csv")).unwrap();
    rewrite_from_json(a.path()).unwrap();
    let after: Vec<Vec<u8>> = written.iter().map(|p| std::fs::read(p).unwrap()).collect();
    assert_eq!(before, after);
}

#[test]
fn classification_csv_matches_json() {
    let dir = tempfile::tempdir().unwrap();
    let run = fixture_runner(dir.path()).run_classification().unwrap();
    write_classification(&run, dir.path()).unwrap();
    let back: ClassificationRun = from_json(&std::fs::read_to_string(dir.path().join("classification.json")).unwrap()).unwrap();
    assert_eq!(back, run);
    let rows = read_csv(&emit_classification(&run, ReportFormat::Csv)).unwrap();
    assert_eq!(rows.len(), run.cells.len());
    for (row, cell) in rows.iter().zip(&run.cells) {
        assert_eq!(row.len(), CLASSIFICATION_CSV_HEADER.len());
        assert_eq!(row["combo"], cell.combo.label());
        assert_eq!(row["average"].parse::<f64>().unwrap(), cell.average);
        assert_eq!(row["logreg"].parse::<f64>().unwrap(), cell.logreg);
    }
}

/// Returns the text slot of a bundled prompt unchanged.
fn paragraph_echo() -> common::server::Responder {
    let mut shapes = Vec::new();
    for lang in [Language::English, Language::Italian] {
        for op in [Op::Stopwords, Op::Lemma, Op::Stem] {
            let marked = PromptTemplate::builtin(op, lang, Task::Sentiment, None).unwrap().render("\u{1}");
            let (pre, post) = marked.split_once('\u{1}').unwrap();
            shapes.push((pre.to_string(), post.to_string()));
        }
    }
    Box::new(move |prompt| {
        let text = shapes
            .iter()
            .find_map(|(pre, post)| prompt.strip_prefix(pre.as_str()).and_then(|r| r.strip_suffix(post.as_str())))
            .unwrap_or("?");
        (200, chat_body(text))
    })
}

#[test]
fn live_run_fills_cache_then_replays_identically() {
    let dir = tempfile::tempdir().unwrap();
    let config = copy_fixtures(dir.path());
    std::fs::remove_file(dir.path().join("llm_cache.jsonl")).unwrap();
    let server = serve(Vec::new(), paragraph_echo());

    let mut live = Runner::from_file(&config, false).unwrap();
    live.config_mut().output_dir = dir.path().join("live");
    live.config_mut().backends[2].llm.endpoint = server.endpoint.clone();
    let first = live.run_agreement().unwrap();
    let sent = server.count();
    assert!(sent > 0);
    assert_eq!(first.provenance.cache["sim-llm"].misses as usize, sent);
    let cell = first.cells.iter().find(|c| c.kind == BackendKind::Llm).unwrap();
    assert_eq!(cell.report.nsw_pct, Some(0.0));
    assert_eq!(cell.report.sw_pct, Some(0.0));
    drop(live);

    let mut replay = Runner::from_file(&config, true).unwrap();
    replay.config_mut().output_dir = dir.path().join("replay");
    let second = replay.run_agreement().unwrap();
    assert_eq!(server.count(), sent);
    assert_eq!(second.cells, first.cells);
    assert_eq!(second.provenance.cache["sim-llm"].hits as usize, sent);
}
