use std::path::{Path, PathBuf};

use llmprep::cli::{run, EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME};

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("llmprep").chain(args.iter().copied()), &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn fixture_config() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/experiment.toml").display().to_string()
}

fn fixture_cache() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/llm_cache.jsonl").display().to_string()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn usage_errors_exit_1() {
    let o = cli(&[]);
    assert_eq!(o.code, EXIT_CONFIG);
    assert!(o.stderr.contains("Usage"));
    assert_eq!(cli(&["--frobnicate", "agree"]).code, EXIT_CONFIG);
    assert_eq!(cli(&["explode"]).code, EXIT_CONFIG);
    assert_eq!(cli(&["--seed", "minus-one", "agree"]).code, EXIT_CONFIG);
    let o = cli(&["agree"]);
    assert_eq!(o.code, EXIT_CONFIG);
    assert!(o.stderr.contains("--config"), "{}", o.stderr);
}

#[test]
fn help_and_version_exit_0() {
    let o = cli(&["--help"]);
    assert_eq!(o.code, EXIT_OK);
    for sub in ["preprocess", "agree", "classify", "tune", "cache", "report"] {
        assert!(o.stdout.contains(sub), "{sub}");
    }
    for flag in ["--config", "--replay", "--endpoint", "--model", "--temperature", "--seed", "--out", "--generations"] {
        assert!(o.stdout.contains(flag), "{flag}");
    }
    assert_eq!(cli(&["--version"]).code, EXIT_OK);
}

#[test]
fn preprocess_classic_and_echo() {
    let o = cli(&["preprocess", "--op", "stem", "--algo", "porter", "programs run"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(o.stdout, "program run\n");
    let o = cli(&["preprocess", "--combo", "SW+L", "The cats were running"]);
    assert_eq!(o.stdout, "cat run\n");
    let o = cli(&["preprocess", "--backend", "echo", "--op", "sw,lemma", "The cats were running"]);
    assert_eq!(o.stdout, "cat run\n");
    let o = cli(&["preprocess", "--op", "sw", "--task", "sentiment", "this is not good"]);
    assert!(o.stdout.contains("not good"), "{}", o.stdout);
    let o = cli(&["preprocess", "--op", "stem", "--algo", "lancaster", "--lang", "it", "ciao"]);
    assert_eq!(o.code, EXIT_CONFIG);
}

#[test]
fn preprocess_llm_needs_model_and_endpoint() {
    assert_eq!(cli(&["preprocess", "--backend", "llm", "--op", "sw", "x"]).code, EXIT_CONFIG);
    assert_eq!(cli(&["--model", "m", "preprocess", "--backend", "llm", "--op", "sw", "x"]).code, EXIT_CONFIG);
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c.jsonl");
    let o = cli(&["--replay", "--model", "m", "preprocess", "--backend", "llm", "--cache", p(&cache), "--op", "sw", "x"]);
    assert_eq!(o.code, EXIT_RUNTIME, "{}", o.stderr);
}

#[test]
fn agree_replay_writes_reports_and_run_record() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["--config", &fixture_config(), "--replay", "--out", p(dir.path()), "agree"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    for f in ["agreement.md", "agreement.csv", "agreement.json", "run.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    assert_eq!(o.stdout.lines().count(), 3);
    let record: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.json")).unwrap()).unwrap();
    assert_eq!(record["command"], "agree");
    assert_eq!(record["replay"], true);
    assert_eq!(record["files"][0], "agreement.md");
    let hash = record["config_hash"].as_str().unwrap().to_string();

    let other = tempfile::tempdir().unwrap();
    let o = cli(&["--config", &fixture_config(), "--replay", "--seed", "8", "--out", p(other.path()), "tune"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let record: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(other.path().join("run.json")).unwrap()).unwrap();
    assert_ne!(record["config_hash"].as_str().unwrap(), hash);
    assert!(other.path().join("tuning.json").exists());
}

#[test]
fn replay_miss_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["--config", &fixture_config(), "--replay", "--generations", "2", "--out", p(dir.path()), "agree"]);
    assert_eq!(o.code, EXIT_RUNTIME);
    assert!(o.stderr.contains("missing from the cache"), "{}", o.stderr);
    let o = cli(&["--config", &fixture_config(), "--replay", "--model", "other", "--out", p(dir.path()), "agree"]);
    assert_eq!(o.code, EXIT_RUNTIME);
}

#[test]
fn bad_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.toml");
    std::fs::write(&path, "version = 1\ndatasets = []\nbackends = []\n").unwrap();
    let o = cli(&["--config", p(&path), "agree"]);
    assert_eq!(o.code, EXIT_CONFIG);
    assert!(o.stderr.contains("at least one dataset"), "{}", o.stderr);
    assert_eq!(cli(&["--config", p(&dir.path().join("missing.toml")), "agree"]).code, EXIT_CONFIG);
    let o = cli(&["--config", &fixture_config(), "--temperature", "-1", "--replay", "agree"]);
    assert_eq!(o.code, EXIT_CONFIG, "{}", o.stderr);
}

#[test]
fn cache_stats_and_verify() {
    let o = cli(&["cache", "stats", &fixture_cache()]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let stats: serde_json::Value = serde_json::from_str(o.stdout.trim()).unwrap();
    let lines = std::fs::read_to_string(fixture_cache()).unwrap().lines().count();
    assert_eq!(stats["entries"], lines);
    assert_eq!(stats["models"][0], "sim-llm-1");
    let o = cli(&["--config", &fixture_config(), "cache", "verify"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert!(o.stdout.contains(": ok ("));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    let mut body = std::fs::read_to_string(fixture_cache()).unwrap();
    body.insert_str(0, "not json\n");
    std::fs::write(&bad, body).unwrap();
    let o = cli(&["cache", "verify", p(&bad)]);
    assert_eq!(o.code, EXIT_RUNTIME);
    assert!(o.stdout.contains("damaged"));
    assert_eq!(cli(&["cache", "stats"]).code, EXIT_CONFIG);
}

#[test]
fn report_rerenders_from_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["--config", &fixture_config(), "--replay", "--out", p(dir.path()), "classify"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let md = std::fs::read(dir.path().join("classification.md")).unwrap();
    std::fs::remove_file(dir.path().join("classification.md")).unwrap();
    let o = cli(&["--out", p(dir.path()), "report"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(std::fs::read(dir.path().join("classification.md")).unwrap(), md);
    assert!(o.stdout.contains("tuning.md"));
    let empty = tempfile::tempdir().unwrap();
    assert_eq!(cli(&["--out", p(empty.path()), "report"]).code, EXIT_CONFIG);
    assert_eq!(cli(&["report"]).code, EXIT_CONFIG);
}
