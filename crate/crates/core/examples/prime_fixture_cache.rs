//! Rebuilds the fixture pack's derived files: the primed LLM cache and the
//! classic preprocessing outputs.
//!
//! A small in-process chat server plays the LLM. It recognises which
//! bundled prompt it was sent, then perturbs the classic answer
//! deterministically (missed and extra stopword removals, skipped lemmas,
//! a different stemmer now and then, chatty wrappers), so replayed
//! agreement numbers are neither trivially 100 nor noise.
//!
//!     cargo run --example prime_fixture_cache

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};

use llmprep::classic::{Classic, Combo, Op, Task};
use llmprep::corpus::{load_corpus, Format};
use llmprep::llmproc::{CacheEntry, PromptTemplate};
use llmprep::runner::Runner;
use llmprep::tokenize::{tokenize, TokenKind};
use llmprep::{Language, Stemmer};

const FIXED_TIMESTAMP: u64 = 1_735_689_600;

struct Sim {
    /// (op, prompt language, text before the paragraph, text after it)
    templates: Vec<(Op, Language, String, String)>,
    classic: HashMap<Language, Classic>,
}

fn fnv(parts: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for p in parts {
        for b in p.bytes().chain([0xff]) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

impl Sim {
    fn new() -> Self {
        let langs = [Language::English, Language::Italian];
        let mut templates = Vec::new();
        for prompt_lang in langs {
            for op in [Op::Stopwords, Op::Lemma, Op::Stem] {
                let t = PromptTemplate::builtin(op, prompt_lang, Task::Sentiment, None).expect("bundled template");
                let marked = t.render("\u{1}");
                let (pre, post) = marked.split_once('\u{1}').expect("one slot");
                templates.push((op, prompt_lang, pre.to_string(), post.to_string()));
            }
        }
        let classic = langs.into_iter().map(|l| (l, Classic::load(l, Task::Sentiment).expect("word lists"))).collect();
        Sim { templates, classic }
    }

    fn text_language(&self, paragraph: &str) -> Language {
        let toks = tokenize(paragraph);
        let score = |l: Language| toks.iter().filter(|t| self.classic[&l].stopwords.words.contains(&t.norm)).count();
        if score(Language::Italian) > score(Language::English) {
            Language::Italian
        } else {
            Language::English
        }
    }

    fn respond(&self, prompt: &str) -> String {
        let Some((op, prompt_lang, paragraph)) = self.templates.iter().find_map(|(op, l, pre, post)| {
            prompt.strip_prefix(pre.as_str()).and_then(|r| r.strip_suffix(post.as_str())).map(|p| (*op, *l, p))
        }) else {
            return "I am not sure what you mean.".into();
        };
        let lang = self.text_language(paragraph);
        let classic = &self.classic[&lang];
        let salt = prompt_lang.code();
        let stemmers = Stemmer::available_for(lang);
        let mut out = Vec::new();
        for t in &tokenize(paragraph) {
            let h = fnv(&[salt, op.label(), &t.norm]);
            let word = t.kind == TokenKind::Word;
            match op {
                Op::Stopwords => {
                    let stop = classic.stopwords.contains(&t.norm);
                    let drop = (stop && h % 8 != 0) || (word && !stop && h % 13 == 0);
                    if !drop {
                        out.push(t.surface.clone());
                    }
                }
                Op::Lemma if word && h % 7 != 0 => out.push(classic.lemmas.lemma(&t.norm)),
                Op::Stem if word && t.norm.chars().all(char::is_alphabetic) && h % 9 != 0 => {
                    let algo = if h % 5 == 0 { stemmers[0] } else { *stemmers.last().expect("a stemmer") };
                    out.push(algo.stem(&t.norm));
                }
                _ => out.push(t.surface.clone()),
            }
        }
        let body = out.join(" ");
        match fnv(&[salt, op.label(), paragraph]) % 5 {
            0 => format!("Here is the processed text:\n{body}"),
            1 => format!("\"{body}\""),
            2 => format!("```\n{body}\n```"),
            _ => body,
        }
    }
}

fn handle(mut stream: TcpStream, sim: &Sim) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut length = 0usize;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 {
            return Ok(());
        }
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some((k, v)) = line.split_once(':') {
            if k.eq_ignore_ascii_case("content-length") {
                length = v.trim().parse().unwrap_or(0);
            }
        }
    }
    let mut body = vec![0; length];
    reader.read_exact(&mut body)?;
    let request: serde_json::Value = serde_json::from_slice(&body).unwrap_or_default();
    let prompt = request["messages"][0]["content"].as_str().unwrap_or_default();
    let reply = serde_json::json!({ "choices": [{ "message": { "role": "assistant", "content": sim.respond(prompt) } }] }).to_string();
    write!(
        stream,
        "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
        reply.len()
    )?;
    stream.flush()
}

fn serve(sim: &'static Sim) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind local port");
    let addr = listener.local_addr().expect("local address");
    std::thread::spawn(move || {
        for stream in listener.incoming().flatten() {
            std::thread::spawn(move || {
                let _ = handle(stream, sim);
            });
        }
    });
    format!("http://{addr}/v1/chat/completions")
}

/// Rewrites the cache sorted by key with a fixed timestamp, so the file
/// only changes when its content does.
fn normalize_cache(path: &Path) {
    let raw = std::fs::read_to_string(path).expect("read cache");
    let mut entries: Vec<CacheEntry> = raw.lines().map(|l| serde_json::from_str(l).expect("cache line")).collect();
    entries.sort_by(|a, b| a.key.cmp(&b.key));
    entries.dedup_by(|a, b| a.key == b.key);
    let mut out = String::new();
    for mut e in entries {
        e.timestamp = FIXED_TIMESTAMP;
        out.push_str(&serde_json::to_string(&e).expect("entry serializes"));
        out.push('\n');
    }
    std::fs::write(path, out).expect("write cache");
    println!("{}: {} entries", path.display(), raw.lines().count());
}

fn write_classic_outputs(fixtures: &Path) {
    for (name, file, lang) in [("en-tweets", "en_tweets.jsonl", Language::English), ("it-tweets", "it_tweets.jsonl", Language::Italian)] {
        let corpus = load_corpus(&fixtures.join(file), Format::Jsonl, lang.code(), &Default::default()).expect("fixture corpus");
        let classic = Classic::load(lang, Task::Sentiment).expect("word lists");
        let dir = fixtures.join("classic").join(name);
        std::fs::create_dir_all(&dir).expect("classic output dir");
        for combo in Combo::ALL {
            let stemmers = if combo.uses_stemmer() { Stemmer::available_for(lang) } else { vec![Stemmer::available_for(lang)[0]] };
            for s in stemmers {
                let file = if combo.uses_stemmer() {
                    format!("{}-{}.jsonl", combo.slug(), s.label().to_lowercase())
                } else {
                    format!("{}.jsonl", combo.slug())
                };
                let mut out = String::new();
                for d in &corpus.docs {
                    let text = classic.preprocess(&d.text, combo, s).render();
                    out.push_str(&serde_json::json!({ "id": d.id, "text": text }).to_string());
                    out.push('\n');
                }
                std::fs::write(dir.join(&file), out).expect("write classic output");
            }
        }
    }
}

fn main() {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let sim: &'static Sim = Box::leak(Box::new(Sim::new()));
    let endpoint = serve(sim);

    let mut runner = Runner::from_file(&fixtures.join("experiment.toml"), false).expect("fixture config");
    let cache = runner.cache_paths().remove(0);
    let _ = std::fs::remove_file(&cache);
    let scratch = std::env::temp_dir().join(format!("llmprep-prime-{}", std::process::id()));
    let config = runner.config_mut();
    config.output_dir = scratch.clone();
    for b in &mut config.backends {
        b.llm.endpoint = endpoint.clone();
    }
    runner.run_agreement().expect("agreement run");
    runner.run_classification().expect("classification run");
    drop(runner);

    normalize_cache(&cache);
    write_classic_outputs(&fixtures);
    let _ = std::fs::remove_dir_all(&scratch);
    println!("classic outputs written under {}", fixtures.join("classic").display());
}
