mod common;

use std::sync::Arc;

use common::server::{chat_body, echo_server, serve};
use llmprep::classic::{Classic, Combo, Op, Task};
use llmprep::corpus::{Document, Split};
use llmprep::llmproc::{
    cache_key, clean_response, postprocess, verify_cache, Backend, Cache, CacheEntry, LlmClient, LlmConfig, LlmError,
    PreprocessSpec, Preprocessor, PromptTemplate, Templates,
};
use llmprep::{Language, Stemmer};
use proptest::prelude::*;

const STOPWORD_PROMPT: &str = "You specialize in removing stopwords from text. Stopwords are words that are not relevant for processing a text. Stopwords typically include articles, prepositions, pronouns, and auxiliary verbs. For example, the words 'is', 'are', 'being', 'you', 'me', 'the', 'an', 'and', 'I', 'which', 'that', 'have', 'by', 'for' and their alternative forms are usually considered stopwords. Note that whether a word is a stopword or not depends on the context of the text or of an application. In this case, the relevant task is detecting the sentiment of a tweet (positive, negative or neutral). In this task, the word 'not' is often not considered a stopword, and it should be kept in the text. Please provide a version without stopwords of the following paragraph: 'I am happy'. Print only the paragraph without stopwords, do not add any explanation, details or notes.";

const LEMMA_PROMPT: &str = "You specialize in text lemmatization. Text lemmatization is a natural language processing technique that is used to reduce words to their lemma, also known as the dictionary form. The process of lemmatization is used to normalize text and make it easier to process. For example, the verbs 'is', 'are', and 'being' must all be reduced down to the common lemma 'be'. As another example, \"he's going\" must be lemmatized to \"he be go\". Lemmatization depends on correctly identifying the intended part of speech and meaning of a word in a sentence, as well as within the larger context surrounding that sentence, such as neighbouring sentences or even an entire document. Please provide the lemmatized version of this paragraph: 'I am happy'. Print only the lemmatized paragraph, do not add any explanation, details or notes.";

const STEM_PROMPT: &str = "You specialize in text stemming. Text stemming is a natural language processing technique that is used to reduce words to their base form, also known as the root form. The process of stemming is used to normalize text and make it easier to process. For example, the words 'programming,' 'programmer,' and 'programs' can all be reduced down to the common stem 'program'. As another example, the words 'argue', 'argued', 'argument', 'arguing', and 'arguer' all stem to 'argu'. Please provide the stemmed version of this paragraph: 'I am happy'. Print only the stemmed paragraph, do not add any explanation, details or notes.";

fn template(op: Op) -> PromptTemplate {
    PromptTemplate::builtin(op, Language::English, Task::Sentiment, None).unwrap()
}

fn config(endpoint: &str) -> LlmConfig {
    LlmConfig {
        endpoint: endpoint.to_string(),
        model: "test-model".into(),
        backoff_ms: 1,
        max_retries: 3,
        timeout_secs: 10.0,
        ..Default::default()
    }
}

fn doc(id: &str, text: &str) -> Document {
    Document {
        id: id.into(),
        text: text.into(),
        label: "x".into(),
        language: Language::English,
        split: Split::Unassigned,
    }
}

#[test]
fn english_templates_render_verbatim() {
    assert_eq!(template(Op::Stopwords).render("I am happy"), STOPWORD_PROMPT);
    assert_eq!(template(Op::Lemma).render("I am happy"), LEMMA_PROMPT);
    assert_eq!(template(Op::Stem).render("I am happy"), STEM_PROMPT);
}

#[test]
fn topic_task_drops_negation_sentence() {
    let t = PromptTemplate::builtin(Op::Stopwords, Language::English, Task::Topic, None).unwrap();
    let p = t.render("x");
    assert!(!p.contains("'not'"));
    assert!(p.contains("classifying the topic of a news article"));
    let custom = PromptTemplate::builtin(Op::Stopwords, Language::English, Task::Sentiment, Some("rating hotels")).unwrap();
    assert!(custom.render("x").contains("the relevant task is rating hotels."));
}

#[test]
fn render_edge_cases() {
    let t = template(Op::Stem);
    let empty = t.render("");
    assert!(empty.contains("paragraph: ''."));
    let braces = t.render("{paragraph} {x} }{");
    assert!(braces.contains("paragraph: '{paragraph} {x} }{'."));
}

#[test]
fn template_needs_exactly_one_slot() {
    assert!(matches!(
        PromptTemplate::new(Op::Stem, Language::English, "", "no slot"),
        Err(LlmError::Template { found: 0, .. })
    ));
    assert!(PromptTemplate::new(Op::Stem, Language::English, "", "{paragraph}{paragraph}").is_err());
    assert!(PromptTemplate::new(Op::Stem, Language::English, "", "<{paragraph}>").is_ok());
}

#[test]
fn native_templates_exist_for_every_language() {
    for lang in Language::ALL {
        let t = Templates::builtin(lang, Task::Sentiment, None).unwrap();
        for op in [Op::Stopwords, Op::Lemma, Op::Stem] {
            assert!(t.get(op).render("QQQ").contains("QQQ"), "{lang} {op}");
        }
    }
}

#[test]
fn cleaning_examples() {
    assert_eq!(clean_response("```\ncat sat mat\n```"), "cat sat mat");
    assert_eq!(clean_response("cat sat mat"), "cat sat mat");
    assert_eq!(clean_response("Here is the result:\ncat sat"), "cat sat");
    assert_eq!(clean_response("  \"don't stop\"  "), "don't stop");
    assert_eq!(clean_response("```text\n'cat'\n```"), "cat");
    assert_eq!(clean_response("\"a\" and \"b\""), "\"a\" and \"b\"");
}

#[test]
fn empty_response_is_degenerate() {
    assert!(postprocess("``````", "some input").degenerate);
    assert!(postprocess("Here is the result:", "x").degenerate);
    let long = postprocess(&"y".repeat(100), "abc");
    assert!(long.truncated);
    assert_eq!(long.text.len(), 12);
}

#[test]
fn replay_miss_reports_key() {
    let client = LlmClient::new(config(""), Arc::new(Cache::in_memory()), true).unwrap();
    let err = client.complete("p", 0).unwrap_err();
    assert!(err.to_string().contains("cache miss in replay mode"), "{err}");
    assert_eq!(err.missing_keys(), [cache_key("test-model", 0.7, "p", 0)]);
}

#[test]
fn cached_prompt_makes_no_call() {
    let cache = Arc::new(Cache::in_memory());
    cache.insert(CacheEntry::new("test-model", 0.7, "p", 0, "answer")).unwrap();
    let client = LlmClient::new(config("http://127.0.0.1:9/unused"), cache, false).unwrap();
    let c = client.complete("p", 0).unwrap();
    assert_eq!((c.text.as_str(), c.cached), ("answer", true));
    assert_eq!(client.network_calls(), 0);
}

#[test]
fn live_call_is_stored_and_reused() {
    let server = echo_server();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.jsonl");
    let client = LlmClient::new(config(&server.endpoint), Arc::new(Cache::open(&path).unwrap()), false).unwrap();
    let first = client.complete("hello there", 0).unwrap();
    assert_eq!((first.text.as_str(), first.cached), ("hello there", false));
    let second = client.complete("hello there", 0).unwrap();
    assert!(second.cached);
    assert_eq!(server.count(), 1);
    let body = &server.requests.lock().unwrap()[0];
    assert_eq!(body["model"], "test-model");
    assert_eq!(body["temperature"], 0.7);
    assert_eq!(body["messages"][0]["role"], "user");

    let reopened = LlmClient::new(config(""), Arc::new(Cache::open(&path).unwrap()), true).unwrap();
    assert_eq!(reopened.complete("hello there", 0).unwrap().text, "hello there");
    assert!(reopened.complete("hello there", 1).is_err());
    assert!(verify_cache(&path).unwrap().is_ok());
}

#[test]
fn retries_server_errors_and_rate_limits() {
    let server = serve(
        vec![(500, "boom".into()), (429, "slow down".into()), (503, "busy".into())],
        Box::new(|_| (200, chat_body("ok"))),
    );
    let client = LlmClient::new(config(&server.endpoint), Arc::new(Cache::in_memory()), false).unwrap();
    assert_eq!(client.complete("p", 0).unwrap().text, "ok");
    assert_eq!(server.count(), 4);
}

#[test]
fn gives_up_after_bounded_attempts() {
    let server = serve(Vec::new(), Box::new(|_| (502, "bad gateway".into())));
    let client = LlmClient::new(config(&server.endpoint), Arc::new(Cache::in_memory()), false).unwrap();
    let err = client.complete("p", 0).unwrap_err();
    assert!(matches!(err, LlmError::Http { status: 502, .. }), "{err}");
    assert_eq!(server.count(), 4);
}

#[test]
fn client_errors_surface_body_verbatim() {
    let body = r#"{"error":{"message":"model 'x' not found"}}"#;
    let server = serve(vec![(404, body.into())], Box::new(|_| (200, chat_body("unused"))));
    let client = LlmClient::new(config(&server.endpoint), Arc::new(Cache::in_memory()), false).unwrap();
    match client.complete("p", 0).unwrap_err() {
        LlmError::Http { status, body: got } => {
            assert_eq!(status, 404);
            assert_eq!(got, body);
        }
        other => panic!("{other}"),
    }
    assert_eq!(server.count(), 1);
}

#[test]
fn network_failure_is_retried_then_reported() {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    drop(listener);
    let client = LlmClient::new(config(&format!("http://{addr}/v1")), Arc::new(Cache::in_memory()), false).unwrap();
    assert!(matches!(client.complete("p", 0), Err(LlmError::Network { attempts: 4, .. })));
}

#[test]
fn torn_tail_is_ignored_and_repaired() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.jsonl");
    let good = serde_json::to_string(&CacheEntry::new("m", 0.0, "a", 0, "A")).unwrap();
    std::fs::write(&path, format!("{good}\n{{\"key\":\"trunc")).unwrap();
    assert!(verify_cache(&path).unwrap().partial_tail);
    let cache = Cache::open(&path).unwrap();
    assert_eq!(cache.len(), 1);
    cache.insert(CacheEntry::new("m", 0.0, "b", 0, "B")).unwrap();
    drop(cache);
    let report = verify_cache(&path).unwrap();
    assert!(!report.partial_tail);
    assert_eq!(report.entries, 2);
    assert_eq!(report.bad_lines, [2]);
    let reopened = Cache::open(&path).unwrap();
    assert_eq!(reopened.lookup("m", 0.0, "b", 0).as_deref(), Some("B"));
}

#[test]
fn verify_flags_tampered_and_duplicate_lines() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.jsonl");
    let e = CacheEntry::new("m", 0.0, "a", 0, "A");
    let mut tampered = e.clone();
    tampered.prompt = "changed".into();
    let lines = [&e, &e, &tampered].map(|x| serde_json::to_string(x).unwrap()).join("\n");
    std::fs::write(&path, lines + "\n").unwrap();
    let r = verify_cache(&path).unwrap();
    assert_eq!(r.duplicate_keys, [2, 3]);
    assert_eq!(r.key_mismatches, [3]);
    assert!(!r.is_ok());
}

#[test]
fn api_key_read_from_named_variable() {
    let server = echo_server();
    let var = "LLMPREP_TEST_KEY_FOR_AUTH";
    std::env::set_var(var, "sekrit");
    let mut cfg = config(&server.endpoint);
    cfg.api_key_env = var.into();
    let client = LlmClient::new(cfg, Arc::new(Cache::in_memory()), false).unwrap();
    client.complete("p", 0).unwrap();
    assert_eq!(server.auth.lock().unwrap()[0].as_deref(), Some("Bearer sekrit"));
}

#[test]
fn echo_backend_equals_classic() {
    let classic = Classic::load(Language::English, Task::Sentiment).unwrap();
    let templates = Templates::builtin(Language::English, Task::Sentiment, None).unwrap();
    let echo = Preprocessor::new(Backend::Echo, classic.clone(), templates.clone());
    let plain = Preprocessor::new(Backend::Classic, classic, templates);
    let docs = [
        doc("1", "I don't think he's going to the party tonight!"),
        doc("2", "@sam the leaves were falling #autumn https://t.co/x"),
        doc("3", "It is not good, it is not bad."),
    ];
    for combo in Combo::ALL {
        for s in Stemmer::available_for(Language::English) {
            let spec = PreprocessSpec::new(combo.ops(), s);
            for d in &docs {
                let a = echo.preprocess(d, &spec).unwrap();
                let b = plain.preprocess(d, &spec).unwrap();
                assert_eq!(a.tokens.norms(), b.tokens.norms(), "{combo} {s} {}", d.id);
            }
        }
    }
}

#[test]
fn llm_chain_sends_one_prompt_per_operation() {
    let server = serve(Vec::new(), Box::new(|p| {
        let text = p.split("paragraph: '").nth(1).and_then(|r| r.rsplit_once("'.")).map(|(t, _)| t).unwrap_or("");
        (200, chat_body(&format!("```\n{}\n```", text.to_uppercase())))
    }));
    let client = LlmClient::new(config(&server.endpoint), Arc::new(Cache::in_memory()), false).unwrap();
    let p = Preprocessor::new(
        Backend::Llm(Arc::new(client)),
        Classic::load(Language::English, Task::Sentiment).unwrap(),
        Templates::builtin(Language::English, Task::Sentiment, None).unwrap(),
    );
    let out = p.preprocess(&doc("d", "cats are running"), &PreprocessSpec::new(&[Op::Lemma, Op::Stopwords], Stemmer::Porter)).unwrap();
    assert_eq!(out.text, "CATS ARE RUNNING");
    assert_eq!((out.cache_misses, out.cache_hits), (2, 0));
    let reqs = server.requests.lock().unwrap();
    assert!(reqs[0]["messages"][0]["content"].as_str().unwrap().starts_with("You specialize in text lemmatization"));
    assert!(reqs[1]["messages"][0]["content"].as_str().unwrap().contains("paragraph: 'CATS ARE RUNNING'"));
}

#[test]
fn degenerate_step_keeps_its_input() {
    let server = serve(Vec::new(), Box::new(|_| (200, chat_body("  "))));
    let client = LlmClient::new(config(&server.endpoint), Arc::new(Cache::in_memory()), false).unwrap();
    let p = Preprocessor::new(
        Backend::Llm(Arc::new(client)),
        Classic::load(Language::English, Task::Sentiment).unwrap(),
        Templates::builtin(Language::English, Task::Sentiment, None).unwrap(),
    );
    let out = p.preprocess(&doc("d", "keep me"), &PreprocessSpec::new(&[Op::Stem], Stemmer::Porter)).unwrap();
    assert_eq!(out.text, "keep me");
    assert_eq!(out.degenerate, 1);
}

proptest! {
    #[test]
    fn cache_keys_separate_fields(a in "[ab]{0,4}", b in "[ab]{0,4}", c in "[ab]{0,4}", d in "[ab]{0,4}", g in 0u32..3, h in 0u32..3) {
        // moving bytes between model and prompt must change the key
        let k1 = cache_key(&a, 0.7, &b, g);
        let k2 = cache_key(&c, 0.7, &d, h);
        prop_assert_eq!(k1 == k2, a == c && b == d && g == h);
    }

    #[test]
    fn cache_keys_separate_temperatures(t1 in 0.0f64..2.0, t2 in 0.0f64..2.0) {
        prop_assert_eq!(cache_key("m", t1, "p", 0) == cache_key("m", t2, "p", 0), t1.to_bits() == t2.to_bits());
    }

    #[test]
    fn cleaning_is_idempotent(s in "[a-z \n\"'`:]{0,30}|Here is [a-z ]{0,10}:\n[a-z\"` ]{0,20}") {
        let once = clean_response(&s);
        prop_assert_eq!(clean_response(&once), once.clone());
    }
}
