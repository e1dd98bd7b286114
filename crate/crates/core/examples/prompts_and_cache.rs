//! Renders the bundled prompts for one paragraph, then shows how responses
//! are keyed, cached on disk and cleaned.
//!
//!     cargo run --example prompts_and_cache

use llmprep::classic::{Op, Task};
use llmprep::llmproc::{cache_key, clean_response, verify_cache, Cache, CacheEntry, Templates};
use llmprep::Language;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let paragraph = "I am not happy with the new update";
    for lang in [Language::English, Language::Italian] {
        let templates = Templates::builtin(lang, Task::Sentiment, None)?;
        for op in [Op::Stopwords, Op::Lemma, Op::Stem] {
            println!("--- {op} prompt ({}) ---\n{}\n", lang.code(), templates.get(op).render(paragraph));
        }
    }

    let dir = std::env::temp_dir().join(format!("llmprep-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("cache.jsonl");
    let prompt = Templates::builtin(Language::English, Task::Sentiment, None)?.get(Op::Stopwords).render(paragraph);
    let raw = "Here is the text without stopwords:\n\"not happy new update\"";
    {
        let cache = Cache::open(&path)?;
        cache.insert(CacheEntry::new("some-model", 0.7, &prompt, 0, raw))?;
    }
    let cache = Cache::open(&path)?;
    println!("key: {}", cache_key("some-model", 0.7, &prompt, 0));
    println!("cached raw: {:?}", cache.lookup("some-model", 0.7, &prompt, 0));
    println!("cleaned: {:?}", clean_response(raw));
    println!("verify: {}", serde_json::to_string(&verify_cache(&path)?)?);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
