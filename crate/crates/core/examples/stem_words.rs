//! Stems words with every algorithm available for a language.
//!
//!     cargo run --example stem_words -- en running generously happiness
//!     cargo run --example stem_words -- it mangiavano

use llmprep::{Language, Stemmer};

fn main() {
    let mut args = std::env::args().skip(1);
    let lang: Language = match args.next().map(|c| c.parse()) {
        None => Language::English,
        Some(Ok(l)) => l,
        Some(Err(_)) => {
            eprintln!("usage: stem_words <lang> <word>...");
            std::process::exit(1);
        }
    };
    let mut words: Vec<String> = args.collect();
    if words.is_empty() {
        words = ["running", "generously", "happiness", "organization"].map(String::from).to_vec();
    }
    let stemmers = Stemmer::available_for(lang);
    print!("{:<16}", "word");
    for s in &stemmers {
        print!("{:<16}", s.label());
    }
    println!();
    for w in &words {
        print!("{w:<16}");
        for s in &stemmers {
            print!("{:<16}", s.stem(w));
        }
        println!();
    }
}
