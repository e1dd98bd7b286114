//! Runs every classic preprocessing combo over one sentence.
//!
//!     cargo run --example classic_pipeline -- "The children weren't running to the stores"

use llmprep::classic::{Classic, Combo, Task};
use llmprep::{Language, Stemmer};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = std::env::args().nth(1).unwrap_or_else(|| "The children weren't running to the stores, not today!".into());
    let classic = Classic::load(Language::English, Task::Sentiment)?;
    println!("input: {text}");
    for combo in Combo::ALL {
        let ops: Vec<String> = combo.ops().iter().map(ToString::to_string).collect();
        let stemmers = if combo.uses_stemmer() { Stemmer::available_for(Language::English) } else { vec![Stemmer::Porter] };
        for s in stemmers {
            let label = if combo.uses_stemmer() { format!("{combo} ({s})") } else { combo.to_string() };
            println!("{label:<20} [{}] {}", ops.join(" -> "), classic.preprocess(&text, combo, s).render());
        }
    }
    Ok(())
}
