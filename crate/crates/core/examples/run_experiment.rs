//! Replays the bundled fixture experiment from its primed cache and writes
//! the agreement, tuning and classification reports.
//!
//!     cargo run --example run_experiment -- /tmp/llmprep-out

use std::path::PathBuf;

use llmprep::runner::report::{write_agreement, write_classification, write_tuning};
use llmprep::runner::Runner;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("llmprep-fixture-run"));
    let config = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/experiment.toml");
    let mut runner = Runner::from_file(&config, true)?;
    runner.config_mut().output_dir = out.clone();
    println!("config sha256 {}", runner.config().hash());

    let agreement = runner.run_agreement()?;
    let classification = runner.run_classification()?;
    let mut files = write_agreement(&agreement, &out)?;
    files.extend(write_tuning(&classification.tuning, &out)?);
    files.extend(write_classification(&classification, &out)?);
    for f in files {
        println!("{}", f.display());
    }
    println!("\n{}", std::fs::read_to_string(out.join("agreement.md"))?);
    Ok(())
}
