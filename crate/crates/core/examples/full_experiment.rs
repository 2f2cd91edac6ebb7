//! End-to-end run of the bundled preset with a shorter acquisition: Monte
//! Carlo scan, tag files, re-analysis from the tags.
//!
//! Usage: cargo run --release --example full_experiment [out_dir]

use std::path::PathBuf;

use homsim::experiment::{cmd_analyze, cmd_simulate, ExperimentConfig};

fn main() -> homsim::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("homsim_full_experiment"));
    let mut cfg = ExperimentConfig::preset("paper_fig4a")?;
    cfg.acquisition.duration_s = 20.0;
    let run = cmd_simulate(&cfg, &out)?;
    print!("{}", run.summary);

    let again = cmd_analyze(&out.join("tags").join("manifest.csv"), 1554.2, None)?;
    assert_eq!(again.fit, run.fit);
    println!(
        "\nre-analysis of {} matches; outputs in {}",
        out.join("tags").display(),
        out.display()
    );
    Ok(())
}
