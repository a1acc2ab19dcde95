//! Load a TOML configuration and run its experiment, as `nse mc` does.
//!
//! ```text
//! cargo run --release --example config_pipeline [CONFIG]
//! ```

use std::path::PathBuf;

use nse::config::Config;
use nse::io::results_csv;
use nse::mc::run_experiment;

fn main() -> nse::Result<()> {
    run(std::env::args().nth(1))
}

pub fn run(path: Option<String>) -> nse::Result<()> {
    let path = path
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/quick.toml"));
    let cfg = Config::from_file(&path)?;
    let mut exp = cfg.experiment(None)?;
    exp.replicates = exp.replicates.min(20);
    println!("{}: scales {:?}, {} replicates, seed {}", path.display(), exp.scales, exp.replicates, exp.seed);
    for &j in &exp.scales {
        println!("  j = {j}: setup {}", exp.scenario.label_for(j)?);
    }

    let out = run_experiment(&exp)?;
    for d in &out.summary {
        println!("  j = {}: mean {:.4e}, bias {:+.2e}, rel_mse {:.4}", d.j, d.mean, d.bias, d.rel_mse);
    }
    let csv = results_csv(&out.rows);
    println!("\nfirst result rows:");
    for line in csv.lines().take(4) {
        println!("  {line}");
    }
    Ok(())
}
