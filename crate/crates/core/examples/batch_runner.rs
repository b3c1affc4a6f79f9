//! Runs a TOML experiment file and prints the check results.
//!
//! `cargo run --example batch_runner -- path/to/config.toml`; defaults to
//! `examples/configs/quick.toml`. Artifacts go next to the config.

use std::path::{Path, PathBuf};

use patternlab::cli::{run_batch, ExperimentConfig};

fn main() -> patternlab::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs/quick.toml"));
    let cfg = ExperimentConfig::load(&path)?;
    let out = std::env::temp_dir().join("patternlab-batch");
    let summary = run_batch(&cfg, &out, true)?;
    for job in &summary.jobs {
        println!("{:<24} {:<22} {}", job.name, job.kind, job.status);
        for c in &job.checks {
            println!("    {} {} = {}", if c.pass { "ok  " } else { "FAIL" }, c.name, c.value);
        }
    }
    println!("{} passed, {} failed; artifacts in {}", summary.passed, summary.failed, out.display());
    std::process::exit(summary.exit_code);
}
