// Loads an experiment config, runs `verify` and exports the CSV tables.

use std::path::{Path, PathBuf};

use bermudan_snell::runner::{export_tables, TableFormat};
use bermudan_snell::{run, Command, ExperimentConfig, Result, RunReport};

pub fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

/// Runs `configs/put_lattice.json` and writes its tables into `out`.
pub fn run_example_in(out: &Path) -> Result<(RunReport, Vec<PathBuf>)> {
    let cfg = ExperimentConfig::load(config_path("put_lattice.json"))?;
    let report = run(&cfg, Command::Verify)?;
    let files = export_tables(&report, out, TableFormat::Csv)?;
    Ok((report, files))
}

pub fn run_example() -> Result<(RunReport, Vec<PathBuf>)> {
    let out = std::env::temp_dir().join("bermudan_config_run");
    run_example_in(&out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let (report, files) = run_example()?;
    for op in &report.body.operators {
        let price = op
            .envelope
            .iter()
            .find(|r| r.grid_index == 0)
            .map(|r| r.value);
        println!(
            "{:<32} U(θ_0) = {:?}  passed: {}",
            op.operator,
            price,
            op.passed()
        );
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
