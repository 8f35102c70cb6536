// Sweeps random instances for one operator and tallies passes per check.

use bermudan_snell::config::Check;
use bermudan_snell::corpus::CorpusBounds;
use bermudan_snell::runner::{sweep_operator, InstanceOptions, SweepSummary};
use bermudan_snell::{robust_expectation, Ambiguity, Result, VerifyOptions};

pub fn run_example() -> Result<SweepSummary> {
    let op = robust_expectation(Ambiguity::Tilted {
        tilt: 1.0,
        penalty: 0.2,
    })?;
    sweep_operator(
        &op,
        &CorpusBounds::default(),
        0,
        40,
        &Check::DEFAULT,
        InstanceOptions {
            verify: VerifyOptions::default(),
            seed: 2024,
            majorants: 20,
            admissibility_pairs: 10,
        },
    )
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let s = run_example()?;
    println!(
        "{}: {}/{} instances passed",
        s.operator, s.passed, s.instances
    );
    for (check, n) in &s.per_check {
        println!("  {check:<24} {n}");
    }
    Ok(())
}
