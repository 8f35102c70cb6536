// Brute force versus backward induction on a random instance, followed by
// the full battery of structural checks.

use bermudan_snell::config::Check;
use bermudan_snell::corpus::{CorpusBounds, Instance};
use bermudan_snell::runner::{verify_instance, InstanceOptions};
use bermudan_snell::{entropic_utility, payoff_family, CheckReport, Result, Solved, VerifyOptions};

pub struct OracleCheck {
    pub strategies: usize,
    /// `max_k |U(θ_k) − V(θ_k)|`.
    pub gap: f64,
    pub reports: Vec<CheckReport>,
}

pub fn run_example() -> Result<OracleCheck> {
    let inst = Instance::generate(28, &CorpusBounds::default())?;
    let payoff = payoff_family(&inst.tree, &inst.payoff, &inst.grid);
    let op = entropic_utility(1.0)?;
    let opts = VerifyOptions::default();

    let solved = Solved::new(&inst.tree, &inst.grid, &payoff, &op, opts)?;
    let gap = solved.envelope.max_abs_diff(&solved.value);

    let reports = verify_instance(
        &inst.tree,
        &inst.grid,
        &payoff,
        &op,
        &Check::DEFAULT,
        InstanceOptions {
            verify: opts,
            seed: 1,
            majorants: 50,
            admissibility_pairs: 20,
        },
    )?;
    Ok(OracleCheck {
        strategies: solved.all.len(),
        gap,
        reports,
    })
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let r = run_example()?;
    println!("|Θ| = {}, max |U − V| = {:e}", r.strategies, r.gap);
    for c in &r.reports {
        println!(
            "{:<24} {:?}  worst {:e}  cases {}",
            c.check, c.status, c.worst, c.cases
        );
    }
    Ok(())
}
