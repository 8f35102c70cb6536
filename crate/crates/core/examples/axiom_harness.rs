// Property tests of the catalogue operators, and of a deliberately broken
// operator that the harness must reject.

use bermudan_snell::axioms::KNOWN_AT_S;
use bermudan_snell::{
    check_axioms, entropic_utility, g_driver_evaluation, linear_expectation, robust_expectation,
    square_of_mean, Ambiguity, AxiomOptions, AxiomReport, Driver, Result,
};

pub struct Harness {
    pub catalogue: Vec<AxiomReport>,
    pub broken: AxiomReport,
}

pub fn run_example() -> Result<Harness> {
    let opts = AxiomOptions::new(50, 5);
    let ops = [
        linear_expectation(),
        g_driver_evaluation(Driver::Discount { rate: 0.1 }, 1.0)?,
        entropic_utility(1.0)?,
        robust_expectation(Ambiguity::Tilted {
            tilt: 1.0,
            penalty: 0.2,
        })?,
    ];
    let catalogue = ops
        .iter()
        .map(|op| check_axioms(op, &opts))
        .collect::<Result<Vec<_>>>()?;
    let broken = check_axioms(&square_of_mean(), &AxiomOptions::new(10, 5))?;
    Ok(Harness { catalogue, broken })
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let h = run_example()?;
    for r in h.catalogue.iter().chain(std::iter::once(&h.broken)) {
        println!(
            "{} ({})",
            r.operator,
            if r.passed() { "pass" } else { "FAIL" }
        );
        for p in &r.properties {
            let tag = if p.required { "" } else { " [informational]" };
            println!("  {:<32} {:?}{tag}", p.property, p.report.status);
        }
    }
    if let Some(w) = h.broken.witness(KNOWN_AT_S) {
        println!("witness: {} (got {}, expected {})", w.detail, w.lhs, w.rhs);
    }
    Ok(())
}
