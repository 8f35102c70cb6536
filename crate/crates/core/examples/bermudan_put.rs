// A Bermudan put on a four-period binomial lattice, exercisable at stages
// 0, 2, 3 and 4, priced under four evaluations.

use bermudan_snell::config::{OptionStyle, PayoffSpec};
use bermudan_snell::{
    build_tree, entropic_utility, g_driver_evaluation, hitting_time, linear_expectation,
    payoff_family, robust_expectation, snell_backward, Ambiguity, BermudanGrid, Driver, Evaluation,
    Result, TreeSpec, EQ_TOL,
};

pub struct PutPrice {
    pub operator: String,
    pub price: f64,
    /// Stage of the optimal exercise per scenario.
    pub exercise: Vec<usize>,
}

pub fn run_example() -> Result<Vec<PutPrice>> {
    let tree = build_tree(&TreeSpec::Uniform {
        depth: 4,
        probs: vec![0.5, 0.5],
    })?;
    let grid = BermudanGrid::deterministic(&tree, &[0, 2, 3, 4])?;
    let put = PayoffSpec::Lattice {
        spot: 100.0,
        factors: vec![1.1, 0.9],
        strike: 100.0,
        style: OptionStyle::Put,
    }
    .build(&tree)?;
    let xi = payoff_family(&tree, &put, &grid);

    let ops: Vec<Evaluation> = vec![
        linear_expectation(),
        g_driver_evaluation(Driver::Discount { rate: 0.02 }, 1.0)?,
        entropic_utility(0.5)?,
        robust_expectation(Ambiguity::Tilted {
            tilt: 0.8,
            penalty: 0.5,
        })?,
    ];
    let mut out = Vec::new();
    for op in &ops {
        let u = snell_backward(&tree, &grid, &xi, op)?;
        let nu = hitting_time(&tree, &grid, 0, &u, &xi, EQ_TOL)?;
        out.push(PutPrice {
            operator: op.name().to_string(),
            price: u.at(0)[0],
            exercise: nu.stages().to_vec(),
        });
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    for p in run_example()? {
        println!(
            "{:<32} {:>10.6}  exercise {:?}",
            p.operator, p.price, p.exercise
        );
    }
    Ok(())
}
