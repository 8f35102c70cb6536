// One-period binary tree with exercise dates 0 and 1.
//
// With ξ_0 = 1 and ξ_1 = (0, 4) under the linear expectation, waiting is
// worth E[ξ_1] = 2 > 1, so U(θ_0) = 2 and the hitting time is θ_1. Raising
// ξ_0 to 3 makes immediate exercise optimal.

use bermudan_snell::{
    build_tree, hitting_time, linear_expectation, payoff_family, snell_backward, AdaptedProcess,
    BermudanGrid, Result, TreeSpec, EQ_TOL,
};

pub struct RunningExample {
    pub value_at_0: Vec<f64>,
    pub hitting_stages: Vec<usize>,
    pub value_at_0_early: Vec<f64>,
    pub hitting_stages_early: Vec<usize>,
}

fn solve(xi0: f64) -> Result<(Vec<f64>, Vec<usize>)> {
    let tree = build_tree(&TreeSpec::Uniform {
        depth: 1,
        probs: vec![0.5, 0.5],
    })?;
    let grid = BermudanGrid::deterministic(&tree, &[0, 1])?;
    // node values: root, then the two leaves
    let process = AdaptedProcess::from_node_values(&tree, vec![xi0, 0.0, 4.0])?;
    let xi = payoff_family(&tree, &process, &grid);
    let op = linear_expectation();
    let u = snell_backward(&tree, &grid, &xi, &op)?;
    let nu = hitting_time(&tree, &grid, 0, &u, &xi, EQ_TOL)?;
    Ok((u.at(0).values().to_vec(), nu.stages().to_vec()))
}

pub fn run_example() -> Result<RunningExample> {
    let (value_at_0, hitting_stages) = solve(1.0)?;
    let (value_at_0_early, hitting_stages_early) = solve(3.0)?;
    Ok(RunningExample {
        value_at_0,
        hitting_stages,
        value_at_0_early,
        hitting_stages_early,
    })
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let r = run_example()?;
    println!(
        "ξ_0 = 1: U(θ_0) = {:?}, ν_0 stages = {:?}",
        r.value_at_0, r.hitting_stages
    );
    println!(
        "ξ_0 = 3: U(θ_0) = {:?}, ν_0 stages = {:?}",
        r.value_at_0_early, r.hitting_stages_early
    );
    Ok(())
}
