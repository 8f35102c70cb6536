// The operator catalogue on a one-period binary tree, plus a ρ-martingale.

use bermudan_snell::{
    build_tree, entropic_utility, g_driver_evaluation, linear_expectation, make_rho_martingale,
    robust_expectation, Ambiguity, BermudanGrid, Candidate, Driver, Evaluation, RandomVariable,
    Result, StoppingTime, TreeSpec,
};
use std::collections::BTreeMap;

pub struct OperatorValues {
    pub linear: f64,
    pub discount: f64,
    pub entropic: f64,
    pub robust: f64,
    pub martingale: Vec<Vec<f64>>,
}

fn root(op: &Evaluation, probs: Vec<f64>, eta: Vec<f64>) -> Result<f64> {
    let tree = build_tree(&TreeSpec::Uniform { depth: 1, probs })?;
    let s = StoppingTime::constant(&tree, 0)?;
    let tau = StoppingTime::constant(&tree, 1)?;
    Ok(op.evaluate(&tree, &s, &tau, &RandomVariable::new(eta))?[0])
}

pub fn run_example() -> Result<OperatorValues> {
    let half = vec![0.5, 0.5];
    let linear = root(&linear_expectation(), half.clone(), vec![2.0, 4.0])?;
    let discount = root(
        &g_driver_evaluation(Driver::Discount { rate: 0.1 }, 1.0)?,
        half.clone(),
        vec![2.0, 4.0],
    )?;
    let entropic = root(&entropic_utility(1.0)?, half.clone(), vec![2.0, 4.0])?;

    // worst case over the reference (0.4, 0.6) and (0.6, 0.4) charged 0.1
    let mut nodes = BTreeMap::new();
    nodes.insert(
        0,
        vec![Candidate {
            probs: vec![0.6, 0.4],
            penalty: 0.1,
        }],
    );
    let robust = root(
        &robust_expectation(Ambiguity::PerNode { nodes })?,
        vec![0.4, 0.6],
        vec![0.0, 4.0],
    )?;

    let tree = build_tree(&TreeSpec::Uniform {
        depth: 1,
        probs: half,
    })?;
    let grid = BermudanGrid::deterministic(&tree, &[0, 1])?;
    let m = make_rho_martingale(
        &tree,
        &grid,
        &RandomVariable::new(vec![2.0, 4.0]),
        &linear_expectation(),
    )?;

    Ok(OperatorValues {
        linear,
        discount,
        entropic,
        robust,
        martingale: m.values().iter().map(|v| v.values().to_vec()).collect(),
    })
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let v = run_example()?;
    println!("linear    {:.6}", v.linear);
    println!("discount  {:.6}", v.discount);
    println!("entropic  {:.6}", v.entropic);
    println!("robust    {:.6}", v.robust);
    println!("M(θ_k)    {:?}", v.martingale);
    Ok(())
}
