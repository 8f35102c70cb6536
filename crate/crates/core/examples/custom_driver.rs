// A user-supplied g-driver: g(t, y, z) = −r·y − κ·‖z‖, with ‖z‖ the
// probability-weighted norm of the centered child deviations.

use std::sync::Arc;

use bermudan_snell::evaluation::weighted_norm;
use bermudan_snell::{
    build_tree, g_driver_evaluation, payoff_family, snell_backward, AdaptedProcess, BermudanGrid,
    Driver, Result, TreeSpec,
};

pub fn run_example() -> Result<(f64, f64)> {
    let (rate, kappa) = (0.05, 0.3);
    let driver = Driver::Custom {
        name: "discount_with_vol_penalty".into(),
        g: Arc::new(move |_t, y, z, p| -rate * y - kappa * weighted_norm(z, p)),
    };
    let op = g_driver_evaluation(driver, 0.5)?;

    let tree = build_tree(&TreeSpec::Uniform {
        depth: 2,
        probs: vec![0.5, 0.5],
    })?;
    let grid = BermudanGrid::deterministic(&tree, &[0, 1, 2])?;
    let process = AdaptedProcess::from_stage_table(
        &tree,
        &[
            vec![1.0; 4],
            vec![0.5, 0.5, 2.0, 2.0],
            vec![0.0, 1.0, 3.0, 5.0],
        ],
    )?;
    let xi = payoff_family(&tree, &process, &grid);
    let u = snell_backward(&tree, &grid, &xi, &op)?;
    Ok((u.at(0)[0], u.at(1)[2]))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let (root, up) = run_example()?;
    println!("U(θ_0) = {root:.6}, U(θ_1) on the upper atom = {up:.6}");
    Ok(())
}
