// Stopping times, random grids and the Bermudan strategy set Θ.

use bermudan_snell::stopping::event_in_sigma_at;
use bermudan_snell::{
    build_tree, canonical_partition, count_from, enumerate_from, BermudanGrid, Event, Result,
    ThetaStrategy, TreeSpec,
};

pub struct StrategySummary {
    /// `|Θ_{θ_k}|` for each `k`.
    pub counts: Vec<u128>,
    pub enumerated: usize,
    /// Canonical grid index of a strategy stopping at the overlap θ_1 = θ_2.
    pub overlap_index: Vec<usize>,
    pub mixed_stages: Vec<usize>,
}

pub fn run_example() -> Result<StrategySummary> {
    // two periods, four scenarios
    let tree = build_tree(&TreeSpec::Uniform {
        depth: 2,
        probs: vec![0.5, 0.5],
    })?;
    // θ_1 is stage 1 on the first half and stage 2 on the second; θ_2 ≡ 2
    let grid =
        BermudanGrid::from_stage_lists(&tree, vec![vec![0; 4], vec![1, 1, 2, 2], vec![2; 4]])?;
    let counts: Vec<u128> = (0..grid.len())
        .map(|k| count_from(&tree, &grid, k))
        .collect();
    let all = enumerate_from(&tree, &grid, 0, 1_000)?;

    let tau = ThetaStrategy::from_stages(&tree, &grid, vec![1, 1, 2, 2])?;
    let parts = canonical_partition(&tree, &grid, &tau)?;
    let mut overlap_index = vec![0; tree.num_leaves()];
    for (k, part) in parts.iter().enumerate() {
        for leaf in part.leaves() {
            overlap_index[leaf] = k;
        }
    }

    // concatenation on the deterministic grid 0, 1, 2: stop at 1 on the
    // first stage-1 atom and at 2 elsewhere
    let det = BermudanGrid::deterministic(&tree, &[0, 1, 2])?;
    let early = ThetaStrategy::grid_time(&tree, &det, 1);
    let late = ThetaStrategy::grid_time(&tree, &det, 2);
    let a = Event::from_leaves(&tree, &[0, 1]);
    assert!(event_in_sigma_at(&tree, &a, early.time()));
    let mixed = ThetaStrategy::concatenate(&tree, &early, &late, &a)?;
    // {ω_0} is not known at stage 1
    let rejected =
        ThetaStrategy::concatenate(&tree, &early, &late, &Event::from_leaves(&tree, &[0]));
    assert!(rejected.is_err());

    Ok(StrategySummary {
        counts,
        enumerated: all.len(),
        overlap_index,
        mixed_stages: mixed.stages().to_vec(),
    })
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let s = run_example()?;
    println!(
        "|Θ_θk| = {:?} ({} enumerated from k = 0)",
        s.counts, s.enumerated
    );
    println!("canonical index of τ = θ_1: {:?}", s.overlap_index);
    println!("concatenated stages: {:?}", s.mixed_stages);
    Ok(())
}
