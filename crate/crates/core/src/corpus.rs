//! Seeded random instances: trees, stopping times, grids, adapted processes.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::stopping::{count_from, AdaptedProcess, BermudanGrid, Event, StoppingTime};
use crate::tree::{random_tree, FiltrationTree};

pub type CorpusRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random stopping time `τ ≥ lower`: walking down the tree, each node that
/// `lower` has already reached stops the whole atom with probability
/// `stop_prob`; leaves always stop.
pub fn random_stopping_time_after(
    tree: &FiltrationTree,
    lower: &StoppingTime,
    stop_prob: f64,
    rng: &mut impl Rng,
) -> StoppingTime {
    let mut stages = vec![tree.depth(); tree.num_leaves()];
    let mut stack = vec![0usize];
    while let Some(id) = stack.pop() {
        let node = tree.node(id);
        if node.children.is_empty() {
            continue;
        }
        if lower.at(node.leaves.start) <= node.stage && rng.gen_bool(stop_prob) {
            for leaf in node.leaves.clone() {
                stages[leaf] = node.stage;
            }
            continue;
        }
        stack.extend(node.children.iter().rev());
    }
    StoppingTime::new(tree, stages).expect("generated stage map is adapted")
}

pub fn random_stopping_time(
    tree: &FiltrationTree,
    stop_prob: f64,
    rng: &mut impl Rng,
) -> StoppingTime {
    let zero = StoppingTime::constant(tree, 0).unwrap();
    random_stopping_time_after(tree, &zero, stop_prob, rng)
}

/// Random stopping time in `[lower, upper]` (requires `lower ≤ upper`).
pub fn random_stopping_time_between(
    tree: &FiltrationTree,
    lower: &StoppingTime,
    upper: &StoppingTime,
    stop_prob: f64,
    rng: &mut impl Rng,
) -> StoppingTime {
    random_stopping_time_after(tree, lower, stop_prob, rng).min(upper)
}

/// Random event in `F_θ`: each atom on which `θ` stops is included with
/// probability one half.
pub fn random_event_at(tree: &FiltrationTree, theta: &StoppingTime, rng: &mut impl Rng) -> Event {
    let mut mask = vec![false; tree.num_leaves()];
    for t in 0..=tree.depth() {
        for &id in tree.stage_nodes(t) {
            let leaves = tree.node(id).leaves.clone();
            if theta.at(leaves.start) == t && rng.gen_bool(0.5) {
                for leaf in leaves {
                    mask[leaf] = true;
                }
            }
        }
    }
    Event(mask)
}

/// Adapted process with node values uniform in `[lo, hi]`.
pub fn random_process(
    tree: &FiltrationTree,
    lo: f64,
    hi: f64,
    rng: &mut impl Rng,
) -> AdaptedProcess {
    let values = (0..tree.num_nodes())
        .map(|_| rng.gen_range(lo..=hi))
        .collect();
    AdaptedProcess::from_node_values(tree, values).unwrap()
}

/// Grid with `n + 1` entries: `θ_0 ≡ 0`, `θ_n ≡ N`, and `n − 1` random stopping
/// times in between, sorted scenariowise (order statistics of stopping times
/// are stopping times).
pub fn random_grid(tree: &FiltrationTree, n: usize, rng: &mut impl Rng) -> BermudanGrid {
    let n = n.max(1);
    let leaves = tree.num_leaves();
    // interior grid times never stop at the root, else they collapse onto θ_0
    let floor = StoppingTime::constant(tree, tree.depth().min(1)).unwrap();
    let mut inner: Vec<Vec<usize>> = (1..n)
        .map(|_| {
            random_stopping_time_after(tree, &floor, 0.4, rng)
                .stages()
                .to_vec()
        })
        .collect();
    for leaf in 0..leaves {
        let mut column: Vec<usize> = inner.iter().map(|s| s[leaf]).collect();
        column.sort_unstable();
        for (row, v) in inner.iter_mut().zip(column) {
            row[leaf] = v;
        }
    }
    let mut lists = Vec::with_capacity(n + 1);
    lists.push(vec![0; leaves]);
    lists.extend(inner);
    lists.push(vec![tree.depth(); leaves]);
    BermudanGrid::from_stage_lists(tree, lists).expect("sorted stopping times form a grid")
}

/// Bounds for random corpus instances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CorpusBounds {
    pub max_depth: usize,
    pub max_branch: usize,
    /// Largest grid index `n`.
    pub max_grid: usize,
    pub payoff_lo: f64,
    pub payoff_hi: f64,
    /// Grids are redrawn until `|Θ|` is at most this.
    pub max_strategies: u128,
}

impl Default for CorpusBounds {
    fn default() -> Self {
        Self {
            max_depth: 4,
            max_branch: 3,
            max_grid: 3,
            payoff_lo: -5.0,
            payoff_hi: 5.0,
            max_strategies: 400,
        }
    }
}

/// A tree, a grid on it and an adapted pay-off process.
#[derive(Debug, Clone)]
pub struct Instance {
    pub seed: u64,
    pub tree: FiltrationTree,
    pub grid: BermudanGrid,
    pub payoff: AdaptedProcess,
}

impl Instance {
    pub fn generate(seed: u64, bounds: &CorpusBounds) -> Result<Self> {
        let tree = random_tree(seed, bounds.max_depth, bounds.max_branch)?;
        let mut rng = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
        // n = 1 leaves nothing to choose, so deeper trees get at least one interior time
        let min_grid = if tree.depth() >= 2 {
            bounds.max_grid.min(2)
        } else {
            1
        };
        let mut grid = random_grid(&tree, rng.gen_range(min_grid..=bounds.max_grid), &mut rng);
        let mut attempts = 0;
        while count_from(&tree, &grid, 0) > bounds.max_strategies {
            attempts += 1;
            grid = if attempts > 20 {
                // θ_1 ≡ 1 gives at most 2^branch + 1 strategies
                let stages: Vec<usize> = [0, 1, tree.depth()]
                    .into_iter()
                    .take(bounds.max_grid + 1)
                    .collect();
                BermudanGrid::deterministic(&tree, &stages)?
            } else {
                random_grid(&tree, rng.gen_range(min_grid..=bounds.max_grid), &mut rng)
            };
        }
        let payoff = random_process(&tree, bounds.payoff_lo, bounds.payoff_hi, &mut rng);
        Ok(Self {
            seed,
            tree,
            grid,
            payoff,
        })
    }
}
