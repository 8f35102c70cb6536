//! Stopping times, Bermudan grids and the strategy set Θ.
//!
//! A grid is a non-decreasing sequence of stopping times `θ_0 ≡ 0 ≤ … ≤ θ_n ≡ N`.
//! A Bermudan strategy picks, scenario by scenario, one of the grid times in an
//! adapted way. Strategies keep the grid-index map they were built from next to
//! the induced stage map; every value computation only looks at stages.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::FiltrationTree;
use crate::variable::RandomVariable;

/// Default bound on the number of strategies an enumeration may produce.
pub const DEFAULT_CAP: u128 = 1_000_000;

/// A set of scenarios, as a leaf-indexed membership mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Event(pub Vec<bool>);

impl Event {
    pub fn empty(tree: &FiltrationTree) -> Self {
        Self(vec![false; tree.num_leaves()])
    }

    pub fn full(tree: &FiltrationTree) -> Self {
        Self(vec![true; tree.num_leaves()])
    }

    pub fn from_leaves(tree: &FiltrationTree, leaves: &[usize]) -> Self {
        let mut mask = vec![false; tree.num_leaves()];
        for &leaf in leaves {
            mask[leaf] = true;
        }
        Self(mask)
    }

    pub fn contains(&self, leaf: usize) -> bool {
        self.0[leaf]
    }

    pub fn leaves(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(leaf, &inside)| inside.then_some(leaf))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        !self.0.iter().any(|&b| b)
    }

    pub fn complement(&self) -> Self {
        Self(self.0.iter().map(|b| !b).collect())
    }
}

/// Checks that `{stage ≤ t}` is a union of stage-`t` atoms for every `t`.
pub fn is_adapted(tree: &FiltrationTree, stages: &[usize]) -> Result<bool> {
    if stages.len() != tree.num_leaves() {
        return Err(Error::LengthMismatch {
            expected: tree.num_leaves(),
            got: stages.len(),
        });
    }
    if let Some(&stage) = stages.iter().find(|&&s| s > tree.depth()) {
        return Err(Error::StageOutOfRange {
            stage,
            depth: tree.depth(),
        });
    }
    Ok(first_adaptedness_violation(tree, stages).is_none())
}

fn first_adaptedness_violation(tree: &FiltrationTree, stages: &[usize]) -> Option<(usize, usize)> {
    for t in 0..=tree.depth() {
        for &id in tree.stage_nodes(t) {
            let leaves = tree.node(id).leaves.clone();
            let decided = stages[leaves.start] <= t;
            if leaves.clone().any(|leaf| (stages[leaf] <= t) != decided) {
                return Some((id, t));
            }
        }
    }
    None
}

/// A stage map `ω ↦ τ(ω)` that is adapted to the tree filtration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StoppingTime(Vec<usize>);

impl StoppingTime {
    pub fn new(tree: &FiltrationTree, stages: Vec<usize>) -> Result<Self> {
        if !is_adapted(tree, &stages)? {
            let (node, t) = first_adaptedness_violation(tree, &stages).unwrap();
            return Err(Error::NotAdapted(format!(
                "{{τ ≤ {t}}} splits the atom of node {node}"
            )));
        }
        Ok(Self(stages))
    }

    pub fn constant(tree: &FiltrationTree, stage: usize) -> Result<Self> {
        if stage > tree.depth() {
            return Err(Error::StageOutOfRange {
                stage,
                depth: tree.depth(),
            });
        }
        Ok(Self(vec![stage; tree.num_leaves()]))
    }

    pub fn stages(&self) -> &[usize] {
        &self.0
    }

    pub fn at(&self, leaf: usize) -> usize {
        self.0[leaf]
    }

    pub fn min(&self, other: &Self) -> Self {
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.min(b))
                .collect(),
        )
    }

    pub fn max(&self, other: &Self) -> Self {
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    /// `self ≤ other` scenariowise.
    pub fn le(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Leaves where the two stopping times agree.
    pub fn agree(&self, other: &Self) -> Event {
        Event(self.0.iter().zip(&other.0).map(|(a, b)| a == b).collect())
    }
}

/// True iff `A ∩ {θ = t}` is a union of stage-`t` atoms for every `t`,
/// i.e. `A ∈ F_θ`.
pub fn event_in_sigma_at(tree: &FiltrationTree, event: &Event, theta: &StoppingTime) -> bool {
    for t in 0..=tree.depth() {
        for &id in tree.stage_nodes(t) {
            let leaves = tree.node(id).leaves.clone();
            if theta.at(leaves.start) != t {
                continue;
            }
            let inside = event.contains(leaves.start);
            if leaves
                .into_iter()
                .any(|leaf| event.contains(leaf) != inside)
            {
                return false;
            }
        }
    }
    true
}

/// True iff `rv` is `F_θ`-measurable: constant on every atom where `θ` stops.
pub fn is_measurable_at_time(
    tree: &FiltrationTree,
    rv: &RandomVariable,
    theta: &StoppingTime,
) -> bool {
    if rv.len() != tree.num_leaves() {
        return false;
    }
    for t in 0..=tree.depth() {
        for &id in tree.stage_nodes(t) {
            let leaves = tree.node(id).leaves.clone();
            if theta.at(leaves.start) != t {
                continue;
            }
            let v = rv[leaves.start];
            if leaves.into_iter().any(|leaf| rv[leaf] != v) {
                return false;
            }
        }
    }
    true
}

/// A non-decreasing sequence of stopping times `θ_0 ≡ 0 ≤ … ≤ θ_n ≡ N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BermudanGrid {
    thetas: Vec<StoppingTime>,
}

impl BermudanGrid {
    pub fn new(tree: &FiltrationTree, thetas: Vec<StoppingTime>) -> Result<Self> {
        if thetas.is_empty() {
            return Err(Error::InvalidGrid("a grid needs at least θ_0".into()));
        }
        for (k, theta) in thetas.iter().enumerate() {
            if theta.stages().len() != tree.num_leaves() {
                return Err(Error::InvalidGrid(format!(
                    "θ_{k} has {} entries for {} leaves",
                    theta.stages().len(),
                    tree.num_leaves()
                )));
            }
            if !is_adapted(tree, theta.stages())? {
                return Err(Error::InvalidGrid(format!("θ_{k} is not a stopping time")));
            }
        }
        if thetas[0].stages().iter().any(|&s| s != 0) {
            return Err(Error::InvalidGrid("θ_0 must be identically 0".into()));
        }
        let n = thetas.len() - 1;
        if thetas[n].stages().iter().any(|&s| s != tree.depth()) {
            return Err(Error::InvalidGrid(format!(
                "θ_{n} must be identically the terminal stage {}",
                tree.depth()
            )));
        }
        for k in 0..n {
            if !thetas[k].le(&thetas[k + 1]) {
                return Err(Error::InvalidGrid(format!("θ_{k} ≤ θ_{} fails", k + 1)));
            }
        }
        Ok(Self { thetas })
    }

    /// Grid of deterministic stages `0 = s_0 ≤ … ≤ s_n = N`.
    pub fn deterministic(tree: &FiltrationTree, stages: &[usize]) -> Result<Self> {
        let thetas = stages
            .iter()
            .map(|&s| StoppingTime::constant(tree, s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(tree, thetas)
    }

    /// Grid from per-leaf stage lists, one list per grid index.
    pub fn from_stage_lists(tree: &FiltrationTree, lists: Vec<Vec<usize>>) -> Result<Self> {
        let thetas = lists
            .into_iter()
            .map(|stages| StoppingTime::new(tree, stages))
            .collect::<Result<Vec<_>>>()?;
        Self::new(tree, thetas)
    }

    /// Index of the last grid time, `n`.
    pub fn last(&self) -> usize {
        self.thetas.len() - 1
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn theta(&self, k: usize) -> &StoppingTime {
        &self.thetas[k]
    }

    pub fn thetas(&self) -> &[StoppingTime] {
        &self.thetas
    }

    pub fn stage(&self, k: usize, leaf: usize) -> usize {
        self.thetas[k].at(leaf)
    }
}

/// A Bermudan strategy `τ(ω) = θ_{k(ω)}(ω)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThetaStrategy {
    index: Vec<usize>,
    time: StoppingTime,
}

impl ThetaStrategy {
    /// Strategy from a grid-index map; the induced stage map must be adapted.
    pub fn from_index(
        tree: &FiltrationTree,
        grid: &BermudanGrid,
        index: Vec<usize>,
    ) -> Result<Self> {
        if index.len() != tree.num_leaves() {
            return Err(Error::LengthMismatch {
                expected: tree.num_leaves(),
                got: index.len(),
            });
        }
        if let Some(&k) = index.iter().find(|&&k| k > grid.last()) {
            return Err(Error::InvalidStrategy(format!(
                "grid index {k} exceeds n = {}",
                grid.last()
            )));
        }
        let stages = index
            .iter()
            .enumerate()
            .map(|(leaf, &k)| grid.stage(k, leaf))
            .collect();
        let time =
            StoppingTime::new(tree, stages).map_err(|e| Error::InvalidStrategy(e.to_string()))?;
        Ok(Self { index, time })
    }

    /// Strategy from a stage map; the grid index is the canonical one.
    pub fn from_stages(
        tree: &FiltrationTree,
        grid: &BermudanGrid,
        stages: Vec<usize>,
    ) -> Result<Self> {
        let time =
            StoppingTime::new(tree, stages).map_err(|e| Error::InvalidStrategy(e.to_string()))?;
        let index = canonical_index(tree, grid, &time)?;
        Ok(Self { index, time })
    }

    /// The constant-index strategy `τ ≡ θ_k`.
    pub fn grid_time(tree: &FiltrationTree, grid: &BermudanGrid, k: usize) -> Self {
        Self {
            index: vec![k; tree.num_leaves()],
            time: grid.theta(k).clone(),
        }
    }

    pub fn index(&self) -> &[usize] {
        &self.index
    }

    pub fn time(&self) -> &StoppingTime {
        &self.time
    }

    pub fn stages(&self) -> &[usize] {
        self.time.stages()
    }

    pub fn stage(&self, leaf: usize) -> usize {
        self.time.at(leaf)
    }

    /// `self ≥ θ_k` scenariowise.
    pub fn is_after(&self, grid: &BermudanGrid, k: usize) -> bool {
        grid.theta(k).le(&self.time)
    }

    /// Pointwise minimum and maximum. Each output takes its index from the
    /// strategy that supplied its stage.
    pub fn min_max(&self, other: &Self) -> (Self, Self) {
        let n = self.index.len();
        let (mut lo_i, mut hi_i) = (Vec::with_capacity(n), Vec::with_capacity(n));
        let (mut lo_s, mut hi_s) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for leaf in 0..n {
            let (a, b) = (self.stage(leaf), other.stage(leaf));
            if a <= b {
                lo_i.push(self.index[leaf]);
                lo_s.push(a);
                hi_i.push(other.index[leaf]);
                hi_s.push(b);
            } else {
                lo_i.push(other.index[leaf]);
                lo_s.push(b);
                hi_i.push(self.index[leaf]);
                hi_s.push(a);
            }
        }
        (
            Self {
                index: lo_i,
                time: StoppingTime(lo_s),
            },
            Self {
                index: hi_i,
                time: StoppingTime(hi_s),
            },
        )
    }

    pub fn min(&self, other: &Self) -> Self {
        self.min_max(other).0
    }

    pub fn max(&self, other: &Self) -> Self {
        self.min_max(other).1
    }

    /// `τ 1_A + τ′ 1_{A^c}`; requires `A ∈ F_{τ∧τ′}`.
    pub fn concatenate(
        tree: &FiltrationTree,
        tau: &Self,
        other: &Self,
        event: &Event,
    ) -> Result<Self> {
        let lower = tau.time.min(&other.time);
        if !event_in_sigma_at(tree, event, &lower) {
            return Err(Error::NotMeasurable(
                "concatenation event is not in F_{τ∧τ′}".into(),
            ));
        }
        let n = tau.index.len();
        let mut index = Vec::with_capacity(n);
        let mut stages = Vec::with_capacity(n);
        for leaf in 0..n {
            let src = if event.contains(leaf) { tau } else { other };
            index.push(src.index[leaf]);
            stages.push(src.stage(leaf));
        }
        Ok(Self {
            index,
            time: StoppingTime(stages),
        })
    }
}

/// Canonical partition `A_0..A_n` of a strategy:
/// `A_0 = {τ = θ_0}`, `A_{k+1} = {τ = θ_{k+1} < N} \ (A_0 ∪ … ∪ A_k)`, and the
/// remaining scenarios (where `τ = N`) go to `A_n`.
pub fn canonical_partition(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    tau: &ThetaStrategy,
) -> Result<Vec<Event>> {
    let index = canonical_index(tree, grid, tau.time())?;
    let mut parts = vec![Event::empty(tree); grid.len()];
    for (leaf, &k) in index.iter().enumerate() {
        parts[k].0[leaf] = true;
    }
    for (k, part) in parts.iter().enumerate() {
        if !event_in_sigma_at(tree, part, grid.theta(k)) {
            return Err(Error::InvalidStrategy(format!("A_{k} is not in F_θ_{k}")));
        }
    }
    Ok(parts)
}

fn canonical_index(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    time: &StoppingTime,
) -> Result<Vec<usize>> {
    let n = grid.last();
    let depth = tree.depth();
    (0..tree.num_leaves())
        .map(|leaf| {
            let s = time.at(leaf);
            if s == grid.stage(0, leaf) {
                return Ok(0);
            }
            if let Some(k) = (1..n).find(|&k| grid.stage(k, leaf) == s && s < depth) {
                return Ok(k);
            }
            if s == depth {
                return Ok(n);
            }
            Err(Error::InvalidStrategy(format!(
                "stage {s} at leaf {leaf} is not a grid time"
            )))
        })
        .collect()
}

/// Number of strategies in `Θ_{θ_k}` (saturating).
pub fn count_from(tree: &FiltrationTree, grid: &BermudanGrid, k: usize) -> u128 {
    fn count(tree: &FiltrationTree, grid: &BermudanGrid, k: usize, id: usize) -> u128 {
        let node = tree.node(id);
        if node.children.is_empty() {
            return 1;
        }
        let cont = node
            .children
            .iter()
            .fold(1u128, |acc, &c| acc.saturating_mul(count(tree, grid, k, c)));
        if is_resolution(grid, k, node.stage, node.leaves.start) {
            cont.saturating_add(1)
        } else {
            cont
        }
    }
    count(tree, grid, k, 0)
}

/// Some `θ_j`, `j ≥ k`, equals `t` on the atom containing `leaf`.
fn is_resolution(grid: &BermudanGrid, k: usize, t: usize, leaf: usize) -> bool {
    (k..grid.len()).any(|j| grid.stage(j, leaf) == t)
}

/// All strategies `τ ∈ Θ` with `τ ≥ θ_k`, in a fixed depth-first order where
/// stopping at a node is listed before continuing.
pub fn enumerate_from(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    k: usize,
    cap: u128,
) -> Result<Vec<ThetaStrategy>> {
    let count = count_from(tree, grid, k);
    if count > cap {
        return Err(Error::CapExceeded { count, cap });
    }
    let maps = enumerate_node(tree, grid, k, 0);
    maps.into_iter()
        .map(|stages| ThetaStrategy::from_stages(tree, grid, stages))
        .collect()
}

fn enumerate_node(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    k: usize,
    id: usize,
) -> Vec<Vec<usize>> {
    let node = tree.node(id);
    let width = node.leaves.len();
    if node.children.is_empty() {
        return vec![vec![node.stage]];
    }
    let mut out = Vec::new();
    if is_resolution(grid, k, node.stage, node.leaves.start) {
        out.push(vec![node.stage; width]);
    }
    let mut acc: Vec<Vec<usize>> = vec![Vec::with_capacity(width)];
    for &child in &node.children {
        let sub = enumerate_node(tree, grid, k, child);
        let mut next = Vec::with_capacity(acc.len() * sub.len());
        for prefix in &acc {
            for tail in &sub {
                let mut joined = Vec::with_capacity(width);
                joined.extend_from_slice(prefix);
                joined.extend_from_slice(tail);
                next.push(joined);
            }
        }
        acc = next;
    }
    out.extend(acc);
    out
}

/// An adapted process `φ_t`, stored once per node so it is adapted by
/// construction. Sampling it at strategies gives an admissible family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptedProcess {
    node_values: Vec<f64>,
}

impl AdaptedProcess {
    pub fn from_node_values(tree: &FiltrationTree, node_values: Vec<f64>) -> Result<Self> {
        if node_values.len() != tree.num_nodes() {
            return Err(Error::LengthMismatch {
                expected: tree.num_nodes(),
                got: node_values.len(),
            });
        }
        Ok(Self { node_values })
    }

    pub fn constant(tree: &FiltrationTree, value: f64) -> Self {
        Self {
            node_values: vec![value; tree.num_nodes()],
        }
    }

    /// From a `stage × leaf` table; each row must be measurable at its stage.
    pub fn from_stage_table(tree: &FiltrationTree, table: &[Vec<f64>]) -> Result<Self> {
        if table.len() != tree.depth() + 1 {
            return Err(Error::LengthMismatch {
                expected: tree.depth() + 1,
                got: table.len(),
            });
        }
        let mut node_values = vec![0.0; tree.num_nodes()];
        for (t, row) in table.iter().enumerate() {
            if row.len() != tree.num_leaves() {
                return Err(Error::LengthMismatch {
                    expected: tree.num_leaves(),
                    got: row.len(),
                });
            }
            for &id in tree.stage_nodes(t) {
                let leaves = tree.node(id).leaves.clone();
                let v = row[leaves.start];
                if leaves.into_iter().any(|leaf| row[leaf] != v) {
                    return Err(Error::NotAdapted(format!(
                        "process value at stage {t} varies inside node {id}"
                    )));
                }
                node_values[id] = v;
            }
        }
        Ok(Self { node_values })
    }

    pub fn node_values(&self) -> &[f64] {
        &self.node_values
    }

    pub fn value(&self, tree: &FiltrationTree, t: usize, leaf: usize) -> f64 {
        self.node_values[tree.ancestor(leaf, t)]
    }

    /// `φ(τ)(ω) = φ_{τ(ω)}(ω)`.
    pub fn sample(&self, tree: &FiltrationTree, time: &StoppingTime) -> RandomVariable {
        RandomVariable(
            (0..tree.num_leaves())
                .map(|leaf| self.value(tree, time.at(leaf), leaf))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            node_values: self
                .node_values
                .iter()
                .zip(&other.node_values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{build_tree, TreeSpec};

    fn binary(depth: usize) -> FiltrationTree {
        build_tree(&TreeSpec::Uniform {
            depth,
            probs: vec![0.5, 0.5],
        })
        .unwrap()
    }

    #[test]
    fn adaptedness_examples() {
        let tree = binary(2);
        assert!(is_adapted(&tree, &[1, 1, 2, 2]).unwrap());
        assert!(!is_adapted(&tree, &[1, 2, 2, 2]).unwrap());
        for t in 0..=2 {
            assert!(is_adapted(&tree, &[t; 4]).unwrap());
        }
        assert!(matches!(
            is_adapted(&tree, &[3, 3, 3, 3]),
            Err(Error::StageOutOfRange { .. })
        ));
    }

    #[test]
    fn sigma_at_stopping_time() {
        let tree = binary(2);
        let zero = StoppingTime::constant(&tree, 0).unwrap();
        assert!(event_in_sigma_at(&tree, &Event::full(&tree), &zero));
        assert!(!event_in_sigma_at(
            &tree,
            &Event::from_leaves(&tree, &[1]),
            &zero
        ));
        let terminal = StoppingTime::constant(&tree, 2).unwrap();
        assert!(event_in_sigma_at(
            &tree,
            &Event::from_leaves(&tree, &[1]),
            &terminal
        ));
        let theta = StoppingTime::new(&tree, vec![1, 1, 2, 2]).unwrap();
        assert!(!event_in_sigma_at(
            &tree,
            &Event::from_leaves(&tree, &[0]),
            &theta
        ));
        assert!(event_in_sigma_at(
            &tree,
            &Event::from_leaves(&tree, &[0, 1]),
            &theta
        ));
        assert!(event_in_sigma_at(
            &tree,
            &Event::from_leaves(&tree, &[2]),
            &theta
        ));
    }

    #[test]
    fn grid_validation() {
        let tree = binary(2);
        assert!(BermudanGrid::deterministic(&tree, &[0, 1, 2]).is_ok());
        assert!(BermudanGrid::deterministic(&tree, &[1, 2]).is_err());
        assert!(BermudanGrid::deterministic(&tree, &[0, 1]).is_err());
        assert!(BermudanGrid::deterministic(&tree, &[0, 2, 1, 2]).is_err());
    }

    #[test]
    fn enumeration_counts() {
        let t1 = binary(1);
        let g1 = BermudanGrid::deterministic(&t1, &[0, 1]).unwrap();
        let all = enumerate_from(&t1, &g1, 0, DEFAULT_CAP).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all[0].stages(), &[0, 0]);
        assert_eq!(all[1].stages(), &[1, 1]);

        let t2 = binary(2);
        let g2 = BermudanGrid::deterministic(&t2, &[0, 1, 2]).unwrap();
        assert_eq!(enumerate_from(&t2, &g2, 0, DEFAULT_CAP).unwrap().len(), 5);
        assert_eq!(count_from(&t2, &g2, 0), 5);
        let last = enumerate_from(&t2, &g2, 2, DEFAULT_CAP).unwrap();
        assert_eq!(last.len(), 1);
        assert_eq!(last[0].stages(), &[2; 4]);
    }

    #[test]
    fn enumeration_respects_cap() {
        let tree = binary(2);
        let grid = BermudanGrid::deterministic(&tree, &[0, 1, 2]).unwrap();
        assert_eq!(
            enumerate_from(&tree, &grid, 0, 4).unwrap_err(),
            Error::CapExceeded { count: 5, cap: 4 }
        );
    }

    #[test]
    fn canonical_partition_examples() {
        let tree = binary(2);
        let grid = BermudanGrid::deterministic(&tree, &[0, 1, 2]).unwrap();
        let first = ThetaStrategy::grid_time(&tree, &grid, 0);
        let parts = canonical_partition(&tree, &grid, &first).unwrap();
        assert_eq!(parts[0], Event::full(&tree));
        assert!(parts[1].is_empty() && parts[2].is_empty());

        let last = ThetaStrategy::grid_time(&tree, &grid, 2);
        let parts = canonical_partition(&tree, &grid, &last).unwrap();
        assert_eq!(parts[2], Event::full(&tree));
    }

    #[test]
    fn canonical_partition_picks_lowest_index_on_overlap() {
        // θ_1 = θ_2 = 1 on the up atom, θ_1 = 1, θ_2 = 2 on the down atom.
        let tree = binary(2);
        let grid = BermudanGrid::from_stage_lists(
            &tree,
            vec![vec![0; 4], vec![1; 4], vec![1, 1, 2, 2], vec![2; 4]],
        )
        .unwrap();
        let tau = ThetaStrategy::from_index(&tree, &grid, vec![2, 2, 3, 3]).unwrap();
        let parts = canonical_partition(&tree, &grid, &tau).unwrap();
        assert_eq!(parts[1], Event::from_leaves(&tree, &[0, 1]));
        assert!(parts[2].is_empty());
        assert_eq!(parts[3], Event::from_leaves(&tree, &[2, 3]));
        let rebuilt = ThetaStrategy::from_stages(&tree, &grid, tau.stages().to_vec()).unwrap();
        assert_eq!(rebuilt.stages(), tau.stages());
        assert_eq!(rebuilt.index(), &[1, 1, 3, 3]);
    }

    #[test]
    fn concatenation() {
        let tree = binary(1);
        let grid = BermudanGrid::deterministic(&tree, &[0, 1]).unwrap();
        let tau = ThetaStrategy::grid_time(&tree, &grid, 0);
        let other = ThetaStrategy::grid_time(&tree, &grid, 1);
        let all = Event::full(&tree);
        assert_eq!(
            ThetaStrategy::concatenate(&tree, &tau, &other, &all).unwrap(),
            tau
        );
        let none = Event::empty(&tree);
        assert_eq!(
            ThetaStrategy::concatenate(&tree, &tau, &other, &none).unwrap(),
            other
        );
        let up = Event::from_leaves(&tree, &[0]);
        assert!(matches!(
            ThetaStrategy::concatenate(&tree, &tau, &other, &up),
            Err(Error::NotMeasurable(_))
        ));
    }

    #[test]
    fn min_max_examples() {
        let tree = binary(2);
        let grid = BermudanGrid::deterministic(&tree, &[0, 1, 2]).unwrap();
        let tau = ThetaStrategy::from_stages(&tree, &grid, vec![1, 1, 2, 2]).unwrap();
        let last = ThetaStrategy::grid_time(&tree, &grid, 2);
        let (lo, hi) = tau.min_max(&last);
        assert_eq!(lo.stages(), tau.stages());
        assert_eq!(hi.stages(), last.stages());
        assert_eq!(tau.min(&tau), tau);
        let first = ThetaStrategy::grid_time(&tree, &grid, 0);
        assert_eq!(first.min(&tau), first);
    }

    #[test]
    fn stage_table_must_be_adapted() {
        let tree = binary(1);
        let ok =
            AdaptedProcess::from_stage_table(&tree, &[vec![1.0, 1.0], vec![0.0, 4.0]]).unwrap();
        assert_eq!(ok.node_values(), &[1.0, 0.0, 4.0]);
        assert!(
            AdaptedProcess::from_stage_table(&tree, &[vec![1.0, 2.0], vec![0.0, 4.0]]).is_err()
        );
    }
}
