//! Finite filtered probability space represented as a rooted tree.
//!
//! Stage-`t` nodes are the atoms of `F_t`; the stage-`N` nodes are the
//! scenarios. Nodes are numbered breadth-first with children in declaration
//! order, so the leaves under any node form a contiguous range of leaf ids.

use schemars::JsonSchema;
use std::ops::Range;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on child probability sums accepted from user input.
pub const INPUT_PROB_TOL: f64 = 1e-9;
/// Tolerance on internal probability identities after renormalization.
pub const PROB_TOL: f64 = 1e-12;
/// Lower clamp used by [`random_tree`] before per-node renormalization.
pub const RANDOM_PROB_FLOOR: f64 = 0.05;

/// Description of a tree, as accepted by [`build_tree`] and the config loader.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TreeSpec {
    /// Every non-leaf node has `probs.len()` children with these probabilities.
    Uniform { depth: usize, probs: Vec<f64> },
    /// `levels[t][i]` lists the child probabilities of the `i`-th stage-`t`
    /// node (breadth-first order). The depth is `levels.len()`.
    Explicit { levels: Vec<Vec<Vec<f64>>> },
    /// Generated by [`random_tree`].
    Random {
        seed: u64,
        max_depth: usize,
        max_branch: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub stage: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Transition probability to each child, aligned with `children`.
    pub probs: Vec<f64>,
    /// Leaf ids below this node (its atom).
    pub leaves: Range<usize>,
}

/// A validated finite filtered probability space.
#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationTree {
    depth: usize,
    nodes: Vec<Node>,
    stage_nodes: Vec<Vec<usize>>,
    leaf_probs: Vec<f64>,
    /// `ancestors[t][leaf]` is the stage-`t` node on the leaf's path.
    ancestors: Vec<Vec<usize>>,
}

impl FiltrationTree {
    /// Builds a tree from per-stage child probability lists (breadth-first).
    pub fn from_levels(levels: &[Vec<Vec<f64>>]) -> Result<Self> {
        let depth = levels.len();
        let mut nodes = vec![Node {
            stage: 0,
            parent: None,
            children: Vec::new(),
            probs: Vec::new(),
            leaves: 0..0,
        }];
        let mut stage_nodes = vec![vec![0usize]];
        for (t, level) in levels.iter().enumerate() {
            let current = stage_nodes[t].clone();
            if level.len() != current.len() {
                return Err(Error::InvalidTree(format!(
                    "stage {t} has {} nodes but {} child lists were given",
                    current.len(),
                    level.len()
                )));
            }
            let mut next = Vec::new();
            for (&id, probs) in current.iter().zip(level) {
                let probs = normalize_probs(probs)
                    .map_err(|msg| Error::InvalidTree(format!("node {id}: {msg}")))?;
                for _ in 0..probs.len() {
                    let child = nodes.len();
                    nodes.push(Node {
                        stage: t + 1,
                        parent: Some(id),
                        children: Vec::new(),
                        probs: Vec::new(),
                        leaves: 0..0,
                    });
                    nodes[id].children.push(child);
                    next.push(child);
                }
                nodes[id].probs = probs;
            }
            stage_nodes.push(next);
        }

        let n_leaves = stage_nodes[depth].len();
        for (leaf, &id) in stage_nodes[depth].iter().enumerate() {
            nodes[id].leaves = leaf..leaf + 1;
        }
        for t in (0..depth).rev() {
            for &id in &stage_nodes[t] {
                let first = nodes[id].children[0];
                let last = *nodes[id].children.last().unwrap();
                nodes[id].leaves = nodes[first].leaves.start..nodes[last].leaves.end;
            }
        }

        let mut ancestors = vec![vec![0usize; n_leaves]; depth + 1];
        for t in 0..=depth {
            for &id in &stage_nodes[t] {
                for leaf in nodes[id].leaves.clone() {
                    ancestors[t][leaf] = id;
                }
            }
        }

        let mut leaf_probs = vec![1.0; n_leaves];
        for (leaf, p) in leaf_probs.iter_mut().enumerate() {
            for t in 0..depth {
                let parent = &nodes[ancestors[t][leaf]];
                let child = ancestors[t + 1][leaf];
                let pos = parent.children.iter().position(|&c| c == child).unwrap();
                *p *= parent.probs[pos];
            }
        }
        let total: f64 = leaf_probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidTree(format!(
                "leaf probabilities sum to {total}"
            )));
        }

        Ok(Self {
            depth,
            nodes,
            stage_nodes,
            leaf_probs,
            ancestors,
        })
    }

    /// Terminal stage `N`.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn num_leaves(&self) -> usize {
        self.leaf_probs.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Node ids at stage `t`, breadth-first.
    pub fn stage_nodes(&self, t: usize) -> &[usize] {
        &self.stage_nodes[t]
    }

    pub fn leaf_prob(&self, leaf: usize) -> f64 {
        self.leaf_probs[leaf]
    }

    pub fn leaf_probs(&self) -> &[f64] {
        &self.leaf_probs
    }

    /// The stage-`t` node on the path to `leaf`.
    pub fn ancestor(&self, leaf: usize, t: usize) -> usize {
        self.ancestors[t][leaf]
    }

    /// Leaf ids sharing the stage-`t` atom of `leaf`.
    pub fn atom_of(&self, leaf: usize, t: usize) -> Result<Range<usize>> {
        if t > self.depth {
            return Err(Error::StageOutOfRange {
                stage: t,
                depth: self.depth,
            });
        }
        if leaf >= self.num_leaves() {
            return Err(Error::LeafOutOfRange {
                leaf,
                leaves: self.num_leaves(),
            });
        }
        Ok(self.nodes[self.ancestors[t][leaf]].leaves.clone())
    }

    /// Path label of a leaf: child positions joined by `.`, e.g. `0.1`.
    pub fn leaf_label(&self, leaf: usize) -> String {
        let mut parts = Vec::with_capacity(self.depth);
        for t in 0..self.depth {
            let parent = &self.nodes[self.ancestors[t][leaf]];
            let child = self.ancestors[t + 1][leaf];
            let pos = parent.children.iter().position(|&c| c == child).unwrap();
            parts.push(pos.to_string());
        }
        parts.join(".")
    }

    /// Expectation of a leaf-indexed vector under `P`.
    pub fn expectation(&self, values: &[f64]) -> f64 {
        self.leaf_probs
            .iter()
            .zip(values)
            .fold(0.0, |acc, (p, v)| acc + p * v)
    }
}

/// Checks strict positivity and renormalizes a child probability vector.
pub(crate) fn normalize_probs(probs: &[f64]) -> std::result::Result<Vec<f64>, String> {
    if probs.is_empty() {
        return Err("a non-leaf node needs at least one child".into());
    }
    if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(format!("non-positive probability {p}"));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > INPUT_PROB_TOL {
        return Err(format!("probabilities sum to {sum} ≠ 1"));
    }
    Ok(probs.iter().map(|p| p / sum).collect())
}

/// Builds and validates a tree from its description.
pub fn build_tree(spec: &TreeSpec) -> Result<FiltrationTree> {
    match spec {
        TreeSpec::Uniform { depth, probs } => {
            let mut levels = Vec::with_capacity(*depth);
            let mut width = 1usize;
            for _ in 0..*depth {
                levels.push(vec![probs.clone(); width]);
                width = width
                    .checked_mul(probs.len())
                    .ok_or_else(|| Error::InvalidTree("uniform tree is too large".into()))?;
            }
            FiltrationTree::from_levels(&levels)
        }
        TreeSpec::Explicit { levels } => FiltrationTree::from_levels(levels),
        TreeSpec::Random {
            seed,
            max_depth,
            max_branch,
        } => random_tree(*seed, *max_depth, *max_branch),
    }
}

/// Seeded random tree. The depth is drawn from `1..=max_depth` and each node's
/// branching from `1..=max_branch`; transition probabilities are drawn in
/// `(RANDOM_PROB_FLOOR, 1)` and renormalized per node.
pub fn random_tree(seed: u64, max_depth: usize, max_branch: usize) -> Result<FiltrationTree> {
    if max_depth < 1 || max_branch < 2 {
        return Err(Error::InvalidTree(format!(
            "random tree needs max_depth >= 1 and max_branch >= 2 (got {max_depth}, {max_branch})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let depth = rng.gen_range(1..=max_depth);
    let mut levels = Vec::with_capacity(depth);
    let mut width = 1usize;
    for _ in 0..depth {
        let mut level = Vec::with_capacity(width);
        let mut next = 0;
        for _ in 0..width {
            let branch = rng.gen_range(1..=max_branch);
            let raw: Vec<f64> = (0..branch)
                .map(|_| rng.gen_range(RANDOM_PROB_FLOOR..1.0))
                .collect();
            let sum: f64 = raw.iter().sum();
            level.push(raw.iter().map(|p| p / sum).collect::<Vec<_>>());
            next += branch;
        }
        levels.push(level);
        width = next;
    }
    FiltrationTree::from_levels(&levels)
}
