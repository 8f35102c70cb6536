//! Leaf-indexed random variables and measurability.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::FiltrationTree;

/// A real value per scenario (leaf), in leaf-id order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RandomVariable(pub Vec<f64>);

impl RandomVariable {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn constant(tree: &FiltrationTree, value: f64) -> Self {
        Self(vec![value; tree.num_leaves()])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn check_len(&self, tree: &FiltrationTree) -> Result<()> {
        if self.0.len() != tree.num_leaves() {
            return Err(Error::LengthMismatch {
                expected: tree.num_leaves(),
                got: self.0.len(),
            });
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Largest absolute pointwise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn pointwise_max(&self, other: &Self) -> Self {
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.max(*b))
                .collect(),
        )
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.iter().map(|&v| f(v)).collect())
    }
}

impl Index<usize> for RandomVariable {
    type Output = f64;
    fn index(&self, leaf: usize) -> &f64 {
        &self.0[leaf]
    }
}

impl IndexMut<usize> for RandomVariable {
    fn index_mut(&mut self, leaf: usize) -> &mut f64 {
        &mut self.0[leaf]
    }
}

impl From<Vec<f64>> for RandomVariable {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

/// True iff `rv` is exactly constant on every stage-`t` atom.
pub fn is_measurable(tree: &FiltrationTree, rv: &RandomVariable, t: usize) -> bool {
    if t > tree.depth() || rv.len() != tree.num_leaves() {
        return false;
    }
    tree.stage_nodes(t).iter().all(|&id| {
        let leaves = tree.node(id).leaves.clone();
        let first = rv[leaves.start];
        leaves.into_iter().all(|leaf| rv[leaf] == first)
    })
}
