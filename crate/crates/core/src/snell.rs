//! Value families, the backward-induction envelope, the strict value, the DPP
//! residual and the first hitting time of the pay-off.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::Evaluation;
use crate::stopping::{is_measurable_at_time, AdaptedProcess, BermudanGrid, ThetaStrategy};
use crate::tree::FiltrationTree;
use crate::variable::RandomVariable;

/// One random variable per grid index, `φ(θ_0), …, φ(θ_n)`, extended to any
/// strategy by `φ(τ)(ω) = φ(θ_{k(ω)})(ω)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValueFamily {
    values: Vec<RandomVariable>,
}

impl ValueFamily {
    /// Builds a family after checking `φ(θ_k) ∈ F_{θ_k}` for every `k`.
    pub fn new(
        tree: &FiltrationTree,
        grid: &BermudanGrid,
        values: Vec<RandomVariable>,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        for (k, v) in values.iter().enumerate() {
            v.check_len(tree)?;
            if !is_measurable_at_time(tree, v, grid.theta(k)) {
                return Err(Error::NotMeasurable(format!(
                    "φ(θ_{k}) is not F_θ_{k}-measurable"
                )));
            }
        }
        Ok(Self { values })
    }

    pub(crate) fn from_raw(values: Vec<RandomVariable>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, k: usize) -> &RandomVariable {
        &self.values[k]
    }

    pub fn values(&self) -> &[RandomVariable] {
        &self.values
    }

    pub fn sample(&self, tau: &ThetaStrategy) -> RandomVariable {
        RandomVariable(
            tau.index()
                .iter()
                .enumerate()
                .map(|(leaf, &k)| self.values[k][leaf])
                .collect(),
        )
    }

    /// Largest `|φ(θ_k) − φ(θ_{k+1})|` on `{θ_k = θ_{k+1}}`.
    pub fn overlap_gap(&self, grid: &BermudanGrid) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..grid.last() {
            for leaf in 0..self.values[k].len() {
                if grid.stage(k, leaf) == grid.stage(k + 1, leaf) {
                    worst = worst.max((self.values[k][leaf] - self.values[k + 1][leaf]).abs());
                }
            }
        }
        worst
    }

    /// Largest pointwise difference to another family.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    pub fn shifted(&self, k: usize, delta: f64) -> Self {
        let mut out = self.clone();
        out.values[k] = out.values[k].map(|v| v + delta);
        out
    }
}

/// `ξ(θ_k)(ω) = ξ_{θ_k(ω)}(ω)`.
pub fn payoff_family(
    tree: &FiltrationTree,
    process: &AdaptedProcess,
    grid: &BermudanGrid,
) -> ValueFamily {
    ValueFamily::from_raw(
        grid.thetas()
            .iter()
            .map(|theta| process.sample(tree, theta))
            .collect(),
    )
}

/// `ρ_{θ_k,θ_{k+1}}[φ(θ_{k+1})]`.
pub fn one_step(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    k: usize,
    family: &ValueFamily,
    op: &Evaluation,
) -> Result<RandomVariable> {
    op.evaluate(tree, grid.theta(k), grid.theta(k + 1), family.at(k + 1))
}

/// Backward induction `U(θ_n) = ξ(θ_n)`,
/// `U(θ_k) = max(ξ(θ_k), ρ_{θ_k,θ_{k+1}}[U(θ_{k+1})])`.
pub fn snell_backward(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    payoff: &ValueFamily,
    op: &Evaluation,
) -> Result<ValueFamily> {
    if !op.claims().monotone {
        log::warn!(
            "operator {} is not declared monotone; the backward family need not be the Snell envelope",
            op.name()
        );
    }
    let n = grid.last();
    let mut values = vec![RandomVariable(Vec::new()); n + 1];
    values[n] = payoff.at(n).clone();
    for k in (0..n).rev() {
        let cont = op.evaluate(tree, grid.theta(k), grid.theta(k + 1), &values[k + 1])?;
        values[k] = payoff.at(k).pointwise_max(&cont);
    }
    Ok(ValueFamily::from_raw(values))
}

/// `M(θ_k) = ρ_{θ_k,θ_n}[η]` for an `F_{θ_n}`-measurable `η`; a martingale
/// under every generated evaluation.
pub fn make_rho_martingale(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    eta: &RandomVariable,
    op: &Evaluation,
) -> Result<ValueFamily> {
    let sweep = op.sweep(tree, grid.theta(grid.last()), eta)?;
    Ok(ValueFamily::from_raw(
        grid.thetas()
            .iter()
            .map(|theta| crate::evaluation::read_at(tree, &sweep, theta))
            .collect(),
    ))
}

/// `V⁺(θ_k) = ρ_{θ_k,θ_{k+1}}[V(θ_{k+1})]`.
pub fn strict_value(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    k: usize,
    value: &ValueFamily,
    op: &Evaluation,
) -> Result<RandomVariable> {
    if k >= grid.last() {
        return Err(Error::InvalidGrid(format!(
            "strict value needs k < n = {}, got {k}",
            grid.last()
        )));
    }
    one_step(tree, grid, k, value, op)
}

/// Largest deviation of `family` from the dynamic programming equations.
pub fn dpp_residual(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    payoff: &ValueFamily,
    family: &ValueFamily,
    op: &Evaluation,
) -> Result<f64> {
    let n = grid.last();
    let mut worst = family.at(n).max_abs_diff(payoff.at(n));
    for k in 0..n {
        let cont = one_step(tree, grid, k, family, op)?;
        worst = worst.max(
            family
                .at(k)
                .max_abs_diff(&payoff.at(k).pointwise_max(&cont)),
        );
    }
    Ok(worst)
}

/// `ν_k(ω) = θ_l(ω)` for the smallest `l ≥ k` with `|U(θ_l) − ξ(θ_l)| ≤ tol`.
pub fn hitting_time(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    k: usize,
    value: &ValueFamily,
    payoff: &ValueFamily,
    tol: f64,
) -> Result<ThetaStrategy> {
    let index = (0..tree.num_leaves())
        .map(|leaf| {
            (k..=grid.last())
                .find(|&l| (value.at(l)[leaf] - payoff.at(l)[leaf]).abs() <= tol)
                .ok_or(Error::NoHittingIndex(leaf))
        })
        .collect::<Result<Vec<_>>>()?;
    ThetaStrategy::from_index(tree, grid, index)
}

/// A stop/continue decision whose gap `|U − ξ|` lies within ten tolerances of
/// the equality threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Borderline {
    pub leaf: usize,
    pub grid_index: usize,
    pub gap: f64,
}

/// Decisions of [`hitting_time`] that a slightly different tolerance could flip:
/// nonzero gaps at most `10 · tol` at the indices the search visited.
pub fn borderline_decisions(
    grid: &BermudanGrid,
    k: usize,
    value: &ValueFamily,
    payoff: &ValueFamily,
    hit: &ThetaStrategy,
    tol: f64,
) -> Vec<Borderline> {
    let mut out = Vec::new();
    for (leaf, &chosen) in hit.index().iter().enumerate() {
        for l in k..=chosen.min(grid.last()) {
            let gap = (value.at(l)[leaf] - payoff.at(l)[leaf]).abs();
            if gap > 0.0 && gap <= 10.0 * tol {
                out.push(Borderline {
                    leaf,
                    grid_index: l,
                    gap,
                });
            }
        }
    }
    out
}
