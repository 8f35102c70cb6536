//! Experiment configuration files.

use schemars::JsonSchema;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::axioms::AxiomOptions;
use crate::corpus::CorpusBounds;
use crate::error::{Error, Result};
use crate::evaluation::OperatorSpec;
use crate::snell::{payoff_family, ValueFamily};
use crate::stopping::{AdaptedProcess, BermudanGrid, DEFAULT_CAP};
use crate::tree::{build_tree, FiltrationTree, TreeSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridSpec {
    /// `θ_k ≡ stages[k]`.
    Deterministic { stages: Vec<usize> },
    /// `thetas[k][leaf]` is the stage of `θ_k` in that scenario.
    PerLeaf { thetas: Vec<Vec<usize>> },
}

impl GridSpec {
    pub fn build(&self, tree: &FiltrationTree) -> Result<BermudanGrid> {
        match self {
            GridSpec::Deterministic { stages } => BermudanGrid::deterministic(tree, stages),
            GridSpec::PerLeaf { thetas } => BermudanGrid::from_stage_lists(tree, thetas.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum OptionStyle {
    Call,
    Put,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PayoffSpec {
    /// One value per node, breadth-first.
    NodeValues { values: Vec<f64> },
    /// `table[t][leaf]`; must be constant on stage-`t` atoms.
    StageTable { table: Vec<Vec<f64>> },
    /// `max(x − K, 0)` or `max(K − x, 0)` on the state `x` of a multiplicative
    /// lattice: the root has state `spot` and child `i` multiplies its
    /// parent's state by `factors[i]`.
    Lattice {
        spot: f64,
        factors: Vec<f64>,
        strike: f64,
        style: OptionStyle,
    },
}

impl PayoffSpec {
    pub fn build(&self, tree: &FiltrationTree) -> Result<AdaptedProcess> {
        match self {
            PayoffSpec::NodeValues { values } => {
                AdaptedProcess::from_node_values(tree, values.clone())
            }
            PayoffSpec::StageTable { table } => AdaptedProcess::from_stage_table(tree, table),
            PayoffSpec::Lattice {
                spot,
                factors,
                strike,
                style,
            } => {
                let mut state = vec![0.0; tree.num_nodes()];
                state[0] = *spot;
                for (id, node) in tree.nodes().iter().enumerate() {
                    if node.children.len() > factors.len() {
                        return Err(Error::Config(format!(
                            "node {id} has {} children but only {} lattice factors are given",
                            node.children.len(),
                            factors.len()
                        )));
                    }
                    for (i, &c) in node.children.iter().enumerate() {
                        state[c] = state[id] * factors[i];
                    }
                }
                let values = state
                    .iter()
                    .map(|x| match style {
                        OptionStyle::Call => (x - strike).max(0.0),
                        OptionStyle::Put => (strike - x).max(0.0),
                    })
                    .collect();
                AdaptedProcess::from_node_values(tree, values)
            }
        }
    }
}

/// Checks the runner can perform on a configured instance.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, JsonSchema,
)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// Backward envelope equals the brute-force value and `ρ[ξ(ν_k)]`.
    Oracle,
    /// DPP residuals of the oracle value (≤ tol) and the envelope (exactly 0).
    Dpp,
    StrictValue,
    Supermartingale,
    /// The value family is a martingale (not expected in general).
    Martingale,
    StoppedSupermartingale,
    StoppedIdentities,
    Minimality,
    Optimality,
    ValueAdmissibility,
    PairwiseMax,
    Domination,
    HittingValue,
    Axioms,
}

impl Check {
    pub const DEFAULT: [Check; 12] = [
        Check::Oracle,
        Check::Dpp,
        Check::StrictValue,
        Check::Supermartingale,
        Check::StoppedSupermartingale,
        Check::StoppedIdentities,
        Check::Minimality,
        Check::Optimality,
        Check::ValueAdmissibility,
        Check::PairwiseMax,
        Check::Domination,
        Check::HittingValue,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Oracle => "oracle",
            Check::Dpp => "dpp",
            Check::StrictValue => "strict_value",
            Check::Supermartingale => "supermartingale",
            Check::Martingale => "martingale",
            Check::StoppedSupermartingale => "stopped_supermartingale",
            Check::StoppedIdentities => "stopped_identities",
            Check::Minimality => "minimality",
            Check::Optimality => "optimality",
            Check::ValueAdmissibility => "value_admissibility",
            Check::PairwiseMax => "pairwise_max",
            Check::Domination => "domination",
            Check::HittingValue => "hitting_value",
            Check::Axioms => "axioms",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub first_seed: u64,
    pub instances: usize,
    #[serde(default)]
    pub bounds: CorpusBounds,
    #[serde(default = "default_majorants")]
    pub majorants: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    /// Instance; required by every command except `sweep` and `axioms`.
    #[serde(default)]
    pub tree: Option<TreeSpec>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub payoff: Option<PayoffSpec>,
    pub operators: Vec<OperatorSpec>,
    /// Checks for `verify`; defaults to [`Check::DEFAULT`].
    #[serde(default)]
    pub checks: Option<Vec<Check>>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_cap")]
    pub cap: u128,
    /// Random majorants per instance for the minimality check.
    #[serde(default = "default_majorants")]
    pub majorants: usize,
    /// Random strategy pairs for the value admissibility check.
    #[serde(default = "default_pairs")]
    pub admissibility_pairs: usize,
    #[serde(default)]
    pub axioms: Option<AxiomOptions>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

fn default_tol() -> f64 {
    crate::EQ_TOL
}
fn default_cap() -> u128 {
    DEFAULT_CAP
}
fn default_majorants() -> usize {
    100
}
fn default_pairs() -> usize {
    20
}

/// A configured tree, grid and pay-off family.
#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub tree: FiltrationTree,
    pub grid: BermudanGrid,
    pub process: AdaptedProcess,
    pub payoff: ValueFamily,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(Error::Config(format!(
                "tol must be finite and ≥ 0, got {}",
                self.tol
            )));
        }
        if self.operators.is_empty() {
            return Err(Error::Config("at least one operator is required".into()));
        }
        for op in &self.operators {
            op.build()?;
        }
        let given = [
            self.tree.is_some(),
            self.grid.is_some(),
            self.payoff.is_some(),
        ];
        if given.iter().any(|&g| g) && !given.iter().all(|&g| g) {
            return Err(Error::Config(
                "tree, grid and payoff must be given together".into(),
            ));
        }
        if given[0] {
            self.instance()?;
        }
        Ok(())
    }

    pub fn has_instance(&self) -> bool {
        self.tree.is_some()
    }

    /// Builds the configured instance, checking all dimensions.
    pub fn instance(&self) -> Result<LoadedInstance> {
        let (Some(tree), Some(grid), Some(payoff)) = (&self.tree, &self.grid, &self.payoff) else {
            return Err(Error::Config(
                "this command needs tree, grid and payoff".into(),
            ));
        };
        let tree = build_tree(tree)?;
        let grid = grid.build(&tree)?;
        let process = payoff.build(&tree)?;
        let payoff = payoff_family(&tree, &process, &grid);
        Ok(LoadedInstance {
            tree,
            grid,
            process,
            payoff,
        })
    }

    pub fn checks(&self) -> Vec<Check> {
        self.checks
            .clone()
            .unwrap_or_else(|| Check::DEFAULT.to_vec())
    }
}
