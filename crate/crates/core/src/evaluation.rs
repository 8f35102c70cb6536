//! Non-linear evaluations `ρ_{S,τ}` built from node-local one-step generators.
//!
//! `ρ_{S,τ}[η]` is computed by a backward sweep: leaves carry `η`, a node whose
//! atom has already been stopped by `τ` keeps the (constant) value of `η` on
//! that atom, every other node applies the generator to its children. The
//! output at `ω` is the sweep value at the stage-`S(ω)` node on `ω`'s path.
//! Admissibility, knowledge preservation, consistency and the generalized
//! zero-one law follow from this construction for any generator; monotonicity
//! is inherited from the generator.

use schemars::JsonSchema;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stopping::StoppingTime;
use crate::tree::{normalize_probs, FiltrationTree};
use crate::variable::RandomVariable;

/// What a generator sees at one node.
#[derive(Debug, Clone, Copy)]
pub struct StepContext<'a> {
    pub node: usize,
    pub stage: usize,
    /// Transition probabilities to the children.
    pub probs: &'a [f64],
    pub dt: f64,
}

/// Maps the children's values at a node to the node's value.
pub trait Generator: Send + Sync {
    fn step(&self, ctx: &StepContext<'_>, children: &[f64]) -> Result<f64>;
}

/// Properties an operator declares about itself. The axiom harness checks them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct Claims {
    pub monotone: bool,
    pub strictly_monotone: bool,
    /// `generator(c, …, c) = c`, so `ρ_{S,τ}[η] = η` for `F_S`-measurable `η`.
    pub preserves_constants: bool,
}

impl Claims {
    const ALL: Claims = Claims {
        monotone: true,
        strictly_monotone: true,
        preserves_constants: true,
    };
}

#[derive(Clone)]
pub struct Evaluation {
    name: String,
    generator: Arc<dyn Generator>,
    claims: Claims,
    dt: f64,
}

impl fmt::Debug for Evaluation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Evaluation")
            .field("name", &self.name)
            .field("claims", &self.claims)
            .field("dt", &self.dt)
            .finish()
    }
}

impl Evaluation {
    pub fn new(name: impl Into<String>, generator: Arc<dyn Generator>, claims: Claims) -> Self {
        Self {
            name: name.into(),
            generator,
            claims,
            dt: 1.0,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn claims(&self) -> Claims {
        self.claims
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Applies the generator at a single node.
    pub fn step(&self, tree: &FiltrationTree, node: usize, children: &[f64]) -> Result<f64> {
        let n = tree.node(node);
        let ctx = StepContext {
            node,
            stage: n.stage,
            probs: &n.probs,
            dt: self.dt,
        };
        let y = self.generator.step(&ctx, children)?;
        if !y.is_finite() {
            return Err(Error::NonFinite(format!("{} at node {node}", self.name)));
        }
        Ok(y)
    }

    /// Backward sweep for the terminal time `τ` and reward `η`; returns one
    /// value per node. `η` must be `F_τ`-measurable.
    pub fn sweep(
        &self,
        tree: &FiltrationTree,
        tau: &StoppingTime,
        eta: &RandomVariable,
    ) -> Result<Vec<f64>> {
        eta.check_len(tree)?;
        if tau.stages().len() != tree.num_leaves() {
            return Err(Error::LengthMismatch {
                expected: tree.num_leaves(),
                got: tau.stages().len(),
            });
        }
        let mut values = vec![0.0; tree.num_nodes()];
        let mut buf = Vec::new();
        for t in (0..=tree.depth()).rev() {
            for &id in tree.stage_nodes(t) {
                let node = tree.node(id);
                let first = node.leaves.start;
                let stop = tau.at(first);
                if stop <= t {
                    let v = eta[first];
                    if stop == t && node.leaves.clone().any(|leaf| eta[leaf] != v) {
                        return Err(Error::NotMeasurable(format!(
                            "reward varies on the atom of node {id} where τ = {t}"
                        )));
                    }
                    values[id] = v;
                } else {
                    buf.clear();
                    buf.extend(node.children.iter().map(|&c| values[c]));
                    values[id] = self.step(tree, id, &buf)?;
                }
            }
        }
        Ok(values)
    }

    /// `ρ_{S,τ}[η]`.
    pub fn evaluate(
        &self,
        tree: &FiltrationTree,
        s: &StoppingTime,
        tau: &StoppingTime,
        eta: &RandomVariable,
    ) -> Result<RandomVariable> {
        let values = self.sweep(tree, tau, eta)?;
        Ok(read_at(tree, &values, s))
    }
}

/// Reads per-node sweep values along each scenario at the stopping time `s`.
pub fn read_at(tree: &FiltrationTree, node_values: &[f64], s: &StoppingTime) -> RandomVariable {
    RandomVariable(
        (0..tree.num_leaves())
            .map(|leaf| node_values[tree.ancestor(leaf, s.at(leaf))])
            .collect(),
    )
}

fn mean(probs: &[f64], children: &[f64]) -> f64 {
    probs
        .iter()
        .zip(children)
        .fold(0.0, |acc, (p, c)| acc + p * c)
}

fn check_arity(ctx: &StepContext<'_>, children: &[f64]) -> Result<()> {
    if ctx.probs.len() != children.len() {
        return Err(Error::LengthMismatch {
            expected: ctx.probs.len(),
            got: children.len(),
        });
    }
    Ok(())
}

struct Linear;

impl Generator for Linear {
    fn step(&self, ctx: &StepContext<'_>, children: &[f64]) -> Result<f64> {
        check_arity(ctx, children)?;
        Ok(mean(ctx.probs, children))
    }
}

/// Conditional expectation under the tree measure.
pub fn linear_expectation() -> Evaluation {
    Evaluation::new("linear", Arc::new(Linear), Claims::ALL)
}

/// Driver `g(t, y, z, p)` of a one-step g-evaluation. `z` holds the centered
/// child deviations `c_i − ȳ` and `p` the child probabilities, so the
/// probability-weighted L² norm of `z` is `sqrt(Σ p_i z_i²)`.
pub type DriverFn = dyn Fn(usize, f64, &[f64], &[f64]) -> f64 + Send + Sync;

#[derive(Clone)]
pub enum Driver {
    Zero,
    /// `g = −rate · y`.
    Discount {
        rate: f64,
    },
    /// `g = −decay · y − vol_penalty · ‖z‖`. Not monotone in general.
    LipschitzDemo {
        decay: f64,
        vol_penalty: f64,
    },
    Custom {
        name: String,
        g: Arc<DriverFn>,
    },
}

impl Driver {
    fn eval(&self, t: usize, y: f64, z: &[f64], probs: &[f64]) -> f64 {
        match self {
            Driver::Zero => 0.0,
            Driver::Discount { rate } => -rate * y,
            Driver::LipschitzDemo { decay, vol_penalty } => {
                -decay * y - vol_penalty * weighted_norm(z, probs)
            }
            Driver::Custom { g, .. } => g(t, y, z, probs),
        }
    }

    fn label(&self) -> String {
        match self {
            Driver::Zero => "zero".into(),
            Driver::Discount { rate } => format!("discount({rate})"),
            Driver::LipschitzDemo { decay, vol_penalty } => {
                format!("lipschitz_demo({decay},{vol_penalty})")
            }
            Driver::Custom { name, .. } => name.clone(),
        }
    }
}

/// `sqrt(Σ p_i z_i²)`.
pub fn weighted_norm(z: &[f64], probs: &[f64]) -> f64 {
    probs
        .iter()
        .zip(z)
        .fold(0.0, |acc, (p, zi)| acc + p * zi * zi)
        .sqrt()
}

struct GDriverStep {
    driver: Driver,
}

impl Generator for GDriverStep {
    fn step(&self, ctx: &StepContext<'_>, children: &[f64]) -> Result<f64> {
        check_arity(ctx, children)?;
        let ybar = mean(ctx.probs, children);
        let z: Vec<f64> = children.iter().map(|c| c - ybar).collect();
        let g = self.driver.eval(ctx.stage, ybar, &z, ctx.probs);
        if !g.is_finite() {
            return Err(Error::NonFinite(format!("driver at node {}", ctx.node)));
        }
        // a zero correction must leave ȳ bit-identical (−0.0 + 0.0 is +0.0)
        Ok(if g == 0.0 { ybar } else { ybar + ctx.dt * g })
    }
}

/// One-step g-evaluation: `y = ȳ + Δt · g(t, ȳ, z)` with `ȳ` the conditional
/// mean of the children. Freezing at `τ` implements the stopped driver.
pub fn g_driver_evaluation(driver: Driver, dt: f64) -> Result<Evaluation> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidOperator(format!(
            "Δt must be positive, got {dt}"
        )));
    }
    let claims = match &driver {
        Driver::Zero => Claims::ALL,
        Driver::Discount { rate } => {
            let factor = 1.0 - rate * dt;
            Claims {
                monotone: factor >= 0.0,
                strictly_monotone: factor > 0.0,
                preserves_constants: *rate == 0.0,
            }
        }
        Driver::LipschitzDemo { .. } | Driver::Custom { .. } => Claims {
            monotone: false,
            strictly_monotone: false,
            preserves_constants: false,
        },
    };
    let name = format!("g_driver[{}]", driver.label());
    Ok(Evaluation::new(name, Arc::new(GDriverStep { driver }), claims).with_dt(dt))
}

struct Entropic {
    gamma: f64,
}

impl Generator for Entropic {
    fn step(&self, ctx: &StepContext<'_>, children: &[f64]) -> Result<f64> {
        check_arity(ctx, children)?;
        let low = children.iter().copied().fold(f64::INFINITY, f64::min);
        let sum = ctx
            .probs
            .iter()
            .zip(children)
            .fold(0.0, |acc, (p, c)| acc + p * (-self.gamma * (c - low)).exp());
        Ok(low - sum.ln() / self.gamma)
    }
}

/// Entropic utility `−γ⁻¹ ln E[exp(−γ η) | F_S]`, one step at a time.
pub fn entropic_utility(gamma: f64) -> Result<Evaluation> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidOperator(format!(
            "γ must be positive, got {gamma}"
        )));
    }
    Ok(Evaluation::new(
        format!("entropic({gamma})"),
        Arc::new(Entropic { gamma }),
        Claims::ALL,
    ))
}

/// One alternative transition vector and its penalty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Candidate {
    pub probs: Vec<f64>,
    #[serde(default)]
    pub penalty: f64,
}

/// Node-wise ambiguity sets. The tree's own transition vector is always a
/// candidate with zero penalty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Ambiguity {
    /// Explicit extra candidates per node id; unlisted nodes use the reference only.
    PerNode {
        nodes: BTreeMap<usize, Vec<Candidate>>,
    },
    /// One extra candidate per node with `q_i ∝ p_i exp(tilt · u_i)`, where `u_i`
    /// runs linearly from `+1/2` (first child) to `−1/2` (last child), charged
    /// `penalty`. Nodes with a single child only have the reference.
    Tilted { tilt: f64, penalty: f64 },
}

impl Ambiguity {
    fn validate(&self) -> Result<Self> {
        match self {
            Ambiguity::PerNode { nodes } => {
                let mut clean = BTreeMap::new();
                for (&id, list) in nodes {
                    let mut out = Vec::with_capacity(list.len());
                    for cand in list {
                        let probs = normalize_probs(&cand.probs).map_err(|msg| {
                            Error::InvalidOperator(format!("ambiguity at node {id}: {msg}"))
                        })?;
                        if !(cand.penalty.is_finite() && cand.penalty >= 0.0) {
                            return Err(Error::InvalidOperator(format!(
                                "penalty at node {id} must be finite and ≥ 0"
                            )));
                        }
                        out.push(Candidate {
                            probs,
                            penalty: cand.penalty,
                        });
                    }
                    clean.insert(id, out);
                }
                Ok(Ambiguity::PerNode { nodes: clean })
            }
            Ambiguity::Tilted { tilt, penalty } => {
                if !tilt.is_finite() || !(penalty.is_finite() && *penalty >= 0.0) {
                    return Err(Error::InvalidOperator(
                        "tilt must be finite and penalty finite and ≥ 0".into(),
                    ));
                }
                Ok(self.clone())
            }
        }
    }

    /// Candidates at a node, reference first.
    pub fn candidates(&self, node: usize, reference: &[f64]) -> Vec<Candidate> {
        let mut out = vec![Candidate {
            probs: reference.to_vec(),
            penalty: 0.0,
        }];
        match self {
            Ambiguity::PerNode { nodes } => {
                if let Some(list) = nodes.get(&node) {
                    out.extend(list.iter().cloned());
                }
            }
            Ambiguity::Tilted { tilt, penalty } => {
                let m = reference.len();
                if m >= 2 {
                    let raw: Vec<f64> = reference
                        .iter()
                        .enumerate()
                        .map(|(i, p)| p * (tilt * (0.5 - i as f64 / (m - 1) as f64)).exp())
                        .collect();
                    let sum: f64 = raw.iter().sum();
                    out.push(Candidate {
                        probs: raw.iter().map(|q| q / sum).collect(),
                        penalty: *penalty,
                    });
                }
            }
        }
        out
    }
}

struct Robust {
    ambiguity: Ambiguity,
}

impl Generator for Robust {
    fn step(&self, ctx: &StepContext<'_>, children: &[f64]) -> Result<f64> {
        check_arity(ctx, children)?;
        let mut best = f64::INFINITY;
        for cand in self.ambiguity.candidates(ctx.node, ctx.probs) {
            if cand.probs.len() != children.len() {
                return Err(Error::InvalidOperator(format!(
                    "ambiguity vector of length {} at node {} with {} children",
                    cand.probs.len(),
                    ctx.node,
                    children.len()
                )));
            }
            best = best.min(mean(&cand.probs, children) + cand.penalty);
        }
        Ok(best)
    }
}

/// Worst case over node-wise candidate measures plus penalty:
/// `y = min_q (Σ q_i c_i + penalty(q))`.
pub fn robust_expectation(ambiguity: Ambiguity) -> Result<Evaluation> {
    let ambiguity = ambiguity.validate()?;
    let name = match &ambiguity {
        Ambiguity::PerNode { nodes } => format!("robust(per_node:{})", nodes.len()),
        Ambiguity::Tilted { tilt, penalty } => format!("robust(tilt={tilt},penalty={penalty})"),
    };
    Ok(Evaluation::new(
        name,
        Arc::new(Robust { ambiguity }),
        Claims::ALL,
    ))
}

struct SquareOfMean;

impl Generator for SquareOfMean {
    fn step(&self, ctx: &StepContext<'_>, children: &[f64]) -> Result<f64> {
        check_arity(ctx, children)?;
        let m = mean(ctx.probs, children);
        Ok(m * m)
    }
}

/// Deliberately broken operator `(Σ p_i c_i)²` that claims the properties of
/// an expectation. Used to exercise the axiom harness.
pub fn square_of_mean() -> Evaluation {
    Evaluation::new(
        "square_of_mean",
        Arc::new(SquareOfMean),
        Claims {
            monotone: true,
            strictly_monotone: false,
            preserves_constants: true,
        },
    )
}

/// Operator selection as it appears in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    Linear,
    GDriver {
        driver: DriverKind,
        #[serde(default)]
        rate: f64,
        #[serde(default)]
        decay: f64,
        #[serde(default)]
        vol_penalty: f64,
        #[serde(default = "default_dt")]
        dt: f64,
    },
    Entropic {
        gamma: f64,
    },
    Robust {
        ambiguity: Ambiguity,
    },
    SquareOfMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum DriverKind {
    Zero,
    Discount,
    LipschitzDemo,
}

fn default_dt() -> f64 {
    1.0
}

impl OperatorSpec {
    pub fn build(&self) -> Result<Evaluation> {
        match self {
            OperatorSpec::Linear => Ok(linear_expectation()),
            OperatorSpec::GDriver {
                driver,
                rate,
                decay,
                vol_penalty,
                dt,
            } => {
                let driver = match driver {
                    DriverKind::Zero => Driver::Zero,
                    DriverKind::Discount => Driver::Discount { rate: *rate },
                    DriverKind::LipschitzDemo => Driver::LipschitzDemo {
                        decay: *decay,
                        vol_penalty: *vol_penalty,
                    },
                };
                g_driver_evaluation(driver, *dt)
            }
            OperatorSpec::Entropic { gamma } => entropic_utility(*gamma),
            OperatorSpec::Robust { ambiguity } => robust_expectation(ambiguity.clone()),
            OperatorSpec::SquareOfMean => Ok(square_of_mean()),
        }
    }
}
