//! Brute-force oracle and exhaustive checks of the stopping theory.
//!
//! Everything here enumerates the strategy set explicitly. The essential
//! supremum over a finite set of strategies on a finite probability space is a
//! pointwise maximum, so the oracle value is exact up to floating point.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{random_process, rng};
use crate::error::Result;
use crate::evaluation::{read_at, Evaluation};
use crate::report::{combine, CheckReport, Status, Tally};
use crate::snell::{dpp_residual, hitting_time, one_step, snell_backward, ValueFamily};
use crate::stopping::{
    canonical_partition, enumerate_from, event_in_sigma_at, BermudanGrid, Event, ThetaStrategy,
};
use crate::tree::FiltrationTree;
use crate::variable::RandomVariable;

/// Shared knobs for the exhaustive checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub tol: f64,
    pub cap: u128,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tol: crate::EQ_TOL,
            cap: crate::stopping::DEFAULT_CAP,
        }
    }
}

/// `V(θ_k)` together with one strategy attaining it in every scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleValue {
    pub value: RandomVariable,
    pub strategy: ThetaStrategy,
}

/// Strategies of `Θ` with their sweep of `ρ_{·,τ}[ξ(τ)]` cached.
struct Sweeps<'a> {
    tree: &'a FiltrationTree,
    strategies: Vec<ThetaStrategy>,
    node_values: Vec<Vec<f64>>,
}

impl<'a> Sweeps<'a> {
    fn new(
        tree: &'a FiltrationTree,
        strategies: Vec<ThetaStrategy>,
        family: impl Fn(&ThetaStrategy) -> RandomVariable,
        op: &Evaluation,
    ) -> Result<Self> {
        let node_values = strategies
            .iter()
            .map(|tau| op.sweep(tree, tau.time(), &family(tau)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            tree,
            strategies,
            node_values,
        })
    }

    fn read(&self, i: usize, s: &crate::stopping::StoppingTime) -> RandomVariable {
        read_at(self.tree, &self.node_values[i], s)
    }
}

/// Left fold of concatenations over candidate strategies: keeps the earlier
/// strategy wherever it is at least as good.
fn fold_best(
    tree: &FiltrationTree,
    candidates: impl Iterator<Item = (ThetaStrategy, RandomVariable)>,
) -> Result<Option<OracleValue>> {
    let mut best: Option<OracleValue> = None;
    for (tau, value) in candidates {
        best = Some(match best {
            None => OracleValue {
                value,
                strategy: tau,
            },
            Some(cur) => {
                let keep = Event(
                    value
                        .iter()
                        .zip(cur.value.iter())
                        .map(|(new, old)| new <= old)
                        .collect(),
                );
                let strategy = ThetaStrategy::concatenate(tree, &cur.strategy, &tau, &keep)?;
                OracleValue {
                    value: cur.value.pointwise_max(&value),
                    strategy,
                }
            }
        });
    }
    Ok(best)
}

/// `V(θ_k) = max_{τ ∈ Θ_{θ_k}} ρ_{θ_k,τ}[ξ(τ)]` by enumeration.
pub fn oracle_value(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    k: usize,
    payoff: &ValueFamily,
    op: &Evaluation,
    cap: u128,
) -> Result<OracleValue> {
    let theta = grid.theta(k);
    let strategies = enumerate_from(tree, grid, k, cap)?;
    let mut evaluated = Vec::with_capacity(strategies.len());
    for tau in strategies {
        let v = op.evaluate(tree, theta, tau.time(), &payoff.sample(&tau))?;
        evaluated.push((tau, v));
    }
    Ok(fold_best(tree, evaluated.into_iter())?.expect("Θ_θk always contains θ_n"))
}

/// The oracle value family `V(θ_0), …, V(θ_n)` with attaining strategies.
pub fn oracle_family(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    payoff: &ValueFamily,
    op: &Evaluation,
    cap: u128,
) -> Result<(ValueFamily, Vec<ThetaStrategy>)> {
    let all = enumerate_from(tree, grid, 0, cap)?;
    let sweeps = Sweeps::new(tree, all, |tau| payoff.sample(tau), op)?;
    let mut values = Vec::with_capacity(grid.len());
    let mut attaining = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let theta = grid.theta(k);
        let cands = sweeps
            .strategies
            .iter()
            .enumerate()
            .filter(|(_, tau)| tau.is_after(grid, k))
            .map(|(i, tau)| (tau.clone(), sweeps.read(i, theta)));
        let best = fold_best(tree, cands)?.expect("Θ_θk always contains θ_n");
        values.push(best.value);
        attaining.push(best.strategy);
    }
    Ok((ValueFamily::from_raw(values), attaining))
}

/// `V(ν) = max_{τ ≥ ν} ρ_{ν,τ}[ξ(τ)]` for an arbitrary strategy `ν`.
pub fn oracle_value_at(
    tree: &FiltrationTree,
    strategies: &[ThetaStrategy],
    nu: &ThetaStrategy,
    payoff: &ValueFamily,
    op: &Evaluation,
) -> Result<RandomVariable> {
    let mut best: Option<RandomVariable> = None;
    for tau in strategies.iter().filter(|t| nu.time().le(t.time())) {
        let v = op.evaluate(tree, nu.time(), tau.time(), &payoff.sample(tau))?;
        best = Some(match best {
            None => v,
            Some(b) => b.pointwise_max(&v),
        });
    }
    Ok(best.expect("ν itself is in Θ_ν"))
}

/// Which identity a pair check asserts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PairMode {
    Super,
    Martingale,
}

/// `ρ_{σ,τ}[φ(τ)] ≤ φ(σ)` (or `=`) for every `σ ≤ τ` in `strategies`.
fn check_pairs(
    name: &str,
    tree: &FiltrationTree,
    strategies: &[ThetaStrategy],
    family: impl Fn(&ThetaStrategy) -> RandomVariable,
    op: &Evaluation,
    mode: PairMode,
    tol: f64,
) -> Result<CheckReport> {
    let values: Vec<RandomVariable> = strategies.iter().map(&family).collect();
    let mut tally = Tally::new(name, tol);
    let mut pairs = 0u64;
    for (j, tau) in strategies.iter().enumerate() {
        let sweep = op.sweep(tree, tau.time(), &values[j])?;
        for (i, sigma) in strategies.iter().enumerate() {
            if !sigma.time().le(tau.time()) {
                continue;
            }
            pairs += 1;
            let lhs = read_at(tree, &sweep, sigma.time());
            let detail = || format!("σ = {:?}, τ = {:?}", sigma.stages(), tau.stages());
            match mode {
                PairMode::Super => tally.le(&lhs, &values[i], detail),
                PairMode::Martingale => tally.eq(&lhs, &values[i], detail),
            }
        }
    }
    tally.note(format!(
        "{} strategies, {pairs} ordered pairs",
        strategies.len()
    ));
    Ok(tally.finish())
}

/// Exhaustive (Θ,ρ)-supermartingale (or martingale) check of a family.
pub fn check_supermartingale(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    family: &ValueFamily,
    op: &Evaluation,
    martingale: bool,
    opts: VerifyOptions,
) -> Result<CheckReport> {
    let all = enumerate_from(tree, grid, 0, opts.cap)?;
    let (name, mode) = if martingale {
        ("martingale", PairMode::Martingale)
    } else {
        ("supermartingale", PairMode::Super)
    };
    check_pairs(
        name,
        tree,
        &all,
        |tau| family.sample(tau),
        op,
        mode,
        opts.tol,
    )
}

/// `U` is a supermartingale dominating `ξ`, and random supermartingale
/// majorants (envelopes of `ξ` plus nonnegative adapted noise) dominate `U`.
#[allow(clippy::too_many_arguments)]
pub fn check_snell_minimality(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    payoff: &ValueFamily,
    op: &Evaluation,
    envelope: &ValueFamily,
    trials: usize,
    seed: u64,
    opts: VerifyOptions,
) -> Result<CheckReport> {
    let mut parts = vec![check_supermartingale(
        tree, grid, envelope, op, false, opts,
    )?];
    let mut dom = Tally::new("dominates payoff", opts.tol);
    for k in 0..grid.len() {
        dom.le(payoff.at(k), envelope.at(k), || format!("k = {k}"));
    }
    parts.push(dom.finish());
    let mut minimal = Tally::new("majorants dominate envelope", opts.tol);
    let mut r = rng(seed);
    for trial in 0..trials {
        let scale = r.gen_range(0.0..2.0);
        let noise = random_process(tree, 0.0, scale, &mut r);
        let bumped = ValueFamily::from_raw(
            (0..grid.len())
                .map(|k| {
                    let extra = noise.sample(tree, grid.theta(k));
                    RandomVariable(
                        payoff
                            .at(k)
                            .iter()
                            .zip(extra.iter())
                            .map(|(a, b)| a + b)
                            .collect(),
                    )
                })
                .collect(),
        );
        let majorant = snell_backward(tree, grid, &bumped, op)?;
        for k in 0..grid.len() {
            minimal.le(envelope.at(k), majorant.at(k), || {
                format!("trial {trial}, k = {k}")
            });
        }
    }
    parts.push(minimal.finish());
    Ok(combine("snell minimality", parts))
}

/// Result of [`check_optimality`]: one report per assertion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalityReport {
    pub k: usize,
    pub hitting_stages: Vec<usize>,
    pub optimal_strategies: usize,
    pub checks: Vec<CheckReport>,
}

impl OptimalityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckReport::passed)
    }
}

/// Optimality of the hitting time `ν_k` and the criterion of conditions
/// i) `ρ_{θ_k,ν}[V(ν)] = ρ_{θ_k,ν}[ξ(ν)]` and ii) `V` is a martingale on the
/// stochastic interval `[θ_k, ν]`, i.e. over all pairs `θ_k ≤ σ ≤ τ ≤ ν`. With `strict_op` the converse is checked for every optimal
/// strategy; otherwise violations of ii) among optimal strategies are only
/// counted in a note.
pub fn check_optimality(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    k: usize,
    payoff: &ValueFamily,
    op: &Evaluation,
    strict_op: bool,
    opts: VerifyOptions,
) -> Result<OptimalityReport> {
    Solved::new(tree, grid, payoff, op, opts)?.optimality(k, strict_op)
}

/// Envelope, oracle value and the full strategy set of one instance, computed
/// once and shared by the checks.
pub struct Solved<'a> {
    pub tree: &'a FiltrationTree,
    pub grid: &'a BermudanGrid,
    pub payoff: &'a ValueFamily,
    pub op: &'a Evaluation,
    pub opts: VerifyOptions,
    pub envelope: ValueFamily,
    pub value: ValueFamily,
    /// Strategy attaining `V(θ_k)` in every scenario, per `k`.
    pub attaining: Vec<ThetaStrategy>,
    /// All of `Θ`, in enumeration order.
    pub all: Vec<ThetaStrategy>,
}

impl<'a> Solved<'a> {
    pub fn new(
        tree: &'a FiltrationTree,
        grid: &'a BermudanGrid,
        payoff: &'a ValueFamily,
        op: &'a Evaluation,
        opts: VerifyOptions,
    ) -> Result<Self> {
        let envelope = snell_backward(tree, grid, payoff, op)?;
        let all = enumerate_from(tree, grid, 0, opts.cap)?;
        let (value, attaining) = oracle_family(tree, grid, payoff, op, opts.cap)?;
        Ok(Self {
            tree,
            grid,
            payoff,
            op,
            opts,
            envelope,
            value,
            attaining,
            all,
        })
    }

    /// `Θ_{θ_k}` as a filter of `Θ`.
    pub fn from_k(&self, k: usize) -> Vec<ThetaStrategy> {
        self.all
            .iter()
            .filter(|tau| tau.is_after(self.grid, k))
            .cloned()
            .collect()
    }

    pub fn hitting(&self, k: usize) -> Result<ThetaStrategy> {
        hitting_time(
            self.tree,
            self.grid,
            k,
            &self.envelope,
            self.payoff,
            self.opts.tol,
        )
    }

    /// See [`check_value_admissibility`].
    pub fn value_admissibility(&self, pairs: usize, seed: u64) -> Result<CheckReport> {
        value_admissibility(
            self.tree,
            self.grid,
            self.payoff,
            self.op,
            &self.all,
            &self.value,
            pairs,
            seed,
            self.opts.tol,
        )
    }

    /// See [`check_optimality`].
    pub fn optimality(&self, k: usize, strict_op: bool) -> Result<OptimalityReport> {
        let (tree, grid, payoff, op) = (self.tree, self.grid, self.payoff, self.op);
        let tol = self.opts.tol;
        let theta = grid.theta(k);
        let envelope = &self.envelope;
        let value = &self.value;
        let nu = self.hitting(k)?;
        let from_k = self.from_k(k);

        let mut checks = Vec::new();

        let mut t1 = Tally::new("U(θ_k) = V(θ_k)", tol);
        t1.eq(envelope.at(k), value.at(k), || format!("k = {k}"));
        checks.push(t1.finish());

        let mut t2 = Tally::new("ρ[ξ(ν_k)] = V(θ_k)", tol);
        let at_nu = op.evaluate(tree, theta, nu.time(), &payoff.sample(&nu))?;
        t2.eq(&at_nu, value.at(k), || format!("ν_k = {:?}", nu.stages()));
        checks.push(t2.finish());

        checks.push(condition_i(
            "condition i) at ν_k",
            tree,
            grid,
            k,
            &nu,
            value,
            payoff,
            op,
            tol,
        )?);
        checks.push(condition_ii(
            "condition ii) at ν_k",
            tree,
            &from_k,
            &nu,
            value,
            op,
            tol,
        )?);

        // every strategy attaining the value in all scenarios
        let optimal: Vec<&ThetaStrategy> = {
            let mut out = Vec::new();
            for tau in &from_k {
                let v = op.evaluate(tree, theta, tau.time(), &payoff.sample(tau))?;
                if v.max_abs_diff(value.at(k)) <= tol {
                    out.push(tau);
                }
            }
            out
        };
        let mut converse = Vec::new();
        let mut violations = 0usize;
        for tau in &optimal {
            let i = condition_i("converse i)", tree, grid, k, tau, value, payoff, op, tol)?;
            let ii = condition_ii("converse ii)", tree, &from_k, tau, value, op, tol)?;
            if !(i.passed() && ii.passed()) {
                violations += 1;
            }
            converse.push(i);
            converse.push(ii);
        }
        let mut report = if strict_op {
            combine("converse (strict operator)", converse)
        } else {
            let mut r = combine("converse (not required)", Vec::new());
            r.status = Status::Pass;
            r
        };
        let note = format!(
            "{} optimal strategies, {violations} violate i) or ii)",
            optimal.len()
        );
        report.note = Some(match report.note.take() {
            Some(n) => format!("{note}; {n}"),
            None => note,
        });
        checks.push(report);

        Ok(OptimalityReport {
            k,
            hitting_stages: nu.stages().to_vec(),
            optimal_strategies: optimal.len(),
            checks,
        })
    }
}

#[allow(clippy::too_many_arguments)]
fn condition_i(
    name: &str,
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    k: usize,
    tau: &ThetaStrategy,
    value: &ValueFamily,
    payoff: &ValueFamily,
    op: &Evaluation,
    tol: f64,
) -> Result<CheckReport> {
    let theta = grid.theta(k);
    let lhs = op.evaluate(tree, theta, tau.time(), &value.sample(tau))?;
    let rhs = op.evaluate(tree, theta, tau.time(), &payoff.sample(tau))?;
    let mut t = Tally::new(name, tol);
    t.eq(&lhs, &rhs, || format!("τ = {:?}", tau.stages()));
    Ok(t.finish())
}

fn condition_ii(
    name: &str,
    tree: &FiltrationTree,
    from_k: &[ThetaStrategy],
    tau: &ThetaStrategy,
    value: &ValueFamily,
    op: &Evaluation,
    tol: f64,
) -> Result<CheckReport> {
    let inside: Vec<ThetaStrategy> = from_k
        .iter()
        .filter(|nu| nu.time().le(tau.time()))
        .cloned()
        .collect();
    check_pairs(
        name,
        tree,
        &inside,
        |nu| value.sample(nu),
        op,
        PairMode::Martingale,
        tol,
    )
}

/// Stopped one-step inequalities `ρ_{θ_k,θ_{k+1}∧τ}[φ(θ_{k+1}∧τ)] ≤ φ(θ_k∧τ)`
/// (equalities with `as_martingale`) and the full pairwise property that
/// follows from the one-step inequalities.
pub fn check_stopped_supermartingale(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    family: &ValueFamily,
    op: &Evaluation,
    tau: &ThetaStrategy,
    as_martingale: bool,
    opts: VerifyOptions,
) -> Result<CheckReport> {
    let name = if as_martingale {
        "stopped martingale"
    } else {
        "stopped supermartingale"
    };
    let mut hyp = Tally::new("one-step hypothesis", opts.tol);
    for k in 0..grid.last() {
        let lhs = one_step(tree, grid, k, family, op)?;
        if as_martingale {
            hyp.eq(&lhs, family.at(k), || format!("k = {k}"));
        } else {
            hyp.le(&lhs, family.at(k), || format!("k = {k}"));
        }
        if hyp.failed() {
            return Ok(CheckReport::hypothesis_unmet(
                name,
                format!("one-step inequality fails at k = {k}"),
            ));
        }
    }

    let mut stopped = Tally::new("stopped one-step", opts.tol);
    for k in 0..grid.last() {
        let lower = ThetaStrategy::grid_time(tree, grid, k).min(tau);
        let upper = ThetaStrategy::grid_time(tree, grid, k + 1).min(tau);
        let lhs = op.evaluate(tree, grid.theta(k), upper.time(), &family.sample(&upper))?;
        let rhs = family.sample(&lower);
        if as_martingale {
            stopped.eq(&lhs, &rhs, || format!("k = {k}"));
        } else {
            stopped.le(&lhs, &rhs, || format!("k = {k}"));
        }
    }
    let full = check_supermartingale(tree, grid, family, op, as_martingale, opts)?;
    Ok(combine(name, vec![stopped.finish(), full]))
}

/// The two stopped-family identities along the hitting time `ν_k`, for
/// `l = k, …, n − 1`:
/// `φ(θ_l∧ν) = ρ_{θ_l, θ_{l+1}∧ν}[φ(θ_{l+1}∧ν)]` and
/// `φ(θ_l∧ν) = ρ_{θ_l∧ν, θ_{l+1}∧ν}[φ(θ_{l+1}∧ν)]`.
pub fn check_stopped_identities(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    k: usize,
    family: &ValueFamily,
    op: &Evaluation,
    nu: &ThetaStrategy,
    tol: f64,
) -> Result<CheckReport> {
    let mut t = Tally::new("stopped identities", tol);
    for l in k..grid.last() {
        let lower = ThetaStrategy::grid_time(tree, grid, l).min(nu);
        let upper = ThetaStrategy::grid_time(tree, grid, l + 1).min(nu);
        let target = family.sample(&lower);
        let reward = family.sample(&upper);
        let plain = op.evaluate(tree, grid.theta(l), upper.time(), &reward)?;
        t.eq(&target, &plain, || format!("first form, l = {l}"));
        let stopped = op.evaluate(tree, lower.time(), upper.time(), &reward)?;
        t.eq(&target, &stopped, || format!("second form, l = {l}"));
    }
    Ok(t.finish())
}

/// `V(ν) = V(ν′)` on `{ν = ν′}` for random pairs, and `V(ν) = Σ V(θ_k) 1_{A_k}`
/// over the canonical partition of `ν`.
pub fn check_value_admissibility(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    payoff: &ValueFamily,
    op: &Evaluation,
    pairs: usize,
    seed: u64,
    opts: VerifyOptions,
) -> Result<CheckReport> {
    let all = enumerate_from(tree, grid, 0, opts.cap)?;
    let (value, _) = oracle_family(tree, grid, payoff, op, opts.cap)?;
    value_admissibility(tree, grid, payoff, op, &all, &value, pairs, seed, opts.tol)
}

#[allow(clippy::too_many_arguments)]
fn value_admissibility(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    payoff: &ValueFamily,
    op: &Evaluation,
    all: &[ThetaStrategy],
    value: &ValueFamily,
    pairs: usize,
    seed: u64,
    tol: f64,
) -> Result<CheckReport> {
    let mut t = Tally::new("value admissibility", tol);
    let mut r = rng(seed);
    for _ in 0..pairs {
        let nu = all.choose(&mut r).expect("Θ is never empty");
        let other = all.choose(&mut r).expect("Θ is never empty");
        let v_nu = oracle_value_at(tree, all, nu, payoff, op)?;
        let v_other = oracle_value_at(tree, all, other, payoff, op)?;
        let agree = nu.time().agree(other.time());
        t.eq_on(
            &v_nu,
            &v_other,
            |leaf| agree.contains(leaf),
            || format!("ν = {:?}, ν′ = {:?}", nu.stages(), other.stages()),
        );
        let parts = canonical_partition(tree, grid, nu)?;
        let mut decomposed = RandomVariable::constant(tree, 0.0);
        for (k, part) in parts.iter().enumerate() {
            for leaf in part.leaves() {
                decomposed[leaf] = value.at(k)[leaf];
            }
        }
        t.eq(&v_nu, &decomposed, || {
            format!("decomposition at ν = {:?}", nu.stages())
        });
    }
    Ok(t.finish())
}

/// For all `τ, τ′ ∈ Θ_{θ_k}`: with `A = {ρ[ξ(τ′)] ≤ ρ[ξ(τ)]}` the concatenation
/// `τ 1_A + τ′ 1_{A^c}` lies in `Θ_{θ_k}` and attains the pointwise maximum.
pub fn check_pairwise_max(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    k: usize,
    payoff: &ValueFamily,
    op: &Evaluation,
    opts: VerifyOptions,
) -> Result<CheckReport> {
    let theta = grid.theta(k);
    let from_k = enumerate_from(tree, grid, k, opts.cap)?;
    let sweeps = Sweeps::new(tree, from_k, |tau| payoff.sample(tau), op)?;
    let evals: Vec<RandomVariable> = (0..sweeps.strategies.len())
        .map(|i| sweeps.read(i, theta))
        .collect();
    let mut t = Tally::new("pairwise max", opts.tol);
    let mut mixed = 0usize;
    for (i, tau) in sweeps.strategies.iter().enumerate() {
        for (j, other) in sweeps.strategies.iter().enumerate() {
            let event = Event(
                evals[j]
                    .iter()
                    .zip(evals[i].iter())
                    .map(|(b, a)| b <= a)
                    .collect(),
            );
            let measurable = event_in_sigma_at(tree, &event, theta);
            t.require(measurable, || format!("A ∉ F_θ{k} for pair ({i}, {j})"));
            if !measurable {
                continue;
            }
            let nu = ThetaStrategy::concatenate(tree, tau, other, &event)?;
            t.require(nu.is_after(grid, k), || {
                format!("ν ∉ Θ_θ{k} for pair ({i}, {j})")
            });
            if nu.stages() != tau.stages() && nu.stages() != other.stages() {
                mixed += 1;
            }
            let got = op.evaluate(tree, theta, nu.time(), &payoff.sample(&nu))?;
            t.eq(&got, &evals[i].pointwise_max(&evals[j]), || {
                format!("τ = {:?}, τ′ = {:?}", tau.stages(), other.stages())
            });
        }
    }
    t.note(format!("{mixed} pairs produced a genuinely mixed strategy"));
    Ok(t.finish())
}

/// `V⁺(θ_k) = max_{τ ∈ Θ_{θ_{k+1}}} ρ_{θ_k,τ}[ξ(τ)]` agrees with the one-step
/// evaluation of `V(θ_{k+1})`, and `V = ξ ∨ V⁺`.
pub fn check_strict_value(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    payoff: &ValueFamily,
    value: &ValueFamily,
    op: &Evaluation,
    opts: VerifyOptions,
) -> Result<CheckReport> {
    let all = enumerate_from(tree, grid, 0, opts.cap)?;
    let sweeps = Sweeps::new(tree, all, |tau| payoff.sample(tau), op)?;
    let mut t = Tally::new("strict value", opts.tol);
    for k in 0..grid.last() {
        let theta = grid.theta(k);
        let mut plus: Option<RandomVariable> = None;
        for (i, tau) in sweeps.strategies.iter().enumerate() {
            if !tau.is_after(grid, k + 1) {
                continue;
            }
            let v = sweeps.read(i, theta);
            plus = Some(match plus {
                None => v,
                Some(p) => p.pointwise_max(&v),
            });
        }
        let plus = plus.expect("θ_n is in every Θ_θk");
        let one = one_step(tree, grid, k, value, op)?;
        t.eq(&plus, &one, || format!("V⁺ vs one-step at k = {k}"));
        t.eq(value.at(k), &payoff.at(k).pointwise_max(&plus), || {
            format!("V = ξ ∨ V⁺ at k = {k}")
        });
    }
    Ok(t.finish())
}

/// For `M(τ) = ρ_{τ,θ_n}[η]` dominating `ξ`, checks `ξ ≤ V ≤ M`.
pub fn check_domination(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    payoff: &ValueFamily,
    value: &ValueFamily,
    eta: &RandomVariable,
    op: &Evaluation,
    tol: f64,
) -> Result<CheckReport> {
    let m = crate::snell::make_rho_martingale(tree, grid, eta, op)?;
    let mut hyp = Tally::new("ξ ≤ M", tol);
    for k in 0..grid.len() {
        hyp.le(payoff.at(k), m.at(k), || format!("k = {k}"));
    }
    if hyp.failed() {
        return Ok(CheckReport::hypothesis_unmet(
            "domination",
            "pay-off is not dominated by the martingale".into(),
        ));
    }
    let mut t = Tally::new("domination", tol);
    for k in 0..grid.len() {
        t.le(payoff.at(k), value.at(k), || format!("ξ ≤ V at k = {k}"));
        t.le(value.at(k), m.at(k), || format!("V ≤ M at k = {k}"));
    }
    Ok(t.finish())
}

/// `V(ν_k) = ξ(ν_k)`.
pub fn check_value_at_hitting_time(
    value: &ValueFamily,
    payoff: &ValueFamily,
    nu: &ThetaStrategy,
    tol: f64,
) -> CheckReport {
    let mut t = Tally::new("V(ν_k) = ξ(ν_k)", tol);
    t.eq(&value.sample(nu), &payoff.sample(nu), || {
        format!("ν = {:?}", nu.stages())
    });
    t.finish()
}

/// DPP residual of a family as a report.
pub fn check_dpp(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    payoff: &ValueFamily,
    family: &ValueFamily,
    op: &Evaluation,
    tol: f64,
) -> Result<CheckReport> {
    let residual = dpp_residual(tree, grid, payoff, family, op)?;
    let mut t = Tally::new("dpp", tol);
    t.eq(&vec![residual].into(), &vec![0.0].into(), || {
        "DPP residual".into()
    });
    Ok(t.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::linear_expectation;
    use crate::snell::payoff_family;
    use crate::stopping::AdaptedProcess;
    use crate::tree::{build_tree, TreeSpec};

    fn running_example(xi0: f64) -> (FiltrationTree, BermudanGrid, ValueFamily) {
        let tree = build_tree(&TreeSpec::Uniform {
            depth: 1,
            probs: vec![0.5, 0.5],
        })
        .unwrap();
        let grid = BermudanGrid::deterministic(&tree, &[0, 1]).unwrap();
        let process = AdaptedProcess::from_node_values(&tree, vec![xi0, 0.0, 4.0]).unwrap();
        let xi = payoff_family(&tree, &process, &grid);
        (tree, grid, xi)
    }

    #[test]
    fn oracle_running_example() {
        let op = linear_expectation();
        let (tree, grid, xi) = running_example(1.0);
        let o = oracle_value(&tree, &grid, 0, &xi, &op, 100).unwrap();
        assert_eq!(o.value.values(), &[2.0, 2.0]);
        assert_eq!(o.strategy.stages(), &[1, 1]);

        let (tree, grid, xi) = running_example(3.0);
        let o = oracle_value(&tree, &grid, 0, &xi, &op, 100).unwrap();
        assert_eq!(o.value.values(), &[3.0, 3.0]);
        assert_eq!(o.strategy.stages(), &[0, 0]);

        let o = oracle_value(&tree, &grid, 1, &xi, &op, 100).unwrap();
        assert_eq!(&o.value, xi.at(1));
        assert_eq!(o.strategy.stages(), &[1, 1]);
    }

    #[test]
    fn running_example_non_martingale_witness() {
        let op = linear_expectation();
        let (tree, grid, xi) = running_example(1.0);
        let opts = VerifyOptions::default();
        let r = check_supermartingale(&tree, &grid, &xi, &op, true, opts).unwrap();
        assert_eq!(r.status, Status::Fail);
        let w = r.witness.unwrap();
        assert!(w.detail.contains("σ = [0, 0], τ = [1, 1]"), "{}", w.detail);
        assert_eq!((w.lhs, w.rhs), (2.0, 1.0));
    }

    #[test]
    fn running_example_optimality() {
        let op = linear_expectation();
        let (tree, grid, xi) = running_example(1.0);
        let r =
            check_optimality(&tree, &grid, 0, &xi, &op, true, VerifyOptions::default()).unwrap();
        assert_eq!(r.hitting_stages, vec![1, 1]);
        assert_eq!(r.checks.len(), 5);
        assert!(r.passed(), "{:#?}", r.checks);
    }

    #[test]
    fn stopped_check_gates_on_hypothesis() {
        let op = linear_expectation();
        let (tree, grid, xi) = running_example(1.0);
        let tau = ThetaStrategy::grid_time(&tree, &grid, 1);
        let r = check_stopped_supermartingale(
            &tree,
            &grid,
            &xi,
            &op,
            &tau,
            false,
            VerifyOptions::default(),
        )
        .unwrap();
        assert_eq!(r.status, Status::HypothesisUnmet);
        assert!(r.note.unwrap().contains("k = 0"));
    }
}
