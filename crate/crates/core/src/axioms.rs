//! Randomized property tests of an evaluation's axioms.
//!
//! Samples are independent: each draws its own tree and stopping times from a
//! per-sample seed, so the harness runs them on worker threads and merges the
//! results in sample order.

use schemars::JsonSchema;
use std::thread;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{
    random_event_at, random_process, random_stopping_time, random_stopping_time_after,
    random_stopping_time_between, rng, CorpusRng,
};
use crate::error::Result;
use crate::evaluation::{Claims, Evaluation};
use crate::report::{combine, CheckReport, Status, Tally};
use crate::stopping::{is_measurable_at_time, StoppingTime};
use crate::tree::{random_tree, FiltrationTree};
use crate::variable::RandomVariable;

/// Threshold for a strict increase.
pub const STRICT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct AxiomOptions {
    /// Tree seeds; sample `i` uses `tree_seeds[i % len]`. When empty each
    /// sample draws its tree from its own seed.
    #[serde(default)]
    pub tree_seeds: Vec<u64>,
    pub samples: usize,
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_depth")]
    pub max_depth: usize,
    #[serde(default = "default_branch")]
    pub max_branch: usize,
}

fn default_tol() -> f64 {
    crate::EQ_TOL
}
fn default_depth() -> usize {
    4
}
fn default_branch() -> usize {
    3
}

impl AxiomOptions {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            tree_seeds: (0..samples as u64)
                .map(|i| seed.wrapping_mul(1_000_003).wrapping_add(i))
                .collect(),
            samples,
            seed,
            tol: default_tol(),
            max_depth: default_depth(),
            max_branch: default_branch(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct PropertyResult {
    pub property: String,
    /// Whether the operator's claims make this property mandatory.
    pub required: bool,
    pub report: CheckReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct AxiomReport {
    pub operator: String,
    pub claims: Claims,
    pub samples: usize,
    pub properties: Vec<PropertyResult>,
}

impl AxiomReport {
    /// Every required property passed.
    pub fn passed(&self) -> bool {
        self.properties
            .iter()
            .all(|p| !p.required || p.report.passed())
    }

    pub fn property(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.property == name)
    }

    /// First failing sample's witness for `name`, if any.
    pub fn witness(&self, name: &str) -> Option<&crate::report::Witness> {
        self.property(name).and_then(|p| p.report.witness.as_ref())
    }
}

pub const MEASURABILITY: &str = "(i) measurability";
pub const ADMISSIBILITY: &str = "(ii) admissibility";
pub const FREEZING: &str = "(iii) knowledge preservation";
pub const KNOWN_AT_S: &str = "(iii) known-at-S rewards";
pub const MONOTONICITY: &str = "(iv) monotonicity";
pub const CONSISTENCY: &str = "(v) consistency";
pub const ZERO_ONE: &str = "(vi) generalized zero-one law";
pub const FATOU: &str = "(vii) monotone Fatou";
pub const STRICT: &str = "strict monotonicity";

const ORDER: [&str; 9] = [
    MEASURABILITY,
    ADMISSIBILITY,
    FREEZING,
    KNOWN_AT_S,
    MONOTONICITY,
    CONSISTENCY,
    ZERO_ONE,
    FATOU,
    STRICT,
];

fn required(name: &str, claims: Claims) -> bool {
    match name {
        KNOWN_AT_S => claims.preserves_constants,
        MONOTONICITY => claims.monotone,
        STRICT => claims.strictly_monotone,
        _ => true,
    }
}

/// Runs every property on `opts.samples` random instances.
pub fn check_axioms(op: &Evaluation, opts: &AxiomOptions) -> Result<AxiomReport> {
    let samples = opts.samples.max(1);
    let workers = thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(samples);
    let chunk = samples.div_ceil(workers);
    let per_sample: Vec<Result<Vec<CheckReport>>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    (w * chunk..((w + 1) * chunk).min(samples))
                        .map(|i| run_sample(op, opts, i))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("axiom worker panicked"))
            .collect()
    });
    let per_sample = per_sample.into_iter().collect::<Result<Vec<_>>>()?;

    let claims = op.claims();
    let properties = ORDER
        .iter()
        .enumerate()
        .map(|(j, &name)| {
            let parts: Vec<CheckReport> = per_sample.iter().map(|s| s[j].clone()).collect();
            let mut report = combine(name, parts);
            if name == FATOU && report.status == Status::Pass {
                report.status = Status::Degenerate;
                report.note = Some("degenerate on finite Ω: stabilized sequences only".into());
            }
            let required = required(name, claims);
            if !required {
                report.note = Some("not claimed by the operator; informational".into());
            }
            PropertyResult {
                property: name.to_string(),
                required,
                report,
            }
        })
        .collect();
    Ok(AxiomReport {
        operator: op.name().to_string(),
        claims,
        samples,
        properties,
    })
}

fn sample_seed(seed: u64, i: usize) -> u64 {
    seed ^ (i as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

struct Sample<'a> {
    op: &'a Evaluation,
    tree: FiltrationTree,
    tree_seed: u64,
    tol: f64,
    rng: CorpusRng,
}

impl Sample<'_> {
    fn stopping(&mut self) -> StoppingTime {
        let p = self.rng.gen_range(0.1..0.6);
        random_stopping_time(&self.tree, p, &mut self.rng)
    }

    fn after(&mut self, lower: &StoppingTime) -> StoppingTime {
        let p = self.rng.gen_range(0.1..0.6);
        random_stopping_time_after(&self.tree, lower, p, &mut self.rng)
    }

    fn reward_at(&mut self, tau: &StoppingTime) -> RandomVariable {
        random_process(&self.tree, -5.0, 5.0, &mut self.rng).sample(&self.tree, tau)
    }

    fn ctx(&self, s: &StoppingTime, tau: &StoppingTime, eta: &RandomVariable) -> String {
        format!(
            "tree seed {}, S = {:?}, τ = {:?}, η = {:?}",
            self.tree_seed,
            s.stages(),
            tau.stages(),
            eta.values()
        )
    }

    fn eval(
        &self,
        s: &StoppingTime,
        tau: &StoppingTime,
        eta: &RandomVariable,
    ) -> Result<RandomVariable> {
        self.op.evaluate(&self.tree, s, tau, eta)
    }

    fn tally(&self, name: &str) -> Tally {
        Tally::new(name, self.tol)
    }
}

fn run_sample(op: &Evaluation, opts: &AxiomOptions, i: usize) -> Result<Vec<CheckReport>> {
    let tree_seed = if opts.tree_seeds.is_empty() {
        sample_seed(opts.seed, i)
    } else {
        opts.tree_seeds[i % opts.tree_seeds.len()]
    };
    let mut sm = Sample {
        op,
        tree: random_tree(tree_seed, opts.max_depth, opts.max_branch)?,
        tree_seed,
        tol: opts.tol,
        rng: rng(sample_seed(opts.seed, i)),
    };
    let depth = sm.tree.depth();
    let zero = StoppingTime::constant(&sm.tree, 0)?;
    let horizon = StoppingTime::constant(&sm.tree, depth)?;

    let s = sm.stopping();
    let tau = sm.after(&s);
    let eta = sm.reward_at(&tau);
    let base = sm.eval(&s, &tau, &eta)?;

    // (i) the output is F_S-measurable
    let mut t = sm.tally(MEASURABILITY);
    t.require(is_measurable_at_time(&sm.tree, &base, &s), || {
        sm.ctx(&s, &tau, &eta)
    });
    let measurability = t.finish();

    // (ii) same output on {S = S′}, for arbitrary S′ (not necessarily ≤ τ)
    let mut t = sm.tally(ADMISSIBILITY);
    let s2 = sm.stopping();
    let other = sm.eval(&s2, &tau, &eta)?;
    let agree = s.agree(&s2);
    t.eq_on(
        &base,
        &other,
        |l| agree.contains(l),
        || format!("{}, S′ = {:?}", sm.ctx(&s, &tau, &eta), s2.stages()),
    );
    let admissibility = t.finish();

    // (iii) ρ_{τ,S}[η] = η for η ∈ F_S and τ ≥ S
    let mut t = sm.tally(FREEZING);
    let later = sm.after(&s);
    let known = sm.reward_at(&s);
    t.eq(&sm.eval(&later, &s, &known)?, &known, || {
        sm.ctx(&later, &s, &known)
    });
    let freezing = t.finish();

    // ρ_{S,τ}[η] = η for η ∈ F_S and τ ≥ S; first a constant probe
    let mut t = sm.tally(KNOWN_AT_S);
    let two = RandomVariable::constant(&sm.tree, 2.0);
    t.eq(&sm.eval(&zero, &horizon, &two)?, &two, || {
        sm.ctx(&zero, &horizon, &two)
    });
    t.eq(&sm.eval(&s, &later, &known)?, &known, || {
        sm.ctx(&s, &later, &known)
    });
    let known_at_s = t.finish();

    // (iv) η₁ ≤ η₂ ⇒ ρ[η₁] ≤ ρ[η₂]
    let mut t = sm.tally(MONOTONICITY);
    let bump = random_process(&sm.tree, 0.0, 2.0, &mut sm.rng).sample(&sm.tree, &tau);
    let bigger = RandomVariable(eta.iter().zip(bump.iter()).map(|(a, b)| a + b).collect());
    let bigger_out = sm.eval(&s, &tau, &bigger)?;
    t.le(&base, &bigger_out, || {
        format!("{}, η₂ = {:?}", sm.ctx(&s, &tau, &eta), bigger.values())
    });
    let monotonicity = t.finish();

    // (v) ρ_{S,θ}[ρ_{θ,τ}[η]] = ρ_{S,τ}[η] for S ≤ θ ≤ τ
    let mut t = sm.tally(CONSISTENCY);
    let p = sm.rng.gen_range(0.1..0.6);
    let theta = random_stopping_time_between(&sm.tree, &s, &tau, p, &mut sm.rng);
    let inner = sm.eval(&theta, &tau, &eta)?;
    t.eq(&sm.eval(&s, &theta, &inner)?, &base, || {
        format!("{}, θ = {:?}", sm.ctx(&s, &tau, &eta), theta.stages())
    });
    let consistency = t.finish();

    // (vi) 1_A ρ_{S,τ}[ξ(τ)] = 1_A ρ_{S,τ′}[ξ(τ′)] for A ∈ F_S, τ = τ′ on A
    let mut t = sm.tally(ZERO_ONE);
    let process = random_process(&sm.tree, -5.0, 5.0, &mut sm.rng);
    let event = random_event_at(&sm.tree, &s, &mut sm.rng);
    let alt = sm.after(&s);
    let tau2 = StoppingTime::new(
        &sm.tree,
        (0..sm.tree.num_leaves())
            .map(|l| {
                if event.contains(l) {
                    tau.at(l)
                } else {
                    alt.at(l)
                }
            })
            .collect(),
    )?;
    let lhs = sm.eval(&s, &tau, &process.sample(&sm.tree, &tau))?;
    let rhs = sm.eval(&s, &tau2, &process.sample(&sm.tree, &tau2))?;
    t.eq_on(
        &lhs,
        &rhs,
        |l| event.contains(l),
        || {
            format!(
                "tree seed {}, S = {:?}, τ = {:?}, τ′ = {:?}, A = {:?}",
                sm.tree_seed,
                s.stages(),
                tau.stages(),
                tau2.stages(),
                event.leaves()
            )
        },
    );
    let zero_one = t.finish();

    // (vii) stabilized form: η_m = η − (M − m)⁺ δ increases to η and equals it
    // from m = M on, so ρ[η_m] must reach ρ[η] exactly at m = M
    let mut t = sm.tally(FATOU);
    let steps = sm.rng.gen_range(1..=4usize);
    let delta = sm.rng.gen_range(0.1..1.0);
    for m in 0..=steps + 1 {
        let lag = steps.saturating_sub(m) as f64;
        let eta_m = eta.map(|v| v - lag * delta);
        let out = sm.eval(&s, &tau, &eta_m)?;
        if m >= steps {
            t.eq(&out, &base, || {
                format!("{}, m = {m}", sm.ctx(&s, &tau, &eta))
            });
        } else if op.claims().monotone {
            t.le(&out, &base, || {
                format!("{}, m = {m}", sm.ctx(&s, &tau, &eta))
            });
        }
    }
    let fatou = t.finish();

    // strict: raise η on one τ-atom and require a strict increase there
    let mut t = sm.tally(STRICT);
    let leaf = sm.rng.gen_range(0..sm.tree.num_leaves());
    let atom = sm.tree.atom_of(leaf, tau.at(leaf))?;
    let mut raised = eta.clone();
    for l in atom.clone() {
        raised[l] += delta;
    }
    let raised_out = sm.eval(&s, &tau, &raised)?;
    let gain = raised_out[leaf] - base[leaf];
    t.require(gain >= STRICT_TOL, || {
        format!(
            "{}, raised atom {:?} by {delta}: gain {gain:e}",
            sm.ctx(&s, &tau, &eta),
            atom
        )
    });
    let strict = t.finish();

    Ok(vec![
        measurability,
        admissibility,
        freezing,
        known_at_s,
        monotonicity,
        consistency,
        zero_one,
        fatou,
        strict,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::{linear_expectation, square_of_mean};

    #[test]
    fn linear_passes_everything() {
        let r = check_axioms(&linear_expectation(), &AxiomOptions::new(60, 4)).unwrap();
        assert!(r.passed(), "{r:#?}");
        assert!(r.properties.iter().all(|p| p.report.witness.is_none()));
        assert_eq!(r.property(FATOU).unwrap().report.status, Status::Degenerate);
        assert_eq!(r.property(STRICT).unwrap().report.status, Status::Pass);
    }

    #[test]
    fn square_of_mean_is_caught() {
        let r = check_axioms(&square_of_mean(), &AxiomOptions::new(10, 0)).unwrap();
        assert!(!r.passed());
        let w = r.witness(KNOWN_AT_S).unwrap();
        assert_eq!(w.rhs, 2.0);
        assert!(w.lhs >= 4.0);
    }

    #[test]
    fn report_is_deterministic() {
        let op = crate::evaluation::entropic_utility(1.0).unwrap();
        let a = check_axioms(&op, &AxiomOptions::new(20, 9)).unwrap();
        let b = check_axioms(&op, &AxiomOptions::new(20, 9)).unwrap();
        assert_eq!(a, b);
    }
}
