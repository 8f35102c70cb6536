//! Configuration-driven runs and their reports.

use schemars::JsonSchema;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::axioms::{check_axioms, AxiomOptions, AxiomReport};
use crate::config::{Check, ExperimentConfig, LoadedInstance};
use crate::corpus::{CorpusBounds, Instance};
use crate::error::{Error, Result};
use crate::evaluation::{Claims, Evaluation, OperatorSpec};
use crate::report::{combine, CheckReport, Status, Tally};
use crate::snell::{
    borderline_decisions, dpp_residual, hitting_time, payoff_family, snell_backward, Borderline,
    ValueFamily,
};
use crate::stopping::BermudanGrid;
use crate::tree::FiltrationTree;
use crate::variable::RandomVariable;
use crate::verify::{
    check_domination, check_pairwise_max, check_snell_minimality, check_stopped_identities,
    check_stopped_supermartingale, check_strict_value, check_supermartingale,
    check_value_at_hitting_time, Solved, VerifyOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Backward induction, hitting times and the envelope's DPP residual.
    Solve,
    /// Brute-force value compared with the envelope.
    Oracle,
    /// Every configured check.
    Verify,
    /// The axiom harness for each operator.
    Axioms,
    /// Random corpus, aggregated per operator.
    Sweep,
}

/// Command-line overrides applied on top of a config.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub cap: Option<u128>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(tol) = self.tol {
            cfg.tol = tol;
        }
        if let Some(cap) = self.cap {
            cfg.cap = cap;
        }
    }
}

/// `(k, atom, value)` where `atom` is the node id of the `F_{θ_k}` atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct TableRow {
    pub grid_index: usize,
    pub atom_id: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct HittingRow {
    pub k: usize,
    /// Stage of `ν_k` per leaf.
    pub stages: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct OperatorReport {
    pub operator: String,
    pub claims: Claims,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub envelope: Vec<TableRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub value: Vec<TableRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hitting: Vec<HittingRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub borderline: Vec<Borderline>,
    pub checks: Vec<CheckReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axioms: Option<AxiomReport>,
}

impl OperatorReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckReport::passed)
            && self.axioms.as_ref().is_none_or(AxiomReport::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.check == name)
    }
}

/// Per-operator pass counts of a corpus sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SweepSummary {
    pub operator: String,
    pub instances: usize,
    /// Instances on which every check passed.
    pub passed: usize,
    /// `(check, instances passed)`, in check order.
    pub per_check: Vec<(String, usize)>,
    /// Seeds of failing instances, at most ten.
    pub failing_seeds: Vec<u64>,
    pub worst: f64,
}

/// Deterministic part of a run report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ReportBody {
    pub command: Command,
    pub name: String,
    pub digest: String,
    pub seed: u64,
    pub tol: f64,
    pub cap: String,
    pub operators: Vec<OperatorReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct RunReport {
    pub body: ReportBody,
    pub timing_ms: f64,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.body.operators.iter().all(OperatorReport::passed)
            && self.body.sweep.iter().all(|s| s.passed == s.instances)
    }

    /// Pretty JSON of the body only; byte-identical for identical inputs.
    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(&self.body).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Exit status for a run: 0 all checks pass, 1 a check failed, 2 bad
/// configuration, 3 enumeration cap exceeded.
pub fn exit_code(result: &Result<RunReport>) -> i32 {
    match result {
        Ok(r) if r.passed() => 0,
        Ok(_) => 1,
        Err(Error::CapExceeded { .. }) => 3,
        Err(_) => 2,
    }
}

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Fixed-point decimal text with 12 significant digits and no exponent.
pub fn format_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let x = round_sig(x);
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (11 - exp).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn digest(cfg: &ExperimentConfig) -> String {
    let canonical =
        serde_json::to_string(&(&cfg.tree, &cfg.grid, &cfg.payoff)).expect("config serializes");
    let hash = Sha256::digest(canonical.as_bytes());
    hash.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn table(tree: &FiltrationTree, grid: &BermudanGrid, family: &ValueFamily) -> Vec<TableRow> {
    let mut rows = Vec::new();
    for k in 0..grid.len() {
        let mut seen = BTreeSet::new();
        for leaf in 0..tree.num_leaves() {
            let atom = tree.ancestor(leaf, grid.stage(k, leaf));
            if seen.insert(atom) {
                rows.push(TableRow {
                    grid_index: k,
                    atom_id: atom,
                    value: round_sig(family.at(k)[leaf]),
                });
            }
        }
    }
    rows.sort_by_key(|r| (r.grid_index, r.atom_id));
    rows
}

fn residual_report(name: &str, residual: f64, tol: f64) -> CheckReport {
    let mut t = Tally::new(name, tol);
    t.eq(
        &RandomVariable(vec![residual]),
        &RandomVariable(vec![0.0]),
        || format!("residual {residual:e}"),
    );
    t.finish()
}

/// Knobs of [`verify_instance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceOptions {
    pub verify: VerifyOptions,
    pub seed: u64,
    pub majorants: usize,
    pub admissibility_pairs: usize,
}

/// Runs `checks` on one instance, one report per check in the given order.
pub fn verify_instance(
    tree: &FiltrationTree,
    grid: &BermudanGrid,
    payoff: &ValueFamily,
    op: &Evaluation,
    checks: &[Check],
    opts: InstanceOptions,
) -> Result<Vec<CheckReport>> {
    let tol = opts.verify.tol;
    let solved = Solved::new(tree, grid, payoff, op, opts.verify)?;
    let n = grid.last();
    let mut out = Vec::with_capacity(checks.len());
    for &check in checks {
        let mut report = match check {
            Check::Oracle => {
                let mut t = Tally::new(check.name(), tol);
                for k in 0..=n {
                    t.eq(solved.envelope.at(k), solved.value.at(k), || {
                        format!("U vs V at k = {k}")
                    });
                    let nu = solved.hitting(k)?;
                    let at_nu = op.evaluate(tree, grid.theta(k), nu.time(), &payoff.sample(&nu))?;
                    t.eq(&at_nu, solved.value.at(k), || {
                        format!("ρ[ξ(ν_k)] vs V at k = {k}, ν_k = {:?}", nu.stages())
                    });
                    let at_best = solved.attaining[k].clone();
                    let v = op.evaluate(
                        tree,
                        grid.theta(k),
                        at_best.time(),
                        &payoff.sample(&at_best),
                    )?;
                    t.eq(&v, solved.value.at(k), || {
                        format!("attaining strategy at k = {k}")
                    });
                }
                t.finish()
            }
            Check::Dpp => {
                let v = dpp_residual(tree, grid, payoff, &solved.value, op)?;
                let u = dpp_residual(tree, grid, payoff, &solved.envelope, op)?;
                let mut t = Tally::new(check.name(), tol);
                t.eq(&RandomVariable(vec![v]), &RandomVariable(vec![0.0]), || {
                    format!("oracle residual {v:e}")
                });
                t.require(u == 0.0, || {
                    format!("envelope residual {u:e} is not exactly 0")
                });
                t.note(format!("oracle residual {v:e}, envelope residual {u:e}"));
                t.finish()
            }
            Check::StrictValue => {
                check_strict_value(tree, grid, payoff, &solved.value, op, opts.verify)?
            }
            Check::Supermartingale => {
                check_supermartingale(tree, grid, &solved.value, op, false, opts.verify)?
            }
            Check::Martingale => {
                check_supermartingale(tree, grid, &solved.value, op, true, opts.verify)?
            }
            Check::StoppedSupermartingale => {
                let nu = solved.hitting(0)?;
                check_stopped_supermartingale(
                    tree,
                    grid,
                    &solved.value,
                    op,
                    &nu,
                    false,
                    opts.verify,
                )?
            }
            Check::StoppedIdentities => {
                let mut parts = Vec::with_capacity(n + 1);
                for k in 0..=n {
                    let nu = solved.hitting(k)?;
                    parts.push(check_stopped_identities(
                        tree,
                        grid,
                        k,
                        &solved.value,
                        op,
                        &nu,
                        tol,
                    )?);
                }
                combine(check.name(), parts)
            }
            Check::Minimality => check_snell_minimality(
                tree,
                grid,
                payoff,
                op,
                &solved.envelope,
                opts.majorants,
                opts.seed,
                opts.verify,
            )?,
            Check::Optimality => {
                let strict = op.claims().strictly_monotone;
                let mut parts = Vec::new();
                for k in 0..=n {
                    parts.extend(solved.optimality(k, strict)?.checks);
                }
                let mut r = combine(check.name(), parts);
                if !strict {
                    r.note = Some(format!(
                        "converse not required (operator not strictly monotone); {}",
                        r.note.unwrap_or_default()
                    ));
                }
                r
            }
            Check::ValueAdmissibility => {
                solved.value_admissibility(opts.admissibility_pairs, opts.seed)?
            }
            Check::PairwiseMax => {
                let mut parts = Vec::with_capacity(n + 1);
                for k in 0..=n {
                    parts.push(check_pairwise_max(tree, grid, k, payoff, op, opts.verify)?);
                }
                combine(check.name(), parts)
            }
            Check::Domination => {
                let bound = payoff
                    .values()
                    .iter()
                    .flat_map(|v| v.iter().copied())
                    .fold(f64::NEG_INFINITY, f64::max);
                let eta = RandomVariable::constant(tree, bound);
                check_domination(tree, grid, payoff, &solved.value, &eta, op, tol)?
            }
            Check::HittingValue => {
                let mut parts = Vec::with_capacity(n + 1);
                for k in 0..=n {
                    let nu = solved.hitting(k)?;
                    parts.push(check_value_at_hitting_time(&solved.value, payoff, &nu, tol));
                }
                combine(check.name(), parts)
            }
            Check::Axioms => {
                return Err(Error::Config(
                    "the axioms check runs per operator, not per instance".into(),
                ))
            }
        };
        report.check = check.name().to_string();
        out.push(report);
    }
    Ok(out)
}

fn solve_report(
    cfg: &ExperimentConfig,
    inst: &LoadedInstance,
    op: &Evaluation,
    with_oracle: bool,
) -> Result<OperatorReport> {
    let (tree, grid, payoff) = (&inst.tree, &inst.grid, &inst.payoff);
    let envelope = snell_backward(tree, grid, payoff, op)?;
    let mut hitting = Vec::with_capacity(grid.len());
    let mut borderline = Vec::new();
    for k in 0..grid.len() {
        let nu = hitting_time(tree, grid, k, &envelope, payoff, cfg.tol)?;
        borderline.extend(borderline_decisions(
            grid, k, &envelope, payoff, &nu, cfg.tol,
        ));
        hitting.push(HittingRow {
            k,
            stages: nu.stages().to_vec(),
        });
    }
    let residual = dpp_residual(tree, grid, payoff, &envelope, op)?;
    let mut checks = vec![residual_report("dpp", residual, 0.0)];
    let mut value = Vec::new();
    if with_oracle {
        let opts = VerifyOptions {
            tol: cfg.tol,
            cap: cfg.cap,
        };
        let mut reports = verify_instance(
            tree,
            grid,
            payoff,
            op,
            &[Check::Oracle],
            InstanceOptions {
                verify: opts,
                seed: cfg.seed,
                majorants: 0,
                admissibility_pairs: 0,
            },
        )?;
        checks.append(&mut reports);
        let (v, _) = crate::verify::oracle_family(tree, grid, payoff, op, cfg.cap)?;
        value = table(tree, grid, &v);
    }
    Ok(OperatorReport {
        operator: op.name().to_string(),
        claims: op.claims(),
        envelope: table(tree, grid, &envelope),
        value,
        hitting,
        borderline,
        checks,
        axioms: None,
    })
}

fn axiom_options(cfg: &ExperimentConfig) -> AxiomOptions {
    let mut opts = cfg
        .axioms
        .clone()
        .unwrap_or_else(|| AxiomOptions::new(200, cfg.seed));
    opts.seed = cfg.seed;
    opts.tol = cfg.tol;
    opts
}

/// Runs a command on a validated config.
pub fn run(cfg: &ExperimentConfig, command: Command) -> Result<RunReport> {
    let start = Instant::now();
    cfg.validate()?;
    let ops = cfg
        .operators
        .iter()
        .map(OperatorSpec::build)
        .collect::<Result<Vec<_>>>()?;
    let mut operators = Vec::new();
    let mut sweep = Vec::new();
    match command {
        Command::Solve | Command::Oracle => {
            let inst = cfg.instance()?;
            for op in &ops {
                operators.push(solve_report(cfg, &inst, op, command == Command::Oracle)?);
            }
        }
        Command::Verify => {
            let inst = cfg.instance()?;
            let checks = cfg.checks();
            let instance_checks: Vec<Check> = checks
                .iter()
                .copied()
                .filter(|c| *c != Check::Axioms)
                .collect();
            for op in &ops {
                let mut report = solve_report(cfg, &inst, op, false)?;
                report.checks = verify_instance(
                    &inst.tree,
                    &inst.grid,
                    &inst.payoff,
                    op,
                    &instance_checks,
                    instance_options(cfg),
                )?;
                let (v, _) = crate::verify::oracle_family(
                    &inst.tree,
                    &inst.grid,
                    &inst.payoff,
                    op,
                    cfg.cap,
                )?;
                report.value = table(&inst.tree, &inst.grid, &v);
                if checks.contains(&Check::Axioms) {
                    report.axioms = Some(check_axioms(op, &axiom_options(cfg))?);
                }
                operators.push(report);
            }
        }
        Command::Axioms => {
            for op in &ops {
                operators.push(OperatorReport {
                    operator: op.name().to_string(),
                    claims: op.claims(),
                    envelope: Vec::new(),
                    value: Vec::new(),
                    hitting: Vec::new(),
                    borderline: Vec::new(),
                    checks: Vec::new(),
                    axioms: Some(check_axioms(op, &axiom_options(cfg))?),
                });
            }
        }
        Command::Sweep => {
            let sc = cfg
                .sweep
                .clone()
                .ok_or_else(|| Error::Config("sweep needs a \"sweep\" section".into()))?;
            let checks: Vec<Check> = cfg
                .checks()
                .into_iter()
                .filter(|c| *c != Check::Axioms)
                .collect();
            let mut opts = instance_options(cfg);
            opts.majorants = sc.majorants;
            for op in &ops {
                sweep.push(sweep_operator(
                    op,
                    &sc.bounds,
                    sc.first_seed,
                    sc.instances,
                    &checks,
                    opts,
                )?);
            }
        }
    }
    Ok(RunReport {
        body: ReportBody {
            command,
            name: cfg.name.clone(),
            digest: digest(cfg),
            seed: cfg.seed,
            tol: cfg.tol,
            cap: cfg.cap.to_string(),
            operators,
            sweep,
        },
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn instance_options(cfg: &ExperimentConfig) -> InstanceOptions {
    InstanceOptions {
        verify: VerifyOptions {
            tol: cfg.tol,
            cap: cfg.cap,
        },
        seed: cfg.seed,
        majorants: cfg.majorants,
        admissibility_pairs: cfg.admissibility_pairs,
    }
}

/// Checks one corpus instance. Pay-off family and operator are built here so
/// the result only depends on the seed.
pub fn sweep_instance(
    op: &Evaluation,
    bounds: &CorpusBounds,
    seed: u64,
    checks: &[Check],
    opts: InstanceOptions,
) -> Result<Vec<CheckReport>> {
    let inst = Instance::generate(seed, bounds)?;
    let payoff = payoff_family(&inst.tree, &inst.payoff, &inst.grid);
    let opts = InstanceOptions {
        seed: opts.seed ^ seed,
        ..opts
    };
    verify_instance(&inst.tree, &inst.grid, &payoff, op, checks, opts)
}

/// Sweeps `count` consecutive seeds on worker threads; results are merged in
/// seed order.
pub fn sweep_operator(
    op: &Evaluation,
    bounds: &CorpusBounds,
    first_seed: u64,
    count: usize,
    checks: &[Check],
    opts: InstanceOptions,
) -> Result<SweepSummary> {
    let workers = thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(count.max(1));
    let results: Vec<Result<Vec<CheckReport>>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    (w..count)
                        .step_by(workers)
                        .map(|i| {
                            (
                                i,
                                sweep_instance(op, bounds, first_seed + i as u64, checks, opts),
                            )
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        let mut all: Vec<(usize, Result<Vec<CheckReport>>)> = handles
            .into_iter()
            .flat_map(|h| h.join().expect("sweep worker panicked"))
            .collect();
        all.sort_by_key(|(i, _)| *i);
        all.into_iter().map(|(_, r)| r).collect()
    });

    let mut per_check = vec![0usize; checks.len()];
    let mut passed = 0;
    let mut failing_seeds = Vec::new();
    let mut worst: f64 = 0.0;
    for (i, result) in results.into_iter().enumerate() {
        let reports = result?;
        let mut ok = true;
        for (j, r) in reports.iter().enumerate() {
            if r.passed() {
                per_check[j] += 1;
            } else {
                ok = false;
            }
            if r.status != Status::HypothesisUnmet {
                worst = worst.max(r.worst);
            }
        }
        if ok {
            passed += 1;
        } else if failing_seeds.len() < 10 {
            failing_seeds.push(first_seed + i as u64);
        }
    }
    Ok(SweepSummary {
        operator: op.name().to_string(),
        instances: count,
        passed,
        per_check: checks
            .iter()
            .zip(per_check)
            .map(|(c, n)| (c.name().to_string(), n))
            .collect(),
        failing_seeds,
        worst: round_sig(worst),
    })
}

/// File format for [`export_tables`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    #[default]
    Csv,
    /// One JSON array of row objects per table.
    Json,
}

impl TableFormat {
    fn extension(self) -> &'static str {
        match self {
            TableFormat::Csv => "csv",
            TableFormat::Json => "json",
        }
    }
}

#[derive(Serialize)]
struct LeafStage {
    leaf_id: usize,
    stage: usize,
}

#[derive(Serialize)]
struct ResidualRow<'a> {
    check: &'a str,
    status: Status,
    worst: f64,
    cases: u64,
}

fn render<T: Serialize>(
    format: TableFormat,
    header: &str,
    rows: &[T],
    csv_row: impl Fn(&T) -> String,
) -> String {
    match format {
        TableFormat::Csv => {
            let mut s = format!("{header}\n");
            for r in rows {
                let _ = writeln!(s, "{}", csv_row(r));
            }
            s
        }
        TableFormat::Json => serde_json::to_string_pretty(rows).expect("rows serialize") + "\n",
    }
}

/// Writes tables into `dir`, one set per operator prefixed `<i>_<operator>`:
/// `_envelope`, `_value` (when the oracle ran), `_hitting_k<k>` and
/// `_residuals`. Returns the paths written.
pub fn export_tables(
    report: &RunReport,
    dir: impl AsRef<Path>,
    format: TableFormat,
) -> std::io::Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (i, op) in report.body.operators.iter().enumerate() {
        let stem = format!("{i}_{}", sanitize(&op.operator));
        let mut emit = |suffix: &str, text: String| -> std::io::Result<()> {
            let path = dir.join(format!("{stem}_{suffix}.{}", format.extension()));
            std::fs::write(&path, text)?;
            written.push(path);
            Ok(())
        };
        for (suffix, rows) in [("envelope", &op.envelope), ("value", &op.value)] {
            if rows.is_empty() {
                continue;
            }
            let text = render(format, "grid_index,atom_id,value", rows, |r| {
                format!("{},{},{}", r.grid_index, r.atom_id, format_sig(r.value))
            });
            emit(suffix, text)?;
        }
        for row in &op.hitting {
            let rows: Vec<LeafStage> = row
                .stages
                .iter()
                .enumerate()
                .map(|(leaf_id, &stage)| LeafStage { leaf_id, stage })
                .collect();
            let text = render(format, "leaf_id,stage", &rows, |r| {
                format!("{},{}", r.leaf_id, r.stage)
            });
            emit(&format!("hitting_k{}", row.k), text)?;
        }
        let rows: Vec<ResidualRow> = op
            .checks
            .iter()
            .map(|c| ResidualRow {
                check: &c.check,
                status: c.status,
                worst: round_sig(c.worst),
                cases: c.cases,
            })
            .collect();
        let text = render(format, "check,status,worst,cases", &rows, |r| {
            let status = serde_json::to_value(r.status).expect("status serializes");
            format!(
                "{},{},{},{}",
                r.check,
                status.as_str().unwrap_or_default(),
                format_sig(r.worst),
                r.cases
            )
        });
        emit("residuals", text)?;
    }
    Ok(written)
}

fn sanitize(name: &str) -> String {
    name.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join("_")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(2.0), "2");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig(-2.566251232), "-2.566251232");
        assert_eq!(format_sig(123456.7890123456), "123456.789012");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Err(Error::Config("x".into()))), 2);
        assert_eq!(exit_code(&Err(Error::CapExceeded { count: 9, cap: 1 })), 3);
    }
}
