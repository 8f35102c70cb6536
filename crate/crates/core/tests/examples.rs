//! Every example is compiled into this test binary and checked against values
//! computed independently here.

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/examples/",
                stringify!($name),
                ".rs"
            ));
        }
    };
}

example!(running_example);
example!(strategies);
example!(operators);
example!(bermudan_put);
example!(custom_driver);
example!(oracle_check);
example!(axiom_harness);
example!(config_run);
example!(corpus_sweep);

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn running_example_values() {
    let r = running_example::run_example().unwrap();
    // waiting is worth 0.5·0 + 0.5·4 = 2 > 1
    assert_eq!(r.value_at_0, vec![2.0, 2.0]);
    assert_eq!(r.hitting_stages, vec![1, 1]);
    // 3 > 2, stop immediately
    assert_eq!(r.value_at_0_early, vec![3.0, 3.0]);
    assert_eq!(r.hitting_stages_early, vec![0, 0]);
}

#[test]
fn strategy_counts_and_partition() {
    let s = strategies::run_example().unwrap();
    // from θ_0: stop at the root, or stop/continue on the left atom while the
    // right atom runs to N; from θ_1: the left choice only
    assert_eq!(s.counts, vec![3, 2, 1]);
    assert_eq!(s.enumerated, 3);
    // where θ_1 = N the canonical index is n = 2
    assert_eq!(s.overlap_index, vec![1, 1, 2, 2]);
    assert_eq!(s.mixed_stages, vec![1, 1, 2, 2]);
}

#[test]
fn operator_catalogue_values() {
    let v = operators::run_example().unwrap();
    assert_eq!(v.linear, 3.0);
    assert!(close(v.discount, 3.0 * (1.0 - 0.1), 1e-12));
    let entropic = -(0.5 * (-2.0f64).exp() + 0.5 * (-4.0f64).exp()).ln();
    assert!(close(v.entropic, entropic, 1e-12));
    assert!(close(v.entropic, 2.566219, 1e-6));
    let reference: f64 = 0.6 * 4.0;
    let alternative = 0.4 * 4.0 + 0.1;
    assert!(close(v.robust, reference.min(alternative), 1e-12));
    assert_eq!(v.martingale, vec![vec![3.0, 3.0], vec![2.0, 4.0]]);
}

/// Bermudan put on the recombining-free binary lattice by direct recursion.
fn put_oracle(step: &dyn Fn(f64, f64) -> f64) -> f64 {
    fn rec(t: usize, s: f64, step: &dyn Fn(f64, f64) -> f64) -> f64 {
        let exercise = (100.0 - s).max(0.0);
        if t == 4 {
            return exercise;
        }
        let cont = step(rec(t + 1, s * 1.1, step), rec(t + 1, s * 0.9, step));
        if [0, 2, 3].contains(&t) {
            exercise.max(cont)
        } else {
            cont
        }
    }
    rec(0, 100.0, step)
}

#[test]
fn bermudan_put_prices() {
    let prices = bermudan_put::run_example().unwrap();
    let tilt = |t: f64| {
        let up = 0.5 * (t * 0.5f64).exp();
        let down = 0.5 * (-t * 0.5f64).exp();
        up / (up + down)
    };
    let q = tilt(0.8);
    let expected = [
        put_oracle(&|u, d| 0.5 * u + 0.5 * d),
        put_oracle(&|u, d| 0.98 * (0.5 * u + 0.5 * d)),
        put_oracle(&|u, d| -(0.5 * (-0.5 * u).exp() + 0.5 * (-0.5 * d).exp()).ln() / 0.5),
        put_oracle(&|u, d| (0.5 * u + 0.5 * d).min(q * u + (1.0 - q) * d + 0.5)),
    ];
    assert_eq!(prices.len(), 4);
    for (p, e) in prices.iter().zip(expected) {
        assert!(
            close(p.price, e, 1e-9),
            "{}: {} vs {}",
            p.operator,
            p.price,
            e
        );
        assert_eq!(p.exercise.len(), 16);
    }
    // all-down path: S = 81 at stage 2, deep in the money
    assert_eq!(prices[0].exercise[15], 2);
}

#[test]
fn custom_driver_by_hand() {
    let (root, up) = custom_driver::run_example().unwrap();
    let step = |a: f64, b: f64| {
        let m = 0.5 * (a + b);
        let norm = (0.5 * (a - m).powi(2) + 0.5 * (b - m).powi(2)).sqrt();
        m + 0.5 * (-0.05 * m - 0.3 * norm)
    };
    let hi = 2.0f64.max(step(3.0, 5.0));
    let lo = 0.5f64.max(step(0.0, 1.0));
    assert!(close(up, hi, 1e-12));
    assert!(close(root, 1.0f64.max(step(lo, hi)), 1e-12));
    assert!(close(root, 1.828125, 1e-12));
}

#[test]
fn oracle_check_passes() {
    let r = oracle_check::run_example().unwrap();
    assert_eq!(r.strategies, 52);
    assert!(r.gap <= 1e-9);
    assert_eq!(r.reports.len(), 12);
    for c in &r.reports {
        assert!(c.passed(), "{c:?}");
    }
}

#[test]
fn axiom_harness_separates_good_from_broken() {
    use bermudan_snell::axioms::{FATOU, KNOWN_AT_S};
    use bermudan_snell::Status;
    let h = axiom_harness::run_example().unwrap();
    for r in &h.catalogue {
        assert!(r.passed(), "{}", r.operator);
        assert_eq!(r.property(FATOU).unwrap().report.status, Status::Degenerate);
    }
    assert!(!h.broken.passed());
    let w = h.broken.witness(KNOWN_AT_S).expect("known-at-S witness");
    assert_eq!(w.rhs, 2.0);
    // (…((2²)²)…)² after `depth` steps
    assert!(w.lhs >= 4.0);
}

#[test]
fn config_run_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let (report, files) = config_run::run_example_in(dir.path()).unwrap();
    assert!(report.passed());
    assert_eq!(report.body.operators.len(), 4);
    // 4 operators × (envelope, value, 4 hitting tables, residuals)
    assert_eq!(files.len(), 28);
    let env = std::fs::read_to_string(dir.path().join("0_linear_envelope.csv")).unwrap();
    assert!(env.starts_with("grid_index,atom_id,value\n"));
    let root = env.lines().nth(1).unwrap();
    let linear = put_oracle(&|u, d| 0.5 * u + 0.5 * d);
    let v: f64 = root.rsplit(',').next().unwrap().parse().unwrap();
    assert_eq!(&root[..4], "0,0,");
    assert!(close(v, linear, 1e-9));
}

#[test]
fn corpus_sweep_all_pass() {
    let s = corpus_sweep::run_example().unwrap();
    assert_eq!(s.instances, 40);
    assert_eq!(s.passed, 40);
    assert!(s.per_check.iter().all(|(_, n)| *n == 40));
}
