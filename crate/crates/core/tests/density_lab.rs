use std::collections::HashSet;

use proptest::prelude::*;

use tworound::density::{
    completion_threshold, janson_params, overlap_counts, peel_bounded_degree, pi_lower_bound_check, pi_set,
    wedge_lower_bound_holds, x2_count, xs_family, ThresholdOptions, ThresholdRegime, DEFAULT_FAMILY_CAP,
};
use tworound::game::{StrategySpec, StrategyVariant};
use tworound::graph::{sample_gnm, sample_gnp};
use tworound::lab::{
    estimate_crossing, isotonic_decreasing, run_sweep, to_csv, CurvePoint, LabError, PRule, QGrid, SweepConfig,
    CSV_HEADER,
};
use tworound::RngSpec;

fn config(n: Vec<usize>, p: PRule, q: QGrid, trials: usize) -> SweepConfig {
    SweepConfig {
        n,
        p,
        q,
        trials,
        strategy: StrategySpec::default(),
        master_seed: 77,
        workers: None,
        arrival: Default::default(),
        output: None,
        format: Default::default(),
        record_runtime: false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_bound_on_dense_graphs(n in 5usize..60, extra in 0usize..200, seed in any::<u64>()) {
        let pairs = n * (n - 1) / 2;
        prop_assume!(pairs >= 2 * n);
        let m = (2 * n + extra).min(pairs);
        let s = sample_gnm(n, m, &RngSpec::new(seed, 0)).unwrap().to_edge_subset();
        prop_assert_eq!(wedge_lower_bound_holds(&s), Some(true));
    }

    #[test]
    fn family_respects_exclusion(n in 4usize..12, seed in any::<u64>()) {
        let g = sample_gnp(n, 0.3, &RngSpec::new(seed, 0)).unwrap();
        let s = g.to_edge_subset();
        let all = xs_family(&s, None);
        let cut = xs_family(&s, Some(&s));
        let banned: HashSet<_> = s.iter().collect();
        prop_assert!(cut.iter().all(|w| all.contains(w) && w.edges().iter().all(|e| !banned.contains(e))));
        prop_assert_eq!(
            cut.len(),
            all.iter().filter(|w| w.edges().iter().all(|e| !banned.contains(e))).count()
        );
        // Every wedge closes a 4-cycle through a pair of Π(S).
        let pi = pi_set(&s);
        prop_assert!(all.iter().all(|w| pi.contains(tworound::Edge::new(w.leaves.0, w.leaves.1))));
    }

    #[test]
    fn overlap_counts_are_symmetric(n in 4usize..11, seed in any::<u64>()) {
        let s = sample_gnp(n, 0.3, &RngSpec::new(seed, 0)).unwrap().to_edge_subset();
        let fam = xs_family(&s, None);
        let o = overlap_counts(&fam).unwrap();
        // Ordered pairs come in twos.
        prop_assert!(o.path.is_multiple_of(2) && o.star.is_multiple_of(2) && o.triangle.is_multiple_of(2));
        let r = janson_params(&s, 0.3, DEFAULT_FAMILY_CAP).unwrap();
        prop_assert_eq!(r.overlaps, o);
        prop_assert!(r.mu_sq_over_delta >= 0.0);
    }

    #[test]
    fn peeling_meets_its_bound(n in 20usize..80, seed in any::<u64>()) {
        let p = 0.3;
        let t = sample_gnp(n, p, &RngSpec::new(seed, 0)).unwrap().to_edge_subset();
        prop_assume!(!t.is_empty());
        if let Some(r) = peel_bounded_degree(&t, p, 2.0).unwrap() {
            prop_assert!(r.remaining.to_graph().max_degree() as f64 <= r.bound);
            prop_assert!(2 * r.removed.len() <= n);
            prop_assert!(r.remaining.iter().all(|e| t.contains(e)));
        }
    }

    #[test]
    fn threshold_branches_are_continuous_at_the_critical_point(n in 10usize..1_000_000) {
        let r = completion_threshold(n, (n as f64).powf(-0.6), &ThresholdOptions::default()).unwrap();
        let ratio = r.upper_formula / r.lower_formula;
        prop_assert!((ratio / (n as f64).powf(-0.3) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn threshold_regimes() {
    let opts = ThresholdOptions::default();
    let n = 1_000_000usize;
    let at = |g: f64| completion_threshold(n, (n as f64).powf(-g), &opts).unwrap();
    assert_eq!(at(0.52).regime, ThresholdRegime::Upper);
    assert_eq!(at(0.66).regime, ThresholdRegime::Lower);
    assert_eq!(at(0.7).regime, ThresholdRegime::BelowRange);
    assert_eq!(at(0.45).regime, ThresholdRegime::Zero);
    assert!(at(0.52).value.is_some() && at(0.45).value.is_none());
    assert!(completion_threshold(2, 0.5, &opts).is_err());
    assert!(completion_threshold(10, 1.0, &opts).is_err());
}

#[test]
fn pi_bound_report_is_consistent() {
    let host = sample_gnp(80, 0.2, &RngSpec::new(4, 0)).unwrap();
    let theta = tworound::density::observed_theta(&host, 0.2);
    let r = pi_lower_bound_check(&host.to_edge_subset(), 0.2, theta);
    assert_eq!(r.x2, x2_count(&host.to_edge_subset()));
    assert_eq!(r.bound_holds, 12 * r.pi >= r.x2);
    assert!(!r.is_counterexample());
}

#[test]
fn negligible_q_always_succeeds() {
    let cfg = config(vec![50], PRule::Exponents(vec![0.6]), QGrid::Values(vec![1e-12]), 100);
    let r = &run_sweep(&cfg).unwrap()[0];
    assert_eq!(r.successes, 100);
    assert!(r.wilson_lo > 0.95 && r.wilson_hi == 1.0);
}

#[test]
fn complete_second_round_always_fails() {
    let cfg = config(vec![50], PRule::Values(vec![0.2]), QGrid::Values(vec![1.0]), 50);
    let r = &run_sweep(&cfg).unwrap()[0];
    assert_eq!(r.successes, 0);
    assert!(r.wilson_lo == 0.0 && r.wilson_hi < 0.1);
}

#[test]
fn trials_are_accounted_for() {
    let mut cfg = config(
        vec![30, 60],
        PRule::Exponents(vec![0.5, 0.6]),
        QGrid::LogSpaced { lo: 1e-3, hi: 0.1, points: 3 },
        20,
    );
    cfg.strategy = StrategySpec::new(StrategyVariant::NaiveTriangleFree, 10).unwrap();
    let res = run_sweep(&cfg).unwrap();
    assert_eq!(res.len(), 12);
    for r in &res {
        assert_eq!(r.successes + r.failures + r.first_round_failures + r.errors, r.trials);
        assert_eq!(r.errors, 0);
        assert!(0.0 <= r.wilson_lo && r.wilson_lo <= r.wilson_hi && r.wilson_hi <= 1.0);
        assert_eq!(r.flagged, 10 * r.first_round_failures > r.trials);
    }
    // A 10-node search budget at p = n^-0.5 runs out on most hosts.
    assert!(res.iter().any(|r| r.flagged));
    assert!(to_csv(&res).starts_with(CSV_HEADER));
}

#[test]
fn invalid_configs_are_rejected() {
    let bad = [
        config(vec![], PRule::Exponents(vec![0.6]), QGrid::default(), 1),
        config(vec![50], PRule::Exponents(vec![0.6]), QGrid::Values(vec![0.0]), 1),
        config(vec![50], PRule::Values(vec![0.5]), QGrid::Values(vec![1.5]), 1),
        config(vec![50], PRule::Exponents(vec![0.6]), QGrid::default(), 0),
    ];
    for cfg in bad {
        assert!(matches!(run_sweep(&cfg), Err(LabError::Config(_))), "{cfg:?}");
    }
    assert!(SweepConfig::from_json(r#"{"n":[50],"p":{"exponents":[0.6]},"trials":1,"master_seed":0,"extra":1}"#).is_err());
    let ok = SweepConfig::from_json(r#"{"n":[50],"p":{"exponents":[0.55]},"trials":1,"master_seed":0}"#).unwrap();
    assert_eq!(ok.q, QGrid::default());
}

#[test]
fn success_curve_crosses_one_half() {
    let cfg = config(
        vec![100],
        PRule::Exponents(vec![0.55]),
        QGrid::LogSpaced { lo: 1e-3, hi: 0.1, points: 5 },
        100,
    );
    let res = run_sweep(&cfg).unwrap();
    let pts: Vec<CurvePoint> = res.iter().map(CurvePoint::from).collect();
    let c = estimate_crossing(&pts, 200, &RngSpec::new(1, 0)).unwrap();
    assert!(c.q_hat.is_finite() && c.lo <= c.q_hat && c.q_hat <= c.hi);
    assert!(1e-3 < c.q_hat && c.q_hat < 0.1);
    // Nonincreasing up to interval width.
    for w in res.windows(2) {
        assert!(w[1].wilson_lo <= w[0].wilson_hi, "{} then {}", w[0].successes, w[1].successes);
    }
}

#[test]
fn crossing_examples() {
    let pts = |rates: &[usize]| -> Vec<CurvePoint> {
        rates
            .iter()
            .enumerate()
            .map(|(i, &s)| CurvePoint { q: 10f64.powi(i as i32 - 3), successes: s, trials: 100 })
            .collect()
    };
    let c = estimate_crossing(&pts(&[90, 50, 10]), 500, &RngSpec::new(2, 0)).unwrap();
    assert!((c.q_hat / 1e-2 - 1.0).abs() < 1e-9);
    assert!(c.lo <= 1e-2 && 1e-2 <= c.hi);
    assert!(matches!(estimate_crossing(&pts(&[100, 100, 100]), 10, &RngSpec::new(2, 0)), Err(LabError::NoCrossing)));
    assert!(matches!(estimate_crossing(&pts(&[90, 10]), 10, &RngSpec::new(2, 0)), Err(LabError::TooFewPoints(_))));
}

#[test]
fn bootstrap_interval_is_calibrated() {
    // Simulate curves from a known logistic truth and count how often the
    // interval covers the true crossing.
    let qs: Vec<f64> = (0..7).map(|i| 10f64.powf(-4.0 + 0.5 * i as f64)).collect();
    let truth = 10f64.powf(-2.5);
    let rate = |q: f64| 1.0 / (1.0 + (2.0 * (q / truth).ln()).exp());
    let mut covered = 0;
    let runs = 200;
    for r in 0..runs {
        let mut rng = RngSpec::new(3, r).rng();
        let pts: Vec<CurvePoint> = qs
            .iter()
            .map(|&q| CurvePoint {
                q,
                successes: (0..100).filter(|_| rand::Rng::random::<f64>(&mut rng) < rate(q)).count(),
                trials: 100,
            })
            .collect();
        if let Ok(c) = estimate_crossing(&pts, 300, &RngSpec::new(4, r)) {
            if c.lo <= truth && truth <= c.hi {
                covered += 1;
            }
        }
    }
    let frac = covered as f64 / runs as f64;
    assert!(frac >= 0.85, "coverage {frac}");
}

#[test]
fn isotonic_fit_is_nonincreasing() {
    let fit = isotonic_decreasing(&[0.9, 0.95, 0.4, 0.5, 0.1], &[1.0; 5]);
    assert!(fit.windows(2).all(|w| w[0] >= w[1]));
    assert!((fit.iter().sum::<f64>() - 2.85).abs() < 1e-12);
}
