use nettomo::expander::{certify_1_identifiable, KCheck};
use nettomo::fixtures;
use nettomo::netgraph::RoutingMatrix;
use nettomo::sim::{
    default_mu_grid, k_checks, normalized_error, run_identifiability_survey, run_minpath_survey,
    run_recovery_experiment, survey_rows, wilson_interval, SimConfig,
};
use proptest::prelude::*;

fn config(seed: u64) -> SimConfig {
    SimConfig {
        instances: 6,
        nodes: 60,
        exponent: 2.1,
        boundary_counts: vec![5, 8],
        k: vec![1, 2, 3],
        congested_delay: 10.0,
        mu: default_mu_grid(),
        seed,
        heuristic_rounds: None,
    }
}

#[test]
fn hand_built_certified_instance_surveys_to_one() {
    let checks = vec![k_checks(&fixtures::eight_link_routing()).unwrap()];
    assert_eq!(checks[0][0], KCheck::Pass);
    let (rows, nested) = survey_rows(6, &checks);
    assert_eq!(rows[0].fraction, Some(1.0));
    assert!(nested);
}

#[test]
fn survey_nests_and_certificates_revalidate() {
    let report = run_identifiability_survey(&config(3), 2).unwrap();
    assert!(report.nested);
    for b in [5, 8] {
        let rows: Vec<_> = report.rows.iter().filter(|r| r.boundary == b).collect();
        assert_eq!(rows.len(), 3);
        for w in rows.windows(2) {
            assert!(w[0].common_passed >= w[1].common_passed);
        }
        for r in &rows {
            assert_eq!(r.passed + r.failed + r.skipped, 6);
            if let (Some(f), Some(lo), Some(hi)) = (r.fraction, r.ci_low, r.ci_high) {
                assert!((0.0..=1.0).contains(&f) && lo <= f && f <= hi);
            }
        }
        let k1 = rows[0];
        assert_eq!(
            report.certified.iter().filter(|c| c.boundary == b).count(),
            k1.passed
        );
    }
    for c in &report.certified {
        let text = serde_json::to_string(c).unwrap();
        let back: nettomo::sim::CertifiedInstance = serde_json::from_str(&text).unwrap();
        let routing =
            RoutingMatrix::from_link_lists(back.routing.n, back.routing.paths.clone()).unwrap();
        let again = certify_1_identifiable(&routing).unwrap();
        assert!(again.verdict);
        assert_eq!(again, back.certificate);
    }
}

#[test]
fn recovery_sweep_properties() {
    let report = run_recovery_experiment(&config(5), 2).unwrap();
    assert_eq!(report.bound_violations, 0);
    assert!(report.bound_checks > 0);
    for row in &report.rows {
        assert!(row.errors.iter().all(|&e| e >= 0.0));
        if let Some(m) = row.mean {
            let oracle = row.errors.iter().sum::<f64>() / row.errors.len() as f64;
            assert_eq!(m, oracle);
        }
        if row.k == 1 && row.mu == 0.0 {
            assert!(row.errors.iter().all(|&e| e <= 1e-6));
        }
    }
    for k in [1, 2, 3] {
        assert!(report.nondecreasing_in_mu(k), "{}", report.plot_csv());
    }
}

#[test]
fn reports_are_bit_identical_across_runs_and_jobs() {
    let c = config(9);
    assert_eq!(
        run_recovery_experiment(&c, 1).unwrap().to_json(),
        run_recovery_experiment(&c, 4).unwrap().to_json()
    );
    assert_eq!(
        run_identifiability_survey(&c, 3).unwrap().to_csv(),
        run_identifiability_survey(&c, 1).unwrap().to_csv()
    );
    let a = run_minpath_survey(&c, 2).unwrap();
    assert_eq!(a.to_json(), run_minpath_survey(&c, 1).unwrap().to_json());
    assert_eq!(a.counts.iter().sum::<usize>() + a.above_one, a.successes());
}

#[test]
fn wilson_interval_matches_closed_form_cases() {
    // all successes: lower bound n / (n + z²)
    let z2 = 1.959_963_984_540_054f64.powi(2);
    for n in [1usize, 5, 50] {
        let (lo, hi) = wilson_interval(n, n).unwrap();
        assert!((lo - n as f64 / (n as f64 + z2)).abs() < 1e-12);
        assert_eq!(hi, 1.0);
        let (lo0, hi0) = wilson_interval(0, n).unwrap();
        assert_eq!(lo0, 0.0);
        assert!((hi0 - z2 / (n as f64 + z2)).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn normalized_error_is_scale_free(x in prop::collection::vec(0.1f64..10.0, 1..12), d in prop::collection::vec(-1.0f64..1.0, 12), s in 0.1f64..100.0) {
        let est: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + b).collect();
        let e = normalized_error(&x, &est);
        prop_assert!(e >= 0.0);
        let xs: Vec<f64> = x.iter().map(|v| v * s).collect();
        let es: Vec<f64> = est.iter().map(|v| v * s).collect();
        prop_assert!((normalized_error(&xs, &es) - e).abs() <= 1e-9 * (1.0 + e));
        prop_assert_eq!(normalized_error(&x, &x), 0.0);
    }

    #[test]
    fn wilson_interval_contains_estimate(n in 1usize..500, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).floor() as usize;
        let (lo, hi) = wilson_interval(k, n).unwrap();
        let p = k as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-12 && p <= hi + 1e-12 && hi <= 1.0);
    }
}
