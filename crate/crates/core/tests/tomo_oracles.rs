use nettomo::expander::{certify_1_identifiable, quarter};
use nettomo::fixtures;
use nettomo::netgraph::RoutingMatrix;
use nettomo::tomo::{
    appendix_error_bound, check_null_space_property, check_null_vector, error_bound,
    estimate_delays, estimate_delays_with, null_space_basis, rank, BoundConvention, DelayVector,
    SignModel, SupportMask,
};
use num_rational::Ratio;
use proptest::prelude::*;

/// Rank by fraction-free (Bareiss) elimination in integers.
fn bareiss_rank(rows: &[Vec<u8>]) -> usize {
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| i128::from(v)).collect())
        .collect();
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = 1i128;
    for c in 0..n {
        let Some(p) = (rank..m).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(rank, p);
        for i in rank + 1..m {
            for j in c + 1..n {
                a[i][j] = (a[rank][c] * a[i][j] - a[i][c] * a[rank][j]) / prev;
            }
            a[i][c] = 0;
        }
        prev = a[rank][c];
        rank += 1;
    }
    rank
}

fn project_residual(basis: &[Vec<f64>], v: &[f64]) -> f64 {
    let mut r = v.to_vec();
    for q in basis {
        let dot: f64 = r.iter().zip(q).map(|(a, b)| a * b).sum();
        r.iter_mut().zip(q).for_each(|(a, b)| *a -= dot * b);
    }
    r.iter().map(|a| a * a).sum::<f64>().sqrt()
}

const W1: [f64; 8] = [0.36, -0.36, -0.23, -0.14, 0.59, -0.23, 0.36, -0.36];
/// Second reference null vector with its last entry's sign corrected.
const W2: [f64; 8] = [-0.18, 0.18, -0.45, 0.63, 0.26, -0.45, -0.18, 0.18];
const W: [f64; 8] = [0.31, -0.31, -0.36, 0.05, 0.67, -0.36, 0.31, -0.31];

#[test]
fn eight_link_measurement() {
    let r = fixtures::eight_link_routing();
    let mut x = vec![0.1; 8];
    x[4] = 1.0;
    let y = DelayVector::new(x).unwrap().measure(&r).unwrap();
    let want = [0.2, 0.3, 1.2, 0.3, 1.2, 0.2];
    for (a, b) in y.values().iter().zip(want) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn eight_link_null_space_contains_reference_vectors() {
    let r = fixtures::eight_link_routing();
    let basis = null_space_basis(&r);
    assert_eq!(basis.len(), 2);
    // two-decimal printing allows roughly 0.005 per entry
    for v in [&W1[..], &W2[..], &W[..]] {
        assert!(project_residual(&basis, v) < 0.02, "{v:?}");
    }
    let combined: Vec<f64> = W1.iter().zip(W2).map(|(a, b)| a + 0.3 * b).collect();
    for (a, b) in combined.iter().zip(W) {
        assert!((a - b).abs() <= 0.01);
    }
}

#[test]
fn reference_null_vector_satisfies_singleton_inequality() {
    let w: Vec<f64> = W1.iter().zip(W2).map(|(a, b)| a + 0.3 * b).collect();
    for v in [&w[..], &W[..]] {
        let (on, off) = SupportMask::singleton(0).split_l1(v);
        // rounded entries of the reference vector add up to 2.37
        assert!((on - 0.31).abs() <= 0.01 + 1e-9);
        assert!((off - 2.36).abs() <= 0.01 + 1e-9);
        assert!(on <= 0.5 * off);
        assert!(check_null_vector(v, quarter()).unwrap().slack >= 0.0);
    }
}

#[test]
fn seeded_null_space_samples_pass() {
    let report = check_null_space_property(&fixtures::eight_link_routing(), 100, 7).unwrap();
    assert!(report.passes, "{report:?}");
    assert_eq!(report.dimension, 2);
    assert!(report.worst_slack >= -1e-9);
    let again = check_null_space_property(&fixtures::eight_link_routing(), 100, 7).unwrap();
    assert_eq!(report, again);
}

#[test]
fn null_space_dimensions_match_rank_oracle() {
    for r in [
        fixtures::five_link_routing(),
        fixtures::eight_link_routing(),
        fixtures::six_link_triangle_routing(),
        fixtures::five_link_candidate_routing(),
    ] {
        let oracle = bareiss_rank(&r.entries().to_rows());
        assert_eq!(rank(&r), oracle);
        assert_eq!(null_space_basis(&r).len(), r.link_count() - oracle);
    }
}

#[test]
fn unit_vectors_recovered_on_eight_link_network() {
    let r = fixtures::eight_link_routing();
    for j in 0..8 {
        let x = DelayVector::unit(8, j);
        let est = estimate_delays(&r, &x.measure(&r).unwrap()).unwrap();
        assert!(
            est.l1_error(x.values()) <= 1e-6,
            "link {j}: {:?}",
            est.estimate
        );
    }
}

#[test]
fn background_vector_within_bounds() {
    let r = fixtures::eight_link_routing();
    let mut x = vec![0.1; 8];
    x[4] = 1.0;
    let x = DelayVector::new(x).unwrap();
    let est = estimate_delays(&r, &x.measure(&r).unwrap()).unwrap();
    assert!(est.residual <= 1e-9);
    assert!(est.objective <= 1.7 + 1e-9);
    let formula = error_bound(&x, quarter(), BoundConvention::Formula).unwrap();
    assert!((formula - 4.2).abs() < 1e-12);
    assert!(est.l1_error(x.values()) <= formula);
}

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Vec<Vec<u8>>> {
    (2..=max_rows, 2..=max_cols)
        .prop_flat_map(|(r, n)| prop::collection::vec(prop::collection::vec(0u8..=1, n), r))
}

/// Every link on some path and every path nonempty.
fn covered(rows: &[Vec<u8>]) -> bool {
    (0..rows[0].len()).all(|j| rows.iter().any(|r| r[j] == 1))
        && rows.iter().all(|r| r.contains(&1))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn rank_matches_bareiss(rows in matrix(7, 8)) {
        prop_assume!(covered(&rows));
        let r = RoutingMatrix::from_dense(&rows).unwrap();
        let oracle = bareiss_rank(&rows);
        prop_assert_eq!(rank(&r), oracle);
        let basis = null_space_basis(&r);
        prop_assert_eq!(basis.len(), r.link_count() - oracle);
        for w in &basis {
            prop_assert!(r.mul_vec(w).iter().all(|v| v.abs() < 1e-9));
        }
    }

    #[test]
    fn estimate_is_feasible_and_minimal(rows in matrix(7, 8), xs in prop::collection::vec(0.0f64..5.0, 8)) {
        prop_assume!(covered(&rows));
        let r = RoutingMatrix::from_dense(&rows).unwrap();
        let x = DelayVector::new(xs[..r.link_count()].to_vec()).unwrap();
        let y = x.measure(&r).unwrap();
        let est = estimate_delays(&r, &y).unwrap();
        let ymax = y.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!(est.residual <= 1e-9 * ymax);
        prop_assert!(est.objective <= x.values().iter().sum::<f64>() + 1e-9);
        prop_assert!(est.estimate.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn certified_matrices_recover_unit_vectors(rows in matrix(8, 7)) {
        prop_assume!(covered(&rows));
        let r = RoutingMatrix::from_dense(&rows).unwrap();
        prop_assume!(certify_1_identifiable(&r).unwrap().verdict);
        let n = r.link_count();
        for j in 0..n {
            let x = DelayVector::unit(n, j);
            let est = estimate_delays(&r, &x.measure(&r).unwrap()).unwrap();
            prop_assert!(est.l1_error(x.values()) <= 1e-6, "link {} -> {:?}", j, est.estimate);
            let signed = estimate_delays_with(&r, x.measure(&r).unwrap().values(), SignModel::Signed).unwrap();
            prop_assert!(signed.l1_error(x.values()) <= 1e-6);
        }
    }

    #[test]
    fn certified_matrices_respect_error_bounds(
        rows in matrix(8, 7),
        big in 0usize..7,
        background in prop::collection::vec(0.0f64..0.5, 7),
    ) {
        prop_assume!(covered(&rows));
        let r = RoutingMatrix::from_dense(&rows).unwrap();
        let cert = certify_1_identifiable(&r).unwrap();
        prop_assume!(cert.verdict);
        let n = r.link_count();
        let mut xs = background[..n].to_vec();
        xs[big % n] = 10.0;
        let x = DelayVector::new(xs).unwrap();
        let est = estimate_delays(&r, &x.measure(&r).unwrap()).unwrap();
        let err = est.l1_error(x.values());
        let eps = cert.max_epsilon();
        prop_assert!(err <= appendix_error_bound(&x, eps).unwrap() + 1e-9);
        if cert.classes.len() == 1 {
            prop_assert!(err <= error_bound(&x, eps, BoundConvention::Formula).unwrap() + 1e-9);
        }
    }

    #[test]
    fn null_space_property_on_single_class_certified(rows in matrix(8, 7), seed in any::<u64>()) {
        prop_assume!(covered(&rows));
        let r = RoutingMatrix::from_dense(&rows).unwrap();
        let cert = certify_1_identifiable(&r).unwrap();
        prop_assume!(cert.verdict && cert.classes.len() == 1);
        let report = check_null_space_property(&r, 20, seed).unwrap();
        prop_assert!(report.passes, "{:?}", report);
    }
}

#[test]
fn worked_constant_only_at_quarter() {
    let x = DelayVector::new(vec![1.0, 0.1, 0.1]).unwrap();
    assert!(error_bound(&x, Ratio::new(1, 8), BoundConvention::WorkedExample).is_err());
    let b = error_bound(&x, quarter(), BoundConvention::WorkedExample).unwrap();
    assert!((b - 0.3).abs() < 1e-12);
}
