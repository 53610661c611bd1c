//! Expansion certificates for routing matrices.
//!
//! A routing matrix is split into column-degree classes. Each class is a
//! left-regular bipartite graph; it is certified as a `(2, d, ε)`-expander
//! with `ε = λ / (2d)`, where `λ` is the largest number of paths shared by
//! two links of the class. The whole matrix certifies as 1-identifiable when
//! every class has `ε ≤ 1/4`. All comparisons use exact rationals.

use std::fmt;

use num_rational::Ratio;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netgraph::{BinaryMatrix, BipartiteGraph, LinkId, RoutingMatrix};

/// Largest left side accepted by [`exhaustive_expander_check`].
pub const MAX_EXHAUSTIVE_LEFT: usize = 40;

/// Error parameter threshold for 1-identifiability.
pub fn quarter() -> Ratio<u64> {
    Ratio::new(1, 4)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpanderError {
    #[error("links {0:?} are not covered by any path")]
    UncoveredLinks(Vec<LinkId>),
    #[error("bipartite graph is not left-regular")]
    NotRegular,
    #[error("exhaustive check limited to {limit} left nodes, graph has {left}")]
    SizeGuard { left: usize, limit: usize },
    #[error("expansion factor must be at least 1")]
    BadExpansionFactor,
    #[error("link index {0} out of range")]
    UnknownLink(LinkId),
    #[error("pairwise conditions need two distinct links")]
    SameLink,
}

/// Links sharing one column degree, with their column slice of `R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeClass {
    pub degree: usize,
    pub links: Vec<LinkId>,
    pub submatrix: BinaryMatrix,
}

impl DegreeClass {
    pub fn bipartite(&self) -> BipartiteGraph {
        let left = self.links.iter().map(|l| format!("l{}", l + 1)).collect();
        let right = (1..=self.submatrix.rows())
            .map(|i| format!("P{i}"))
            .collect();
        BipartiteGraph::new(left, right, self.submatrix.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionReport {
    #[serde(rename = "d")]
    pub degree: usize,
    pub lambda: u64,
    #[serde(with = "ratio_string")]
    pub epsilon: Ratio<u64>,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpanderCertificate {
    pub classes: Vec<ExpansionReport>,
    pub verdict: bool,
    pub failing_pairs: Vec<(LinkId, LinkId)>,
}

impl ExpanderCertificate {
    /// Largest ε over all classes (0 for an empty certificate).
    pub fn max_epsilon(&self) -> Ratio<u64> {
        self.classes
            .iter()
            .map(|c| c.epsilon)
            .max()
            .unwrap_or_else(|| Ratio::from_integer(0))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

mod ratio_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<u64>, D::Error> {
        let s = String::deserialize(d)?;
        let (p, q) = s
            .split_once('/')
            .ok_or_else(|| de::Error::custom(format!("expected p/q, got {s:?}")))?;
        let p: u64 = p.trim().parse().map_err(de::Error::custom)?;
        let q: u64 = q.trim().parse().map_err(de::Error::custom)?;
        if q == 0 {
            return Err(de::Error::custom("zero denominator"));
        }
        Ok(Ratio::new(p, q))
    }
}

/// Splits the columns of `routing` by their sum, ascending by degree.
pub fn degree_decompose(routing: &RoutingMatrix) -> Result<Vec<DegreeClass>, ExpanderError> {
    let degrees = routing.link_degrees();
    let uncovered = routing.uncovered_links();
    if !uncovered.is_empty() {
        return Err(ExpanderError::UncoveredLinks(uncovered));
    }
    let mut distinct: Vec<usize> = degrees.clone();
    distinct.sort_unstable();
    distinct.dedup();
    Ok(distinct
        .into_iter()
        .map(|d| {
            let links: Vec<LinkId> = (0..degrees.len()).filter(|&j| degrees[j] == d).collect();
            let submatrix = routing.entries().select_columns(&links);
            DegreeClass {
                degree: d,
                links,
                submatrix,
            }
        })
        .collect())
}

/// `λ` and `ε = λ/(2d)` for one class; a single-link class has `λ = 0`.
pub fn epsilon_of(class: &DegreeClass) -> ExpansionReport {
    report_for(class.degree, class_lambda(class))
}

fn report_for(degree: usize, lambda: u64) -> ExpansionReport {
    let epsilon = Ratio::new(lambda, 2 * degree as u64);
    ExpansionReport {
        degree,
        lambda,
        epsilon,
        passes: epsilon <= quarter(),
    }
}

/// Largest off-diagonal entry of the class's common-neighbor matrix.
fn class_lambda(class: &DegreeClass) -> u64 {
    let g = class.submatrix.gram();
    let mut best = 0;
    for (i, row) in g.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if i != j {
                best = best.max(v);
            }
        }
    }
    best
}

/// Runs the degree decomposition and certifies every class.
pub fn certify_1_identifiable(
    routing: &RoutingMatrix,
) -> Result<ExpanderCertificate, ExpanderError> {
    let classes = degree_decompose(routing)?;
    let mut reports = Vec::with_capacity(classes.len());
    let mut failing_pairs = Vec::new();
    for class in &classes {
        let lambda = class_lambda(class);
        let report = report_for(class.degree, lambda);
        if !report.passes {
            let g = class.submatrix.gram();
            for a in 0..class.links.len() {
                for b in a + 1..class.links.len() {
                    if g[a][b] == lambda {
                        failing_pairs.push((class.links[a], class.links[b]));
                    }
                }
            }
        }
        reports.push(report);
    }
    failing_pairs.sort_unstable();
    let verdict = reports.iter().all(|r| r.passes);
    Ok(ExpanderCertificate {
        classes: reports,
        verdict,
        failing_pairs,
    })
}

/// Which of the three mutually exclusive pair conditions holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairCondition {
    /// `deg(i) > deg(j)`
    FirstHigher,
    /// `deg(i) < deg(j)`
    SecondHigher,
    /// Equal degrees and `deg(i) + deg(j) - 4·deg(i,j) ≥ 0`.
    EqualDegreeExpanding,
    /// Equal degrees sharing too many paths.
    Violation { degree: usize, shared: usize },
}

impl fmt::Display for PairCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairCondition::FirstHigher => write!(f, "deg(i) > deg(j)"),
            PairCondition::SecondHigher => write!(f, "deg(i) < deg(j)"),
            PairCondition::EqualDegreeExpanding => write!(f, "deg(i)+deg(j)-4deg(i,j) >= 0"),
            PairCondition::Violation { degree, shared } => {
                write!(f, "violation: degree {degree}, {shared} shared paths")
            }
        }
    }
}

pub fn pairwise_conditions(
    routing: &RoutingMatrix,
    i: LinkId,
    j: LinkId,
) -> Result<PairCondition, ExpanderError> {
    let n = routing.link_count();
    for l in [i, j] {
        if l >= n {
            return Err(ExpanderError::UnknownLink(l));
        }
    }
    if i == j {
        return Err(ExpanderError::SameLink);
    }
    let degs = routing.link_degrees();
    let shared = routing.shared_paths(i, j);
    Ok(classify_pair(degs[i], degs[j], shared))
}

pub(crate) fn classify_pair(di: usize, dj: usize, shared: usize) -> PairCondition {
    use std::cmp::Ordering::*;
    match di.cmp(&dj) {
        Greater => PairCondition::FirstHigher,
        Less => PairCondition::SecondHigher,
        Equal if di + dj >= 4 * shared => PairCondition::EqualDegreeExpanding,
        Equal => PairCondition::Violation { degree: di, shared },
    }
}

/// Ground-truth expansion check: every left subset `Φ` with `|Φ| ≤ phi`
/// must have `|N(Φ)| ≥ (1 − ε)·d·|Φ|`.
pub fn exhaustive_expander_check(
    bg: &BipartiteGraph,
    phi: usize,
    epsilon: Ratio<u64>,
) -> Result<bool, ExpanderError> {
    if phi == 0 {
        return Err(ExpanderError::BadExpansionFactor);
    }
    let n_left = bg.left().len();
    if n_left > MAX_EXHAUSTIVE_LEFT {
        return Err(ExpanderError::SizeGuard {
            left: n_left,
            limit: MAX_EXHAUSTIVE_LEFT,
        });
    }
    if n_left == 0 {
        return Ok(true);
    }
    let d = bg.left_regular_degree().ok_or(ExpanderError::NotRegular)?;
    let words = bg.right().len().div_ceil(64).max(1);
    let sets: Vec<Vec<u64>> = (0..n_left)
        .map(|j| {
            let mut bits = vec![0u64; words];
            for i in bg.neighbors_of_left(j) {
                bits[i / 64] |= 1 << (i % 64);
            }
            bits
        })
        .collect();
    // |N|·q ≥ (q − p)·d·|Φ|
    let p = *epsilon.numer() as i128;
    let q = *epsilon.denom() as i128;
    let need = |size: usize| (q - p) * d as i128 * size as i128;
    let phi = phi.min(n_left);

    let mut stack_union: Vec<Vec<u64>> = vec![vec![0u64; words]; phi + 1];
    fn recurse(
        start: usize,
        depth: usize,
        phi: usize,
        sets: &[Vec<u64>],
        unions: &mut Vec<Vec<u64>>,
        q: i128,
        need: &dyn Fn(usize) -> i128,
    ) -> bool {
        for j in start..sets.len() {
            let (lower, upper) = unions.split_at_mut(depth + 1);
            let prev = &lower[depth];
            let cur = &mut upper[0];
            let mut count = 0u32;
            for ((c, &a), &b) in cur.iter_mut().zip(prev.iter()).zip(sets[j].iter()) {
                *c = a | b;
                count += c.count_ones();
            }
            if (count as i128) * q < need(depth + 1) {
                return false;
            }
            if depth + 1 < phi && !recurse(j + 1, depth + 1, phi, sets, unions, q, need) {
                return false;
            }
        }
        true
    }
    Ok(recurse(0, 0, phi, &sets, &mut stack_union, q, &need))
}

/// Outcome of a k-identifiability test on one routing matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KCheck {
    Pass,
    Fail,
    Skipped,
}

/// k = 1 uses the λ certificate; k ≥ 2 runs the exhaustive check with
/// `φ = 2k`, `ε = 1/4` on every degree class. A class larger than
/// [`MAX_EXHAUSTIVE_LEFT`] makes the result `Skipped` unless another class
/// already fails.
pub fn k_identifiable(routing: &RoutingMatrix, k: usize) -> Result<KCheck, ExpanderError> {
    let cert = certify_1_identifiable(routing)?;
    if !cert.verdict {
        return Ok(KCheck::Fail);
    }
    if k <= 1 {
        return Ok(KCheck::Pass);
    }
    let mut skipped = false;
    for class in degree_decompose(routing)? {
        match exhaustive_expander_check(&class.bipartite(), 2 * k, quarter()) {
            Ok(true) => {}
            Ok(false) => return Ok(KCheck::Fail),
            Err(ExpanderError::SizeGuard { .. }) => skipped = true,
            Err(e) => return Err(e),
        }
    }
    Ok(if skipped {
        KCheck::Skipped
    } else {
        KCheck::Pass
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn r(rows: &[&[u8]]) -> RoutingMatrix {
        RoutingMatrix::from_dense(rows).unwrap()
    }

    #[test]
    fn triangle_decomposes_into_two_classes() {
        let classes = degree_decompose(&fixtures::six_link_triangle_routing()).unwrap();
        assert_eq!(classes.len(), 2);
        assert_eq!(
            (classes[0].degree, classes[0].links.clone()),
            (1, vec![1, 2, 3])
        );
        assert_eq!(
            (classes[1].degree, classes[1].links.clone()),
            (2, vec![0, 4, 5])
        );
        for c in &classes {
            assert!(c.submatrix.col_sums().iter().all(|&s| s == c.degree));
        }
    }

    #[test]
    fn eight_link_single_class() {
        let classes = degree_decompose(&fixtures::eight_link_routing()).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].degree, 2);
        assert_eq!(classes[0].links, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn all_ones_single_class() {
        let classes = degree_decompose(&r(&[&[1, 1, 1, 1], &[1, 1, 1, 1], &[1, 1, 1, 1]])).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].degree, 3);
    }

    #[test]
    fn uncovered_link_named() {
        let err = degree_decompose(&r(&[&[1, 0, 1]])).unwrap_err();
        assert_eq!(err, ExpanderError::UncoveredLinks(vec![1]));
    }

    #[test]
    fn epsilon_quarter_on_regular_fixtures() {
        for routing in [
            fixtures::eight_link_routing(),
            fixtures::five_link_routing(),
        ] {
            let classes = degree_decompose(&routing).unwrap();
            let rep = epsilon_of(&classes[0]);
            assert_eq!((rep.degree, rep.lambda), (2, 1));
            assert_eq!(rep.epsilon, Ratio::new(1, 4));
            assert!(rep.passes);
        }
    }

    #[test]
    fn matching_has_zero_epsilon() {
        let routing = RoutingMatrix::from_dense(&BinaryMatrix::identity(3).to_rows()).unwrap();
        let rep = epsilon_of(&degree_decompose(&routing).unwrap()[0]);
        assert_eq!(rep.lambda, 0);
        assert_eq!(rep.epsilon, Ratio::from_integer(0));
        assert!(rep.passes);
    }

    #[test]
    fn single_link_class_lambda_zero() {
        let routing = r(&[&[1, 1], &[1, 0]]);
        let classes = degree_decompose(&routing).unwrap();
        assert!(classes.iter().all(|c| epsilon_of(c).lambda == 0));
    }

    #[test]
    fn degree_one_links_sharing_a_path_fail() {
        // two links seen only by the same path cannot be told apart
        let routing = r(&[&[1, 1, 0], &[0, 0, 1]]);
        let cert = certify_1_identifiable(&routing).unwrap();
        assert!(!cert.verdict);
        assert_eq!(cert.failing_pairs, vec![(0, 1)]);
    }

    #[test]
    fn certificates_of_fixtures() {
        let c9 = certify_1_identifiable(&fixtures::eight_link_routing()).unwrap();
        assert!(c9.verdict);
        assert!(c9.failing_pairs.is_empty());
        let c22 = certify_1_identifiable(&fixtures::six_link_triangle_routing()).unwrap();
        assert!(c22.verdict);
        assert_eq!(c22.classes.len(), 2);
    }

    #[test]
    fn duplicated_rows_fail_with_witness() {
        let cert = certify_1_identifiable(&r(&[&[1, 1], &[1, 1]])).unwrap();
        assert!(!cert.verdict);
        assert_eq!(cert.classes[0].lambda, 2);
        assert_eq!(cert.classes[0].epsilon, Ratio::new(1, 2));
        assert_eq!(cert.failing_pairs, vec![(0, 1)]);
    }

    #[test]
    fn certificate_json_layout() {
        let cert = certify_1_identifiable(&fixtures::eight_link_routing()).unwrap();
        assert_eq!(
            cert.to_json(),
            r#"{"classes":[{"d":2,"lambda":1,"epsilon":"1/4","passes":true}],"verdict":true,"failing_pairs":[]}"#
        );
        let back: ExpanderCertificate = serde_json::from_str(&cert.to_json()).unwrap();
        assert_eq!(back, cert);
    }

    #[test]
    fn pair_conditions_examples() {
        let r9 = fixtures::eight_link_routing();
        assert_eq!(
            pairwise_conditions(&r9, 0, 1).unwrap(),
            PairCondition::EqualDegreeExpanding
        );
        let r22 = fixtures::six_link_triangle_routing();
        assert_eq!(
            pairwise_conditions(&r22, 0, 1).unwrap(),
            PairCondition::FirstHigher
        );
        assert_eq!(
            pairwise_conditions(&r22, 1, 0).unwrap(),
            PairCondition::SecondHigher
        );
        let dup = r(&[&[1, 1], &[1, 1]]);
        assert_eq!(
            pairwise_conditions(&dup, 0, 1).unwrap(),
            PairCondition::Violation {
                degree: 2,
                shared: 2
            }
        );
        assert_eq!(
            pairwise_conditions(&dup, 0, 0).unwrap_err(),
            ExpanderError::SameLink
        );
        assert_eq!(
            pairwise_conditions(&dup, 0, 5).unwrap_err(),
            ExpanderError::UnknownLink(5)
        );
    }

    #[test]
    fn exhaustive_examples() {
        let bg = crate::netgraph::to_bipartite(&fixtures::eight_link_routing());
        assert!(exhaustive_expander_check(&bg, 2, quarter()).unwrap());
        // {l1,l2} has 3 neighbors < 0.9·2·2
        assert!(!exhaustive_expander_check(&bg, 2, Ratio::new(1, 10)).unwrap());
        assert!(exhaustive_expander_check(&bg, 1, Ratio::from_integer(0)).unwrap());
    }

    #[test]
    fn exhaustive_rejects_irregular_and_large() {
        let bg = crate::netgraph::to_bipartite(&fixtures::six_link_triangle_routing());
        assert_eq!(
            exhaustive_expander_check(&bg, 2, quarter()).unwrap_err(),
            ExpanderError::NotRegular
        );
        let big = BipartiteGraph::from_biadjacency(BinaryMatrix::identity(41));
        assert!(matches!(
            exhaustive_expander_check(&big, 1, quarter()),
            Err(ExpanderError::SizeGuard { left: 41, .. })
        ));
    }

    #[test]
    fn k_checks_on_fixtures() {
        let r9 = fixtures::eight_link_routing();
        assert_eq!(k_identifiable(&r9, 1).unwrap(), KCheck::Pass);
        let k2 = k_identifiable(&r9, 2).unwrap();
        assert_ne!(k2, KCheck::Skipped);
        let dup = r(&[&[1, 1], &[1, 1]]);
        assert_eq!(k_identifiable(&dup, 3).unwrap(), KCheck::Fail);
    }
}
