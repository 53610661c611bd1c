//! Link-delay estimation by l1 minimization, recovery error bounds and the
//! null-space property of routing matrices.

use std::collections::BTreeSet;

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expander::{certify_1_identifiable, quarter, ExpanderError};
use crate::lp::{solve_lp, LpError, LpProblem, LpStatus, Relation};
use crate::netgraph::RoutingMatrix;

mod io;
mod nullspace;

pub use io::{format_vector, parse_vector, read_vector};
pub use nullspace::{null_space_basis, rank};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TomoError {
    #[error("vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("entry {index} is {value}; delays must be finite and nonnegative")]
    BadEntry { index: usize, value: f64 },
    #[error("vector is empty")]
    Empty,
    #[error("measurements are inconsistent: no nonnegative delays reproduce them")]
    Inconsistent,
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("epsilon {0} outside [0, 1/4]")]
    EpsilonOutOfRange(Ratio<u64>),
    #[error("worked-example constant is only defined at epsilon = 1/4, got {0}")]
    ConventionUndefined(Ratio<u64>),
    #[error("null-space check not applicable: {0}")]
    NotApplicable(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Expander(#[from] ExpanderError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

impl From<std::io::Error> for TomoError {
    fn from(e: std::io::Error) -> Self {
        TomoError::Io(e.to_string())
    }
}

fn check_entries(values: &[f64]) -> Result<(), TomoError> {
    match values.iter().position(|v| !v.is_finite() || *v < 0.0) {
        Some(index) => Err(TomoError::BadEntry {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

/// Nonnegative per-link delays.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DelayVector(Vec<f64>);

impl DelayVector {
    pub fn new(values: Vec<f64>) -> Result<Self, TomoError> {
        check_entries(&values)?;
        Ok(DelayVector(values))
    }

    pub fn zeros(n: usize) -> Self {
        DelayVector(vec![0.0; n])
    }

    pub fn unit(n: usize, link: usize) -> Self {
        let mut v = vec![0.0; n];
        v[link] = 1.0;
        DelayVector(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// End-to-end delays `R x`.
    pub fn measure(&self, routing: &RoutingMatrix) -> Result<Measurement, TomoError> {
        if self.len() != routing.link_count() {
            return Err(TomoError::LengthMismatch {
                expected: routing.link_count(),
                found: self.len(),
            });
        }
        Ok(Measurement(routing.mul_vec(&self.0)))
    }
}

/// Per-path end-to-end delays.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Measurement(Vec<f64>);

impl Measurement {
    pub fn new(values: Vec<f64>) -> Result<Self, TomoError> {
        check_entries(&values)?;
        Ok(Measurement(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A support set `S`; [`SupportMask::apply`] keeps entries on `S` and zeroes
/// the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportMask {
    indices: BTreeSet<usize>,
}

impl SupportMask {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        SupportMask {
            indices: indices.into_iter().collect(),
        }
    }

    pub fn singleton(i: usize) -> Self {
        Self::new([i])
    }

    pub fn indices(&self) -> &BTreeSet<usize> {
        &self.indices
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.contains(&i)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, &v)| if self.contains(i) { v } else { 0.0 })
            .collect()
    }

    pub fn complement(&self, n: usize) -> SupportMask {
        SupportMask::new((0..n).filter(|i| !self.contains(*i)))
    }

    /// `(‖x_S‖₁, ‖x_{S^c}‖₁)`
    pub fn split_l1(&self, x: &[f64]) -> (f64, f64) {
        x.iter().enumerate().fold((0.0, 0.0), |(on, off), (i, v)| {
            if self.contains(i) {
                (on + v.abs(), off)
            } else {
                (on, off + v.abs())
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelayEstimate {
    #[serde(rename = "x_star")]
    pub estimate: Vec<f64>,
    /// `‖x*‖₁`
    pub objective: f64,
    /// `max |R x* − y|`
    pub residual: f64,
    pub bound: Option<f64>,
}

impl DelayEstimate {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn l1_error(&self, truth: &[f64]) -> f64 {
        self.estimate
            .iter()
            .zip(truth)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

/// Sign restriction on the recovered delays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignModel {
    /// `x ≥ 0`, so `‖x‖₁ = Σ xᵢ`.
    #[default]
    Nonnegative,
    /// Unrestricted sign; `|xᵢ|` is modelled with auxiliary variables.
    Signed,
}

/// `min ‖x‖₁` subject to `R x = y`, `x ≥ 0`.
pub fn estimate_delays(
    routing: &RoutingMatrix,
    y: &Measurement,
) -> Result<DelayEstimate, TomoError> {
    estimate_delays_with(routing, y.values(), SignModel::Nonnegative)
}

/// Like [`estimate_delays`] with an explicit sign model. `y` may hold
/// negative entries under [`SignModel::Signed`].
pub fn estimate_delays_with(
    routing: &RoutingMatrix,
    y: &[f64],
    sign: SignModel,
) -> Result<DelayEstimate, TomoError> {
    let r = routing.path_count();
    let n = routing.link_count();
    if y.len() != r {
        return Err(TomoError::LengthMismatch {
            expected: r,
            found: y.len(),
        });
    }
    if let Some(index) = y.iter().position(|v| !v.is_finite()) {
        return Err(TomoError::BadEntry {
            index,
            value: y[index],
        });
    }
    let problem = match sign {
        SignModel::Nonnegative => {
            let mut p = LpProblem::new(vec![1.0; n]);
            for (i, &yi) in y.iter().enumerate() {
                let terms: Vec<(usize, f64)> =
                    routing.paths()[i].iter().map(|&l| (l, 1.0)).collect();
                p.add_sparse(&terms, Relation::Eq, yi);
            }
            p
        }
        SignModel::Signed => {
            // variables: x (free) then t with t ≥ |x|
            let mut obj = vec![0.0; n];
            obj.extend(std::iter::repeat_n(1.0, n));
            let mut p = LpProblem::new(obj);
            for j in 0..n {
                p.set_bounds(j, f64::NEG_INFINITY, f64::INFINITY);
                p.add_sparse(&[(n + j, 1.0), (j, -1.0)], Relation::Ge, 0.0);
                p.add_sparse(&[(n + j, 1.0), (j, 1.0)], Relation::Ge, 0.0);
            }
            for (i, &yi) in y.iter().enumerate() {
                let terms: Vec<(usize, f64)> =
                    routing.paths()[i].iter().map(|&l| (l, 1.0)).collect();
                p.add_sparse(&terms, Relation::Eq, yi);
            }
            p
        }
    };
    let sol = solve_lp(&problem)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(TomoError::Inconsistent),
        LpStatus::Unbounded => return Err(TomoError::Solver("unbounded relaxation".into())),
        LpStatus::NumericalFailure => return Err(TomoError::Solver("numerical failure".into())),
    }
    let estimate: Vec<f64> = sol.values[..n].to_vec();
    let fitted = routing.mul_vec(&estimate);
    let residual = fitted
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let objective = estimate.iter().map(|v| v.abs()).sum();
    Ok(DelayEstimate {
        estimate,
        objective,
        residual,
        bound: None,
    })
}

/// Which constant multiplies `‖x_{S^c}‖₁` in the recovery bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundConvention {
    /// `f(ε) = 2(1+2ε)/(1−2ε)`, valid for `0 ≤ ε ≤ 1/4`.
    Formula,
    /// The constant 1.5, stated only for `ε = 1/4`.
    WorkedExample,
}

pub fn f_epsilon(epsilon: Ratio<u64>, convention: BoundConvention) -> Result<f64, TomoError> {
    if epsilon > quarter() {
        return Err(TomoError::EpsilonOutOfRange(epsilon));
    }
    match convention {
        BoundConvention::Formula => {
            let two_eps = epsilon * 2;
            let one = Ratio::from_integer(1u64);
            let value = (one + two_eps) * 2 / (one - two_eps);
            Ok(*value.numer() as f64 / *value.denom() as f64)
        }
        BoundConvention::WorkedExample if epsilon == quarter() => Ok(1.5),
        BoundConvention::WorkedExample => Err(TomoError::ConventionUndefined(epsilon)),
    }
}

/// Index of the largest-magnitude entry, lowest index on ties.
pub fn largest_entry(x: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in x.iter().enumerate() {
        if best.is_none_or(|b| v.abs() > x[b].abs()) {
            best = Some(i);
        }
    }
    best
}

fn tail_l1(x: &[f64]) -> Result<f64, TomoError> {
    let s = largest_entry(x).ok_or(TomoError::Empty)?;
    Ok(SupportMask::singleton(s).split_l1(x).1)
}

/// `f(ε)·‖x_{S^c}‖₁` with `S` the largest entry of `x`.
pub fn error_bound(
    x: &DelayVector,
    epsilon: Ratio<u64>,
    convention: BoundConvention,
) -> Result<f64, TomoError> {
    let tail = tail_l1(x.values())?;
    Ok(f_epsilon(epsilon, convention)? * tail)
}

/// `((3+2ε)/(1−2ε) + n)·‖x_{S^c}‖₁` with `n` the link count. Weaker than
/// [`error_bound`]; it holds for matrices with several degree classes.
pub fn appendix_error_bound(x: &DelayVector, epsilon: Ratio<u64>) -> Result<f64, TomoError> {
    if epsilon > quarter() {
        return Err(TomoError::EpsilonOutOfRange(epsilon));
    }
    let tail = tail_l1(x.values())?;
    let eps = *epsilon.numer() as f64 / *epsilon.denom() as f64;
    let factor = (3.0 + 2.0 * eps) / (1.0 - 2.0 * eps) + x.len() as f64;
    Ok(factor * tail)
}

/// Worst singleton of one null vector: the smallest slack
/// `2ε‖w_{S^c}‖₁ − ‖w_S‖₁` over `S = {i}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingletonCheck {
    pub index: usize,
    pub on_support: f64,
    pub off_support: f64,
    pub slack: f64,
}

pub fn check_null_vector(w: &[f64], epsilon: Ratio<u64>) -> Option<SingletonCheck> {
    let eps2 = 2.0 * (*epsilon.numer() as f64) / (*epsilon.denom() as f64);
    let total: f64 = w.iter().map(|v| v.abs()).sum();
    (0..w.len())
        .map(|i| {
            let on = w[i].abs();
            let off = total - on;
            SingletonCheck {
                index: i,
                on_support: on,
                off_support: off,
                slack: eps2 * off - on,
            }
        })
        .min_by(|a, b| a.slack.total_cmp(&b.slack))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullSpaceReport {
    #[serde(serialize_with = "ratio_str")]
    pub epsilon: Ratio<u64>,
    pub dimension: usize,
    pub trials: usize,
    pub passes: bool,
    /// Smallest `2ε‖w_{S^c}‖₁ − ‖w_S‖₁` over samples and singletons,
    /// for unit-norm samples.
    pub worst_slack: f64,
    /// Largest `‖w_S‖₁ / ‖w_{S^c}‖₁` seen.
    pub worst_ratio: f64,
}

fn ratio_str<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

/// Slack below which a sample counts as violating the inequality.
pub const NULL_SPACE_TOL: f64 = 1e-9;

/// Samples random null vectors (standard normal coefficients over an
/// orthonormal basis) and checks `‖w_S‖₁ ≤ 2ε‖w_{S^c}‖₁` for every singleton.
/// Requires a certified matrix with one degree class.
pub fn check_null_space_property(
    routing: &RoutingMatrix,
    trials: usize,
    seed: u64,
) -> Result<NullSpaceReport, TomoError> {
    let cert = certify_1_identifiable(routing)?;
    if !cert.verdict {
        return Err(TomoError::NotApplicable("matrix is not certified".into()));
    }
    if cert.classes.len() != 1 {
        return Err(TomoError::NotApplicable(format!(
            "{} degree classes, expected one",
            cert.classes.len()
        )));
    }
    let epsilon = cert.classes[0].epsilon;
    let basis = null_space_basis(routing);
    let n = routing.link_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_slack = f64::INFINITY;
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..trials {
        let mut w = vec![0.0; n];
        for b in &basis {
            let c: f64 = StandardNormal.sample(&mut rng);
            w.iter_mut().zip(b).for_each(|(wi, bi)| *wi += c * bi);
        }
        let norm: f64 = w.iter().map(|v| v.abs()).sum();
        if norm == 0.0 {
            continue;
        }
        w.iter_mut().for_each(|v| *v /= norm);
        if let Some(check) = check_null_vector(&w, epsilon) {
            worst_slack = worst_slack.min(check.slack);
        }
        for (i, wi) in w.iter().enumerate() {
            let off = 1.0 - wi.abs();
            if off > 0.0 {
                worst_ratio = worst_ratio.max(w[i].abs() / off);
            }
        }
    }
    if basis.is_empty() || trials == 0 {
        worst_slack = 0.0;
    }
    Ok(NullSpaceReport {
        epsilon,
        dimension: basis.len(),
        trials,
        passes: worst_slack >= -NULL_SPACE_TOL,
        worst_slack,
        worst_ratio,
    })
}
