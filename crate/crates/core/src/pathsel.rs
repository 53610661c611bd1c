//! Minimum probe-path selection.
//!
//! Three selectors over a set of candidate paths (the rows of a routing
//! matrix): a minimum network cover, a minimum selection that also meets the
//! pairwise identifiability conditions (encoded with big-M alternative
//! constraints), and an LP-rounding heuristic for the latter.
//!
//! Both identifiability solvers generate pair constraints lazily: they start
//! from the covering rows, add the alternative-constraint block of every pair
//! the current solution violates, and re-solve until no pair is violated. The
//! final solution is feasible for the full model and optimal for a
//! relaxation of it, hence optimal for the full model.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expander::{certify_1_identifiable, ExpanderCertificate, ExpanderError};
use crate::lp::{
    solve_binary_ilp_with, solve_lp, IlpOptions, IlpStatus, LpError, LpProblem, LpStatus, Relation,
};
use crate::netgraph::{LinkId, RoutingMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathSelError {
    #[error("links {0:?} are not on any candidate path")]
    UncoveredLinks(Vec<LinkId>),
    #[error("no selection satisfies the constraints")]
    Infeasible,
    #[error("relaxation infeasible in heuristic round {round}")]
    HeuristicFailure { round: usize },
    #[error("heuristic exhausted {rounds} rounds without a feasible selection")]
    HeuristicExhausted { rounds: usize },
    #[error("search stopped at the node limit without a feasible selection")]
    NodeLimit,
    #[error("selection is empty")]
    EmptySelection,
    #[error("selection has {found} indicators, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("solver failed: {0}")]
    Solver(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Expander(#[from] ExpanderError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionMethod {
    CoverIlp,
    IdentIlp,
    Heuristic,
}

impl SelectionMethod {
    pub fn name(self) -> &'static str {
        match self {
            SelectionMethod::CoverIlp => "cover-ilp",
            SelectionMethod::IdentIlp => "ident-ilp",
            SelectionMethod::Heuristic => "heuristic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSelection {
    pub indicators: Vec<bool>,
    pub objective: usize,
    pub method: SelectionMethod,
    /// The selection covers every link (and, for identifiability methods,
    /// meets every pairwise condition).
    pub feasible: bool,
    /// Optimality was proven (always false for the heuristic).
    pub optimal: bool,
}

impl PathSelection {
    pub fn from_indicators(indicators: Vec<bool>, method: SelectionMethod) -> Self {
        let objective = indicators.iter().filter(|&&b| b).count();
        PathSelection {
            indicators,
            objective,
            method,
            feasible: false,
            optimal: false,
        }
    }

    pub fn selected(&self) -> Vec<usize> {
        (0..self.indicators.len())
            .filter(|&i| self.indicators[i])
            .collect()
    }

    /// `{"selected": [...], "objective": .., "method": .., "certificate": ..}`
    pub fn to_json(&self, certificate: Option<&ExpanderCertificate>) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            selected: Vec<usize>,
            objective: usize,
            method: &'static str,
            certificate: Option<&'a ExpanderCertificate>,
        }
        let mut s = serde_json::to_string(&Out {
            selected: self.selected(),
            objective: self.objective,
            method: self.method.name(),
            certificate,
        })
        .expect("serializable");
        s.push('\n');
        s
    }
}

/// Per link pair, the three selector variables of the alternative
/// constraints and the big-M constant `n` (the link count).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternativeConstraintSet {
    pub pairs: Vec<(LinkId, LinkId)>,
    pub big_m: usize,
}

/// Path counts `(g_i, g_j, g_ij)` of one link pair under a selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairLoad {
    pub first: f64,
    pub second: f64,
    pub shared: f64,
}

impl PairLoad {
    /// Left-hand sides minus right-hand sides of the three conditions.
    fn margins(&self) -> [f64; 3] {
        [
            self.first - self.second - 1.0,
            self.second - self.first - 1.0,
            self.first + self.second - 4.0 * self.shared,
        ]
    }
}

impl AlternativeConstraintSet {
    pub fn all_pairs(n: usize) -> Self {
        let pairs = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        AlternativeConstraintSet { pairs, big_m: n }
    }

    pub fn for_pairs(pairs: Vec<(LinkId, LinkId)>, n: usize) -> Self {
        AlternativeConstraintSet { pairs, big_m: n }
    }

    pub fn variable_count(&self) -> usize {
        3 * self.pairs.len()
    }

    /// Appends the selector variables and rows for every pair to `problem`,
    /// whose first `r` variables are the path indicators. Returns the index
    /// of the first selector variable.
    pub fn append_to(&self, problem: &mut LpProblem, routing: &RoutingMatrix) -> usize {
        let first = problem.num_vars();
        let added = self.variable_count();
        problem.objective.extend(std::iter::repeat_n(0.0, added));
        problem
            .bounds
            .extend(std::iter::repeat_n((0.0, 1.0), added));
        for c in &mut problem.constraints {
            c.coeffs.extend(std::iter::repeat_n(0.0, added));
        }
        let n = self.big_m as f64;
        let r = routing.path_count();
        for (q, &(i, j)) in self.pairs.iter().enumerate() {
            let y = first + 3 * q;
            let mut rows = [
                vec![0.0; first + added],
                vec![0.0; first + added],
                vec![0.0; first + added],
            ];
            for k in 0..r {
                let (a, b) = (routing.get(k, i), routing.get(k, j));
                let (a, b) = (f64::from(u8::from(a)), f64::from(u8::from(b)));
                rows[0][k] = a - b;
                rows[1][k] = b - a;
                rows[2][k] = a + b - 4.0 * a * b;
            }
            for (m, mut row) in rows.into_iter().enumerate() {
                // n(1 − y) + e ≥ b  ⇔  e − n·y ≥ b − n
                row[y + m] = -n;
                let rhs = if m == 2 { -n } else { 1.0 - n };
                problem.add_constraint(row, Relation::Ge, rhs);
            }
            problem.add_sparse(&[(y, 1.0), (y + 1, 1.0), (y + 2, 1.0)], Relation::Eq, 1.0);
        }
        first
    }

    /// A condition index that can take `y = 1` with the other two at 0,
    /// for integral indicators.
    pub fn integral_choice(&self, load: &PairLoad) -> Option<usize> {
        let n = self.big_m as f64;
        let m = load.margins();
        (0..3).find(|&k| m[k] >= 0.0 && (0..3).all(|o| o == k || n + m[o] >= 0.0))
    }

    /// Whether some `y ∈ [0,1]³` with `Σy = 1` satisfies the relaxed rows.
    pub fn relaxed_feasible(&self, load: &PairLoad) -> bool {
        const TOL: f64 = 1e-9;
        let n = self.big_m as f64;
        let caps = load.margins().map(|m| 1.0 + m / n);
        caps.iter().all(|&c| c >= -TOL)
            && caps.iter().map(|&c| c.min(1.0)).sum::<f64>() >= 1.0 - TOL
    }
}

/// `(g_i, g_j, g_ij)` for every link pair under indicator values `ind`.
fn pair_load(routing: &RoutingMatrix, ind: &[f64], i: LinkId, j: LinkId) -> PairLoad {
    let mut load = PairLoad {
        first: 0.0,
        second: 0.0,
        shared: 0.0,
    };
    for (k, &v) in ind.iter().enumerate() {
        let (a, b) = (routing.get(k, i), routing.get(k, j));
        if a {
            load.first += v;
        }
        if b {
            load.second += v;
        }
        if a && b {
            load.shared += v;
        }
    }
    load
}

fn check_covered(routing: &RoutingMatrix) -> Result<(), PathSelError> {
    let uncovered = routing.uncovered_links();
    if uncovered.is_empty() {
        Ok(())
    } else {
        Err(PathSelError::UncoveredLinks(uncovered))
    }
}

/// `min ΣI` subject to `Rᵗ I ≥ 1` over the path indicators.
fn covering_problem(routing: &RoutingMatrix) -> LpProblem {
    let r = routing.path_count();
    let mut p = LpProblem::new(vec![1.0; r]);
    for l in 0..routing.link_count() {
        let terms: Vec<(usize, f64)> = (0..r)
            .filter(|&k| routing.get(k, l))
            .map(|k| (k, 1.0))
            .collect();
        p.add_sparse(&terms, Relation::Ge, 1.0);
    }
    for k in 0..r {
        p.set_bounds(k, 0.0, 1.0);
    }
    p
}

fn indicators_from(values: &[f64], r: usize) -> Vec<bool> {
    values[..r].iter().map(|&v| v > 0.5).collect()
}

pub fn cover_ilp(routing: &RoutingMatrix) -> Result<PathSelection, PathSelError> {
    cover_ilp_with(routing, &IlpOptions::default())
}

pub fn cover_ilp_with(
    routing: &RoutingMatrix,
    options: &IlpOptions,
) -> Result<PathSelection, PathSelError> {
    check_covered(routing)?;
    let r = routing.path_count();
    let problem = covering_problem(routing);
    let sol = solve_binary_ilp_with(&problem, &(0..r).collect::<Vec<_>>(), options)?;
    let optimal = match sol.status {
        IlpStatus::Optimal => true,
        IlpStatus::Infeasible => return Err(PathSelError::Infeasible),
        IlpStatus::Unknown if sol.values.is_empty() => return Err(PathSelError::NodeLimit),
        IlpStatus::Unknown => false,
    };
    let mut sel =
        PathSelection::from_indicators(indicators_from(&sol.values, r), SelectionMethod::CoverIlp);
    sel.feasible = true;
    sel.optimal = optimal;
    Ok(sel)
}

/// Pairs whose alternative constraints fail under `ind`.
fn violated_pairs(routing: &RoutingMatrix, ind: &[f64], integral: bool) -> Vec<(LinkId, LinkId)> {
    let n = routing.link_count();
    let set = AlternativeConstraintSet::all_pairs(n);
    set.pairs
        .iter()
        .copied()
        .filter(|&(i, j)| {
            let load = pair_load(routing, ind, i, j);
            if integral {
                set.integral_choice(&load).is_none()
            } else {
                !set.relaxed_feasible(&load)
            }
        })
        .collect()
}

/// Whether the integral selection covers every link and meets every
/// pairwise alternative constraint.
pub fn satisfies_constraints(routing: &RoutingMatrix, indicators: &[bool]) -> bool {
    let ind: Vec<f64> = indicators.iter().map(|&b| f64::from(u8::from(b))).collect();
    let covered = (0..routing.link_count())
        .all(|l| (0..routing.path_count()).any(|k| indicators[k] && routing.get(k, l)));
    covered && violated_pairs(routing, &ind, true).is_empty()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentOptions {
    pub node_limit: usize,
    /// Generate pair constraints lazily instead of building all of them.
    pub lazy: bool,
}

impl Default for IdentOptions {
    fn default() -> Self {
        IdentOptions {
            node_limit: IlpOptions::default().node_limit,
            lazy: true,
        }
    }
}

pub fn identifiability_ilp(routing: &RoutingMatrix) -> Result<PathSelection, PathSelError> {
    identifiability_ilp_with(routing, &IdentOptions::default())
}

pub fn identifiability_ilp_with(
    routing: &RoutingMatrix,
    options: &IdentOptions,
) -> Result<PathSelection, PathSelError> {
    check_covered(routing)?;
    let r = routing.path_count();
    let n = routing.link_count();
    let ilp_options = IlpOptions {
        node_limit: options.node_limit,
    };
    let mut active: Vec<(LinkId, LinkId)> = if options.lazy {
        Vec::new()
    } else {
        AlternativeConstraintSet::all_pairs(n).pairs
    };
    loop {
        let mut problem = covering_problem(routing);
        let set = AlternativeConstraintSet::for_pairs(active.clone(), n);
        set.append_to(&mut problem, routing);
        let binary: Vec<usize> = (0..problem.num_vars()).collect();
        let sol = solve_binary_ilp_with(&problem, &binary, &ilp_options)?;
        let optimal = match sol.status {
            IlpStatus::Optimal => true,
            IlpStatus::Infeasible => return Err(PathSelError::Infeasible),
            IlpStatus::Unknown if sol.values.is_empty() => return Err(PathSelError::NodeLimit),
            IlpStatus::Unknown => false,
        };
        let indicators = indicators_from(&sol.values, r);
        let ind: Vec<f64> = indicators.iter().map(|&b| f64::from(u8::from(b))).collect();
        let missing = violated_pairs(routing, &ind, true);
        if missing.is_empty() {
            let mut sel = PathSelection::from_indicators(indicators, SelectionMethod::IdentIlp);
            sel.feasible = true;
            sel.optimal = optimal;
            return Ok(sel);
        }
        if !optimal {
            // an unproven incumbent cannot drive constraint generation
            return Err(PathSelError::NodeLimit);
        }
        active.extend(missing);
        active.sort_unstable();
        active.dedup();
    }
}

/// Relaxation of the identifiability model with the given indicators fixed
/// to 1; pair constraints are generated until the relaxed solution meets
/// all of them. `active` carries generated pairs between calls.
fn solve_relaxation(
    routing: &RoutingMatrix,
    fixed: &[bool],
    active: &mut Vec<(LinkId, LinkId)>,
) -> Result<Option<Vec<f64>>, PathSelError> {
    let r = routing.path_count();
    let n = routing.link_count();
    loop {
        let mut problem = covering_problem(routing);
        for (k, &f) in fixed.iter().enumerate() {
            if f {
                problem.set_bounds(k, 1.0, 1.0);
            }
        }
        AlternativeConstraintSet::for_pairs(active.clone(), n).append_to(&mut problem, routing);
        let sol = solve_lp(&problem)?;
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return Ok(None),
            LpStatus::Unbounded | LpStatus::NumericalFailure => {
                return Err(PathSelError::Solver(format!("{:?} relaxation", sol.status)))
            }
        }
        let ind = sol.values[..r].to_vec();
        let missing = violated_pairs(routing, &ind, false);
        if missing.is_empty() {
            return Ok(Some(ind));
        }
        active.extend(missing);
        active.sort_unstable();
        active.dedup();
    }
}

/// Relax-and-fix: solve the relaxation, fix the largest unfixed indicator
/// to 1 (lowest index on ties), repeat. Stops as soon as the fixed paths
/// alone meet every constraint, or after `max_rounds` rounds.
pub fn identifiability_heuristic(
    routing: &RoutingMatrix,
    max_rounds: usize,
) -> Result<PathSelection, PathSelError> {
    check_covered(routing)?;
    let r = routing.path_count();
    let mut fixed = vec![false; r];
    let mut active = Vec::new();
    for round in 0..max_rounds {
        if satisfies_constraints(routing, &fixed) {
            break;
        }
        let Some(ind) = solve_relaxation(routing, &fixed, &mut active)? else {
            return Err(PathSelError::HeuristicFailure { round });
        };
        let pick = (0..r)
            .filter(|&k| !fixed[k])
            .fold(None::<usize>, |best, k| match best {
                Some(b) if ind[b] >= ind[k] - 1e-9 => Some(b),
                _ => Some(k),
            });
        match pick {
            Some(k) => fixed[k] = true,
            None => break,
        }
    }
    if !satisfies_constraints(routing, &fixed) {
        return Err(PathSelError::HeuristicExhausted { rounds: max_rounds });
    }
    let mut sel = PathSelection::from_indicators(fixed, SelectionMethod::Heuristic);
    sel.feasible = verify_selection(routing, &sel)?.verdict;
    Ok(sel)
}

/// Result of re-checking a selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionCheck {
    pub verdict: bool,
    /// Certificate of the selected rows; absent when some link is uncovered.
    pub certificate: Option<ExpanderCertificate>,
    pub uncovered_links: Vec<LinkId>,
    /// Pairs with no satisfiable alternative constraint.
    pub pair_violations: Vec<(LinkId, LinkId)>,
}

/// Certifies the row-submatrix of the selected paths and re-checks the
/// pairwise alternative constraints with integral indicators.
pub fn verify_selection(
    routing: &RoutingMatrix,
    selection: &PathSelection,
) -> Result<SelectionCheck, PathSelError> {
    let r = routing.path_count();
    if selection.indicators.len() != r {
        return Err(PathSelError::LengthMismatch {
            expected: r,
            found: selection.indicators.len(),
        });
    }
    let rows = selection.selected();
    if rows.is_empty() {
        return Err(PathSelError::EmptySelection);
    }
    let sub = routing
        .select_rows(&rows)
        .map_err(|e| PathSelError::Solver(e.to_string()))?;
    let ind: Vec<f64> = selection
        .indicators
        .iter()
        .map(|&b| f64::from(u8::from(b)))
        .collect();
    let pair_violations = violated_pairs(routing, &ind, true);
    let uncovered_links = sub.uncovered_links();
    let certificate = if uncovered_links.is_empty() {
        Some(certify_1_identifiable(&sub)?)
    } else {
        None
    };
    let verdict = certificate.as_ref().is_some_and(|c| c.verdict) && pair_violations.is_empty();
    Ok(SelectionCheck {
        verdict,
        certificate,
        uncovered_links,
        pair_violations,
    })
}
