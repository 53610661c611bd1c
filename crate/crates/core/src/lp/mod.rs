//! Linear and binary integer programming.
//!
//! [`solve_lp`] is a dense two-phase primal simplex (Dantzig pricing that
//! falls back to Bland's rule during degenerate stretches, which rules out
//! cycling). [`solve_binary_ilp`] is a depth-first branch-and-bound on top
//! of it, branching on the most fractional binary variable.

use std::fmt::Write as _;

use thiserror::Error;

mod bnb;
mod simplex;

pub use bnb::{solve_binary_ilp, solve_binary_ilp_with, IlpOptions, IlpSolution, IlpStatus};

/// Relative feasibility tolerance applied to every constraint row.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `minimize objective·x` subject to the constraints and per-variable bounds.
/// Bounds default to `[0, +∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<(f64, f64)>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("constraint {row} has {found} coefficients, expected {expected}")]
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("bounds list has {found} entries, expected {expected}")]
    BoundsLength { expected: usize, found: usize },
    #[error("variable {var} has inconsistent bounds [{lower}, {upper}]")]
    BadBounds { var: usize, lower: f64, upper: f64 },
    #[error("non-finite coefficient in {0}")]
    NonFinite(&'static str),
    #[error("binary variable index {0} out of range")]
    UnknownVariable(usize),
}

impl LpProblem {
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LpProblem {
            objective,
            constraints: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    /// Adds a constraint given as sparse `(var, coeff)` terms.
    pub fn add_sparse(
        &mut self,
        terms: &[(usize, f64)],
        relation: Relation,
        rhs: f64,
    ) -> &mut Self {
        let mut coeffs = vec![0.0; self.num_vars()];
        for &(j, a) in terms {
            coeffs[j] += a;
        }
        self.add_constraint(coeffs, relation, rhs)
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.bounds[var] = (lower, upper);
        self
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(LpError::BoundsLength {
                expected: n,
                found: self.bounds.len(),
            });
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite("objective"));
        }
        for (row, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::RowLength {
                    row,
                    expected: n,
                    found: c.coeffs.len(),
                });
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(LpError::NonFinite("constraint"));
            }
        }
        for (var, &(lower, upper)) in self.bounds.iter().enumerate() {
            if lower.is_nan()
                || upper.is_nan()
                || lower == f64::INFINITY
                || upper == f64::NEG_INFINITY
            {
                return Err(LpError::BadBounds { var, lower, upper });
            }
        }
        Ok(())
    }

    /// Largest scaled violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let mut lhs = 0.0;
            let mut mag: f64 = c.rhs.abs();
            for (a, v) in c.coeffs.iter().zip(x) {
                lhs += a * v;
                mag = mag.max((a * v).abs());
            }
            let diff = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(diff / mag.max(1.0));
        }
        for (&(lo, hi), &v) in self.bounds.iter().zip(x) {
            worst = worst.max((lo - v) / lo.abs().max(1.0));
            worst = worst.max((v - hi) / hi.abs().max(1.0));
        }
        worst
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Plain-text listing for debugging.
    pub fn dump(&self) -> String {
        fn term_list(coeffs: &[f64]) -> String {
            let terms: Vec<String> = coeffs
                .iter()
                .enumerate()
                .filter(|(_, &a)| a != 0.0)
                .map(|(j, a)| format!("{a:+} x{j}"))
                .collect();
            if terms.is_empty() {
                "0".into()
            } else {
                terms.join(" ")
            }
        }
        let mut out = String::new();
        let _ = writeln!(out, "minimize {}", term_list(&self.objective));
        let _ = writeln!(out, "subject to");
        for (i, c) in self.constraints.iter().enumerate() {
            let _ = writeln!(
                out,
                "  c{i}: {} {} {}",
                term_list(&c.coeffs),
                c.relation.symbol(),
                c.rhs
            );
        }
        let _ = writeln!(out, "bounds");
        for (j, (lo, hi)) in self.bounds.iter().enumerate() {
            let _ = writeln!(out, "  {lo} <= x{j} <= {hi}");
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// The solver could not produce a verified answer (iteration limit or
    /// a final point violating the constraints beyond tolerance).
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution, LpError> {
    problem.validate()?;
    Ok(simplex::solve(problem))
}
