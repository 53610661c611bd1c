//! Depth-first branch-and-bound for problems with binary variables.

use super::{solve_lp, LpError, LpProblem, LpStatus};

/// Distance from an integer below which a value counts as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;
/// Nodes whose relaxation is within this of the incumbent are pruned.
pub const PRUNE_GAP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IlpOptions {
    pub node_limit: usize,
}

impl Default for IlpOptions {
    fn default() -> Self {
        IlpOptions {
            node_limit: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IlpStatus {
    Optimal,
    Infeasible,
    /// Search stopped early (node limit or an unresolved relaxation);
    /// `values` holds the best integral point found, if any.
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IlpSolution {
    pub status: IlpStatus,
    /// Empty when no integral point was found.
    pub values: Vec<f64>,
    /// `+∞` when no integral point was found.
    pub objective: f64,
    pub nodes_explored: usize,
}

pub fn solve_binary_ilp(problem: &LpProblem, binary: &[usize]) -> Result<IlpSolution, LpError> {
    solve_binary_ilp_with(problem, binary, &IlpOptions::default())
}

pub fn solve_binary_ilp_with(
    problem: &LpProblem,
    binary: &[usize],
    options: &IlpOptions,
) -> Result<IlpSolution, LpError> {
    problem.validate()?;
    let n = problem.num_vars();
    let mut binary: Vec<usize> = binary.to_vec();
    binary.sort_unstable();
    binary.dedup();
    if let Some(&bad) = binary.iter().find(|&&j| j >= n) {
        return Err(LpError::UnknownVariable(bad));
    }

    let mut base = problem.clone();
    for &j in &binary {
        let (lo, hi) = base.bounds[j];
        let lo = (lo.max(0.0) - INTEGRALITY_TOL).ceil();
        let hi = (hi.min(1.0) + INTEGRALITY_TOL).floor();
        base.bounds[j] = (lo, hi);
    }
    let is_binary = {
        let mut flags = vec![false; n];
        binary.iter().for_each(|&j| flags[j] = true);
        flags
    };
    let integral_objective = problem.objective.iter().enumerate().all(|(j, &c)| {
        if is_binary[j] {
            c.fract() == 0.0
        } else {
            c == 0.0
        }
    });
    let can_prune = |bound: f64, incumbent: f64| {
        if integral_objective {
            (bound - PRUNE_GAP).ceil() >= incumbent
        } else {
            bound >= incumbent - PRUNE_GAP
        }
    };

    let mut incumbent: Option<(Vec<f64>, f64)> = None;
    let mut nodes = 0usize;
    let mut incomplete = false;
    let mut stack: Vec<Vec<(usize, f64)>> = vec![Vec::new()];
    let mut node_problem = base.clone();

    while let Some(fixings) = stack.pop() {
        if nodes >= options.node_limit {
            incomplete = true;
            break;
        }
        nodes += 1;
        node_problem.bounds.clone_from(&base.bounds);
        for &(j, v) in &fixings {
            node_problem.bounds[j] = (v, v);
        }
        let relax = solve_lp(&node_problem)?;
        match relax.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded | LpStatus::NumericalFailure => {
                incomplete = true;
                continue;
            }
        }
        if let Some((_, best)) = &incumbent {
            if can_prune(relax.objective, *best) {
                continue;
            }
        }

        let mut branch: Option<(usize, f64)> = None;
        for &j in &binary {
            let v = relax.values[j];
            let frac = (v - v.round()).abs();
            if frac > INTEGRALITY_TOL && branch.is_none_or(|(_, f)| frac > f + 1e-12) {
                branch = Some((j, frac));
            }
        }

        match branch {
            None => {
                // Snap binaries and re-solve so the continuous part is
                // consistent with the exact 0/1 values.
                let mut fixed = node_problem.clone();
                for &j in &binary {
                    let v = relax.values[j].round();
                    fixed.bounds[j] = (v, v);
                }
                let exact = solve_lp(&fixed)?;
                if exact.status != LpStatus::Optimal {
                    incomplete = true;
                    continue;
                }
                let improves = incumbent
                    .as_ref()
                    .is_none_or(|(_, best)| exact.objective < best - 1e-9);
                if improves {
                    incumbent = Some((exact.values, exact.objective));
                }
            }
            Some((j, _)) => {
                let v = relax.values[j];
                let (first, second) = if v >= 0.5 { (1.0, 0.0) } else { (0.0, 1.0) };
                let mut later = fixings.clone();
                later.push((j, second));
                let mut sooner = fixings;
                sooner.push((j, first));
                stack.push(later);
                stack.push(sooner);
            }
        }
    }

    let status = match (&incumbent, incomplete) {
        (_, true) => IlpStatus::Unknown,
        (Some(_), false) => IlpStatus::Optimal,
        (None, false) => IlpStatus::Infeasible,
    };
    let (values, objective) = incumbent.unwrap_or((Vec::new(), f64::INFINITY));
    Ok(IlpSolution {
        status,
        values,
        objective,
        nodes_explored: nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::Relation;

    /// Minimum set cover of {0..4} by sets {0,1}, {1,2}, {2,3}, {3,4}, {0,4}, {0,2,4}.
    fn cover_problem() -> LpProblem {
        let sets: [&[usize]; 6] = [&[0, 1], &[1, 2], &[2, 3], &[3, 4], &[0, 4], &[0, 2, 4]];
        let mut p = LpProblem::new(vec![1.0; sets.len()]);
        for e in 0..5 {
            let row: Vec<f64> = sets
                .iter()
                .map(|s| f64::from(u8::from(s.contains(&e))))
                .collect();
            p.add_constraint(row, Relation::Ge, 1.0);
        }
        p
    }

    #[test]
    fn set_cover_optimum() {
        let p = cover_problem();
        let s = solve_binary_ilp(&p, &(0..6).collect::<Vec<_>>()).unwrap();
        assert_eq!(s.status, IlpStatus::Optimal);
        assert_eq!(s.objective, 3.0);
        assert!(s.values.iter().all(|&v| v == 0.0 || v == 1.0));
        assert!(p.max_violation(&s.values) <= 0.0);
    }

    #[test]
    fn lp_relaxation_is_weaker() {
        let p = cover_problem();
        let relax = solve_lp(&p).unwrap();
        assert!(relax.objective < 3.0 - 1e-6);
    }

    #[test]
    fn infeasible_binary_problem() {
        let mut p = LpProblem::new(vec![1.0, 1.0]);
        p.add_constraint(vec![1.0, 1.0], Relation::Eq, 1.5);
        let s = solve_binary_ilp(&p, &[0, 1]).unwrap();
        assert_eq!(s.status, IlpStatus::Infeasible);
        assert!(s.values.is_empty());
    }

    #[test]
    fn node_limit_reports_unknown() {
        let p = cover_problem();
        let s = solve_binary_ilp_with(
            &p,
            &(0..6).collect::<Vec<_>>(),
            &IlpOptions { node_limit: 1 },
        )
        .unwrap();
        assert_eq!(s.status, IlpStatus::Unknown);
        assert_eq!(s.nodes_explored, 1);
    }

    #[test]
    fn mixed_continuous_part() {
        // min y - x0 with y >= 0.3 + 0.5 x0, x0 binary
        let mut p = LpProblem::new(vec![-1.0, 1.0]);
        p.add_constraint(vec![-0.5, 1.0], Relation::Ge, 0.3);
        let s = solve_binary_ilp(&p, &[0]).unwrap();
        assert_eq!(s.status, IlpStatus::Optimal);
        assert_eq!(s.values[0], 1.0);
        assert!((s.objective + 0.2).abs() < 1e-12);
    }

    #[test]
    fn unknown_binary_index() {
        let p = LpProblem::new(vec![1.0]);
        assert_eq!(solve_binary_ilp(&p, &[3]), Err(LpError::UnknownVariable(3)));
    }
}
