//! Dense two-phase tableau simplex.

use super::{LpProblem, LpSolution, LpStatus, Relation, FEASIBILITY_TOL};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_SWITCH: usize = 25;

/// How an original variable is expressed in nonnegative standard-form columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    Fixed(f64),
    /// `x = lo + t`
    Shift {
        col: usize,
        lo: f64,
    },
    /// `x = hi - t`
    Reflect {
        col: usize,
        hi: f64,
    },
    /// `x = t⁺ - t⁻`
    Split {
        pos: usize,
        neg: usize,
    },
}

/// `min c·t` subject to `A t = b`, `t ≥ 0`, `b ≥ 0`.
struct Standard {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    /// Per row, a column with a `+1` here and zeros elsewhere, if any.
    unit_col: Vec<Option<usize>>,
    maps: Vec<VarMap>,
}

enum Prepared {
    Ready(Standard),
    Infeasible,
}

fn prepare(p: &LpProblem) -> Prepared {
    let n = p.num_vars();
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0;
    let mut upper_rows: Vec<(usize, f64)> = Vec::new();
    for &(lo, hi) in &p.bounds {
        if lo > hi {
            return Prepared::Infeasible;
        }
        let m = if lo == hi {
            VarMap::Fixed(lo)
        } else if lo.is_finite() {
            if hi.is_finite() {
                upper_rows.push((ncols, hi - lo));
            }
            VarMap::Shift { col: ncols, lo }
        } else if hi.is_finite() {
            VarMap::Reflect { col: ncols, hi }
        } else {
            ncols += 1;
            VarMap::Split {
                pos: ncols - 1,
                neg: ncols,
            }
        };
        if !matches!(m, VarMap::Fixed(_)) {
            ncols += 1;
        }
        maps.push(m);
    }
    let n_struct = ncols;

    // Constant offsets are dropped; the objective is re-evaluated on the
    // original variables at the end.
    let mut c = vec![0.0; n_struct];
    for (j, m) in maps.iter().enumerate() {
        let cj = p.objective[j];
        match *m {
            VarMap::Fixed(_) => {}
            VarMap::Shift { col, .. } => c[col] += cj,
            VarMap::Reflect { col, .. } => c[col] -= cj,
            VarMap::Split { pos, neg } => {
                c[pos] += cj;
                c[neg] -= cj;
            }
        }
    }

    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    for con in &p.constraints {
        let mut row = vec![0.0; n_struct];
        let mut rhs = con.rhs;
        for (j, &a) in con.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Fixed(v) => rhs -= a * v,
                VarMap::Shift { col, lo } => {
                    row[col] += a;
                    rhs -= a * lo;
                }
                VarMap::Reflect { col, hi } => {
                    row[col] -= a;
                    rhs -= a * hi;
                }
                VarMap::Split { pos, neg } => {
                    row[pos] += a;
                    row[neg] -= a;
                }
            }
        }
        if row.iter().all(|&v| v == 0.0) {
            let tol = FEASIBILITY_TOL * con.rhs.abs().max(1.0);
            let ok = match con.relation {
                Relation::Le => rhs >= -tol,
                Relation::Ge => rhs <= tol,
                Relation::Eq => rhs.abs() <= tol,
            };
            if !ok {
                return Prepared::Infeasible;
            }
            continue;
        }
        rows.push((row, con.relation, rhs));
    }
    for (col, width) in upper_rows {
        let mut row = vec![0.0; n_struct];
        row[col] = 1.0;
        rows.push((row, Relation::Le, width));
    }

    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let total = n_struct + n_slack;
    let mut a = Vec::with_capacity(rows.len());
    let mut b = Vec::with_capacity(rows.len());
    let mut unit_col = Vec::with_capacity(rows.len());
    let mut next_slack = n_struct;
    for (mut row, rel, mut rhs) in rows {
        row.resize(total, 0.0);
        let mut slack = None;
        match rel {
            Relation::Le => {
                row[next_slack] = 1.0;
                slack = Some(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -1.0;
                slack = Some(next_slack);
                next_slack += 1;
            }
            Relation::Eq => {}
        }
        if rhs < 0.0 {
            row.iter_mut().for_each(|v| *v = -*v);
            rhs = -rhs;
        }
        unit_col.push(slack.filter(|&s| row[s] == 1.0));
        a.push(row);
        b.push(rhs);
    }
    c.resize(total, 0.0);
    Prepared::Ready(Standard {
        a,
        b,
        c,
        unit_col,
        maps,
    })
}

struct Tableau {
    m: usize,
    /// Number of columns excluding the right-hand side.
    cols: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    /// Standard-form row each tableau row came from.
    origin: Vec<usize>,
}

enum RunOutcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width() + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    fn pivot(&mut self, p: usize, q: usize, reduced: &mut [f64]) {
        let w = self.width();
        let piv = self.data[p * w + q];
        let (before, rest) = self.data.split_at_mut(p * w);
        let (prow, after) = rest.split_at_mut(w);
        prow.iter_mut().for_each(|v| *v /= piv);
        prow[q] = 1.0;
        let eliminate = |row: &mut [f64]| {
            let f = row[q];
            if f != 0.0 {
                for (r, &pv) in row.iter_mut().zip(prow.iter()) {
                    *r -= f * pv;
                }
                row[q] = 0.0;
            }
        };
        before.chunks_mut(w).for_each(eliminate);
        after.chunks_mut(w).for_each(eliminate);
        let f = reduced[q];
        if f != 0.0 {
            for (r, &pv) in reduced.iter_mut().zip(prow.iter()) {
                *r -= f * pv;
            }
            reduced[q] = 0.0;
        }
        self.basis[p] = q;
    }

    /// Reduced costs (plus negated objective in the last slot) for `cost`.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d: Vec<f64> = cost.to_vec();
        d.push(0.0);
        let w = self.width();
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for (dj, &t) in d.iter_mut().zip(&self.data[i * w..(i + 1) * w]) {
                    *dj -= cb * t;
                }
            }
        }
        d
    }

    /// Primal simplex minimizing `cost`; only columns `< enter_limit` may enter.
    fn run(&mut self, cost: &[f64], enter_limit: usize, max_iter: usize) -> RunOutcome {
        let mut d = self.reduced_costs(cost);
        let mut degenerate = 0usize;
        let cost_scale = cost.iter().fold(1.0f64, |m, c| m.max(c.abs()));
        for _ in 0..max_iter {
            let bland = degenerate >= DEGENERATE_SWITCH;
            let mut enter = None;
            let mut best = -COST_TOL * cost_scale;
            for (j, &dj) in d.iter().enumerate().take(enter_limit) {
                if dj < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = dj;
                }
            }
            let Some(q) = enter else {
                return RunOutcome::Optimal;
            };
            let mut leave: Option<(usize, f64, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, q);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio, a)),
                    Some((li, lr, la)) => {
                        let tie = (ratio - lr).abs() <= 1e-12 * (1.0 + lr);
                        let better = if tie {
                            if bland {
                                self.basis[i] < self.basis[li]
                            } else {
                                a > la
                            }
                        } else {
                            ratio < lr
                        };
                        if better {
                            Some((i, ratio, a))
                        } else {
                            Some((li, lr, la))
                        }
                    }
                };
            }
            let Some((p, ratio, _)) = leave else {
                return RunOutcome::Unbounded;
            };
            if ratio <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(p, q, &mut d);
        }
        RunOutcome::IterationLimit
    }

    /// Keeps only the listed rows and the first `cols` columns.
    fn restrict(&mut self, keep_rows: &[usize], cols: usize) {
        let w = self.width();
        let mut data = Vec::with_capacity(keep_rows.len() * (cols + 1));
        for &i in keep_rows {
            data.extend_from_slice(&self.data[i * w..i * w + cols]);
            data.push(self.data[i * w + self.cols]);
        }
        self.basis = keep_rows.iter().map(|&i| self.basis[i]).collect();
        self.origin = keep_rows.iter().map(|&i| self.origin[i]).collect();
        self.m = keep_rows.len();
        self.cols = cols;
        self.data = data;
    }
}

fn failure(n: usize, status: LpStatus) -> LpSolution {
    LpSolution {
        status,
        values: vec![0.0; n],
        objective: f64::NAN,
    }
}

pub(super) fn solve(problem: &LpProblem) -> LpSolution {
    let n = problem.num_vars();
    let std = match prepare(problem) {
        Prepared::Infeasible => return failure(n, LpStatus::Infeasible),
        Prepared::Ready(s) => s,
    };
    let m = std.a.len();
    let ncols = std.c.len();
    let art_rows: Vec<usize> = (0..m).filter(|&i| std.unit_col[i].is_none()).collect();
    let nart = art_rows.len();
    let cols = ncols + nart;
    let w = cols + 1;
    let mut data = vec![0.0; m * w];
    let mut basis = vec![0; m];
    for i in 0..m {
        data[i * w..i * w + ncols].copy_from_slice(&std.a[i]);
        data[i * w + cols] = std.b[i];
        if let Some(s) = std.unit_col[i] {
            basis[i] = s;
        }
    }
    for (k, &i) in art_rows.iter().enumerate() {
        data[i * w + ncols + k] = 1.0;
        basis[i] = ncols + k;
    }
    let mut tab = Tableau {
        m,
        cols,
        data,
        basis,
        origin: (0..m).collect(),
    };
    let max_iter = 50_000usize.max(50 * (m + cols));
    let b_scale = std.b.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));

    if nart > 0 {
        let mut cost1 = vec![0.0; cols];
        cost1[ncols..].iter_mut().for_each(|v| *v = 1.0);
        match tab.run(&cost1, cols, max_iter) {
            RunOutcome::Optimal => {}
            RunOutcome::Unbounded | RunOutcome::IterationLimit => {
                return failure(n, LpStatus::NumericalFailure)
            }
        }
        let infeas: f64 = (0..m)
            .filter(|&i| tab.basis[i] >= ncols)
            .map(|i| tab.rhs(i).max(0.0))
            .sum();
        if infeas > 1e-8 * b_scale {
            return failure(n, LpStatus::Infeasible);
        }
        // Drive zero-valued artificials out of the basis; rows where that is
        // impossible are linear combinations of the others.
        let mut keep = Vec::with_capacity(m);
        let mut scratch = vec![0.0; cols + 1];
        for i in 0..m {
            if tab.basis[i] < ncols {
                keep.push(i);
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..ncols {
                let v = tab.at(i, j).abs();
                if v > 1e-7 && best.is_none_or(|(_, bv)| v > bv) {
                    best = Some((j, v));
                }
            }
            if let Some((j, _)) = best {
                tab.pivot(i, j, &mut scratch);
                keep.push(i);
            }
        }
        tab.restrict(&keep, ncols);
    }

    match tab.run(&std.c, ncols, max_iter) {
        RunOutcome::Optimal => {}
        RunOutcome::Unbounded => return failure(n, LpStatus::Unbounded),
        RunOutcome::IterationLimit => return failure(n, LpStatus::NumericalFailure),
    }

    let mut t = vec![0.0; ncols];
    let refined = refine_basic_values(&std, &tab.origin, &tab.basis);
    for (i, &bcol) in tab.basis.iter().enumerate() {
        let v = refined.as_ref().map_or(tab.rhs(i), |r| r[i]);
        t[bcol] = v.max(0.0);
    }
    let values: Vec<f64> = std
        .maps
        .iter()
        .map(|m| match *m {
            VarMap::Fixed(v) => v,
            VarMap::Shift { col, lo } => lo + t[col],
            VarMap::Reflect { col, hi } => hi - t[col],
            VarMap::Split { pos, neg } => t[pos] - t[neg],
        })
        .collect();
    if problem.max_violation(&values) > FEASIBILITY_TOL {
        return LpSolution {
            status: LpStatus::NumericalFailure,
            objective: problem.objective_value(&values),
            values,
        };
    }
    LpSolution {
        status: LpStatus::Optimal,
        objective: problem.objective_value(&values),
        values,
    }
}

/// Solves `A_B x_B = b` on the original data with partial pivoting.
fn refine_basic_values(std: &Standard, rows: &[usize], basis: &[usize]) -> Option<Vec<f64>> {
    let k = basis.len();
    if rows.len() != k {
        return None;
    }
    let mut mat: Vec<Vec<f64>> = rows
        .iter()
        .map(|&i| {
            let mut r: Vec<f64> = basis.iter().map(|&j| std.a[i][j]).collect();
            r.push(std.b[i]);
            r
        })
        .collect();
    for col in 0..k {
        let piv = (col..k).max_by(|&x, &y| mat[x][col].abs().total_cmp(&mat[y][col].abs()))?;
        if mat[piv][col].abs() < 1e-12 {
            return None;
        }
        mat.swap(col, piv);
        let pivot_row = mat[col].clone();
        for (r, row) in mat.iter_mut().enumerate() {
            if r != col {
                let f = row[col] / pivot_row[col];
                if f != 0.0 {
                    row.iter_mut()
                        .zip(&pivot_row)
                        .for_each(|(x, &y)| *x -= f * y);
                }
            }
        }
    }
    let x: Vec<f64> = (0..k).map(|i| mat[i][k] / mat[i][i]).collect();
    x.iter().all(|v| v.is_finite()).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refinement_solves_permuted_basis() {
        let std = Standard {
            a: vec![vec![2.0, 0.0], vec![0.0, 4.0]],
            b: vec![1.0, 4.0],
            c: vec![0.0, 0.0],
            unit_col: vec![None, None],
            maps: vec![],
        };
        // basis column order is (1, 0)
        assert_eq!(
            refine_basic_values(&std, &[0, 1], &[1, 0]).unwrap(),
            vec![1.0, 0.5]
        );
        assert!(refine_basic_values(&std, &[0], &[1, 0]).is_none());
    }

    #[test]
    fn bounds_become_rows() {
        let mut p = LpProblem::new(vec![1.0, 1.0, 1.0]);
        p.set_bounds(0, 1.0, 3.0)
            .set_bounds(1, f64::NEG_INFINITY, 2.0)
            .set_bounds(2, f64::NEG_INFINITY, f64::INFINITY);
        let Prepared::Ready(s) = prepare(&p) else {
            panic!("feasible bounds")
        };
        // shift, reflect, split (two columns) plus one slack for x0 <= 3
        assert_eq!(s.c.len(), 5);
        assert_eq!(s.a.len(), 1);
        assert_eq!(s.b, vec![2.0]);
    }
}
