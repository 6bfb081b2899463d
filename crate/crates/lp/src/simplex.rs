//! Dense two-phase tableau simplex.
//!
//! Every constraint is first rewritten in `<=` form (equalities become a
//! `<=`/`>=` pair). Rows with a negative right-hand side are negated and
//! receive an artificial variable, which phase one drives to zero. Pricing is
//! Dantzig's largest-coefficient rule; after a run of degenerate pivots the
//! solver falls back to Bland's smallest-index rule until the objective moves
//! again, which rules out cycling.

use crate::{LinearProgram, LpError, Relation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point. For `Optimal` this is the optimum; otherwise it is the
    /// last basic solution visited.
    pub values: Vec<f64>,
    /// `+inf` when unbounded, `NaN` when infeasible.
    pub objective_value: f64,
    pub iterations: usize,
    /// One multiplier per original constraint, in the sign convention of the
    /// dual of a maximization problem: `>= 0` for `<=` rows, `<= 0` for `>=`
    /// rows, free for equalities. Empty unless `status == Optimal`.
    pub duals: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Pivot cap across both phases; `None` means `50 * (vars + constraints)`.
    pub max_iterations: Option<usize>,
    pub pivot_tolerance: f64,
    pub cost_tolerance: f64,
    pub feasibility_tolerance: f64,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub degenerate_streak: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: None,
            pivot_tolerance: 1e-9,
            cost_tolerance: 1e-9,
            feasibility_tolerance: 1e-9,
            degenerate_streak: 16,
        }
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    solve_with(lp, &SolverOptions::default())
}

pub fn solve_with(lp: &LinearProgram, opts: &SolverOptions) -> Result<LpSolution, LpError> {
    let cap = opts
        .max_iterations
        .unwrap_or(50 * (lp.num_vars() + lp.constraints().len()).max(1));
    let mut t = Tableau::build(lp);
    let mut iterations = 0;

    if t.n_art > 0 {
        t.load_phase_one_objective();
        match t.run(false, opts, cap, &mut iterations)? {
            Step::Optimal => {}
            // Phase one is bounded above by zero.
            Step::Unbounded => unreachable!("phase one objective is bounded"),
        }
        let scale = 1.0 + t.rhs_scale;
        if t.obj[t.rhs_col()] < -opts.feasibility_tolerance * scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                values: t.primal(),
                objective_value: f64::NAN,
                iterations,
                duals: Vec::new(),
            });
        }
        t.expel_artificials(opts);
    }

    t.load_phase_two_objective(lp.objective());
    let status = match t.run(true, opts, cap, &mut iterations)? {
        Step::Optimal => LpStatus::Optimal,
        Step::Unbounded => LpStatus::Unbounded,
    };
    let values = t.primal();
    let (objective_value, duals) = match status {
        LpStatus::Optimal => (lp.objective_value(&values), t.duals(lp.constraints().len())),
        _ => (f64::INFINITY, Vec::new()),
    };
    Ok(LpSolution {
        status,
        values,
        objective_value,
        iterations,
        duals,
    })
}

enum Step {
    Optimal,
    Unbounded,
}

/// Origin of a `<=` row: index of the source constraint and the sign applied
/// to it (`-1` when a `>=` row or the second half of an equality was negated).
#[derive(Clone, Copy)]
struct RowOrigin {
    constraint: usize,
    sign: f64,
}

struct Tableau {
    rows: usize,
    width: usize,
    n_struct: usize,
    n_art: usize,
    a: Vec<f64>,
    /// Reduced costs `z_j - c_j`; the last entry is the objective value.
    obj: Vec<f64>,
    basis: Vec<usize>,
    origins: Vec<RowOrigin>,
    rhs_scale: f64,
    scratch: Vec<f64>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let mut le_rows: Vec<(Vec<f64>, f64, RowOrigin)> = Vec::new();
        for (idx, c) in lp.constraints().iter().enumerate() {
            let pos = RowOrigin {
                constraint: idx,
                sign: 1.0,
            };
            let neg = RowOrigin {
                constraint: idx,
                sign: -1.0,
            };
            let negated = || c.coeffs.iter().map(|v| -v).collect::<Vec<_>>();
            match c.relation {
                Relation::Le => le_rows.push((c.coeffs.clone(), c.rhs, pos)),
                Relation::Ge => le_rows.push((negated(), -c.rhs, neg)),
                Relation::Eq => {
                    le_rows.push((c.coeffs.clone(), c.rhs, pos));
                    le_rows.push((negated(), -c.rhs, neg));
                }
            }
        }
        let rows = le_rows.len();
        let n_art = le_rows.iter().filter(|(_, b, _)| *b < 0.0).count();
        let width = n + rows + n_art + 1;
        let mut a = vec![0.0; rows * width];
        let mut basis = Vec::with_capacity(rows);
        let mut origins = Vec::with_capacity(rows);
        let mut next_art = n + rows;
        let mut rhs_scale: f64 = 0.0;
        for (r, (coeffs, b, origin)) in le_rows.into_iter().enumerate() {
            let row = &mut a[r * width..(r + 1) * width];
            let flip = if b < 0.0 { -1.0 } else { 1.0 };
            for (j, v) in coeffs.iter().enumerate() {
                row[j] = flip * v;
            }
            row[n + r] = flip;
            row[width - 1] = flip * b;
            rhs_scale = rhs_scale.max(b.abs());
            if b < 0.0 {
                row[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            } else {
                basis.push(n + r);
            }
            origins.push(origin);
        }
        Self {
            rows,
            width,
            n_struct: n,
            n_art,
            a,
            obj: vec![0.0; width],
            basis,
            origins,
            rhs_scale,
            scratch: vec![0.0; width],
        }
    }

    fn rhs_col(&self) -> usize {
        self.width - 1
    }

    fn first_art(&self) -> usize {
        self.n_struct + self.rows
    }

    fn row(&self, r: usize) -> &[f64] {
        &self.a[r * self.width..(r + 1) * self.width]
    }

    fn load_objective(&mut self, cost: impl Fn(usize) -> f64) {
        let w = self.width;
        self.obj.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..self.rows {
            let cb = cost(self.basis[r]);
            if cb == 0.0 {
                continue;
            }
            let row = &self.a[r * w..(r + 1) * w];
            for (o, v) in self.obj.iter_mut().zip(row) {
                *o += cb * v;
            }
        }
        for j in 0..w - 1 {
            self.obj[j] -= cost(j);
        }
    }

    fn load_phase_one_objective(&mut self) {
        let first_art = self.first_art();
        self.load_objective(|j| if j >= first_art { -1.0 } else { 0.0 });
    }

    fn load_phase_two_objective(&mut self, c: &[f64]) {
        let n = self.n_struct;
        self.load_objective(|j| if j < n { c[j] } else { 0.0 });
    }

    fn run(
        &mut self,
        exclude_artificials: bool,
        opts: &SolverOptions,
        cap: usize,
        iterations: &mut usize,
    ) -> Result<Step, LpError> {
        let limit = if exclude_artificials {
            self.first_art()
        } else {
            self.width - 1
        };
        let mut bland = false;
        let mut streak = 0;
        loop {
            let Some(col) = self.entering(limit, bland, opts.cost_tolerance) else {
                return Ok(Step::Optimal);
            };
            let Some(row) = self.leaving(col, bland, opts.pivot_tolerance) else {
                return Ok(Step::Unbounded);
            };
            if *iterations >= cap {
                return Err(LpError::NumericalFailure {
                    iterations: *iterations,
                    basis: self.basis.clone(),
                });
            }
            let degenerate = self.a[row * self.width + self.rhs_col()] <= opts.feasibility_tolerance;
            self.pivot(row, col);
            *iterations += 1;
            if degenerate {
                streak += 1;
                if streak >= opts.degenerate_streak {
                    bland = true;
                }
            } else {
                streak = 0;
                bland = false;
            }
        }
    }

    fn entering(&self, limit: usize, bland: bool, tol: f64) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..limit {
            let rc = self.obj[j];
            if rc < -tol {
                if bland {
                    return Some(j);
                }
                if best.is_none_or(|(_, b)| rc < b) {
                    best = Some((j, rc));
                }
            }
        }
        best.map(|(j, _)| j)
    }

    fn leaving(&self, col: usize, bland: bool, tol: f64) -> Option<usize> {
        let rhs = self.rhs_col();
        let mut best: Option<(usize, f64, f64)> = None;
        for r in 0..self.rows {
            let row = self.row(r);
            let piv = row[col];
            if piv <= tol {
                continue;
            }
            let ratio = row[rhs].max(0.0) / piv;
            let better = match best {
                None => true,
                Some((br, bratio, bpiv)) => {
                    if ratio < bratio - 1e-12 {
                        true
                    } else if ratio <= bratio + 1e-12 {
                        if bland {
                            self.basis[r] < self.basis[br]
                        } else {
                            piv > bpiv
                        }
                    } else {
                        false
                    }
                }
            };
            if better {
                best = Some((r, ratio, piv));
            }
        }
        best.map(|(r, _, _)| r)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let inv = 1.0 / self.a[r * w + c];
        {
            let prow = &mut self.a[r * w..(r + 1) * w];
            for v in prow.iter_mut() {
                *v *= inv;
            }
            prow[c] = 1.0;
            self.scratch.copy_from_slice(prow);
        }
        let nz: Vec<usize> = (0..w).filter(|&j| self.scratch[j] != 0.0).collect();
        let prow = &self.scratch;
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let row = &mut self.a[i * w..(i + 1) * w];
            let f = row[c];
            if f == 0.0 {
                continue;
            }
            for &j in &nz {
                let v = row[j] - f * prow[j];
                row[j] = if v.abs() < 1e-13 { 0.0 } else { v };
            }
            row[c] = 0.0;
        }
        let f = self.obj[c];
        if f != 0.0 {
            for &j in &nz {
                let v = self.obj[j] - f * prow[j];
                self.obj[j] = if v.abs() < 1e-13 { 0.0 } else { v };
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Pivots zero-level artificials out of the basis where possible. Rows
    /// where no structural or slack column is available are redundant and keep
    /// their artificial at zero.
    fn expel_artificials(&mut self, opts: &SolverOptions) {
        let first_art = self.first_art();
        for r in 0..self.rows {
            if self.basis[r] < first_art {
                continue;
            }
            let row = self.row(r);
            let mut best: Option<(usize, f64)> = None;
            for (j, v) in row.iter().enumerate().take(first_art) {
                if v.abs() > opts.pivot_tolerance && best.is_none_or(|(_, b)| v.abs() > b) {
                    best = Some((j, v.abs()));
                }
            }
            if let Some((j, _)) = best {
                self.pivot(r, j);
            }
        }
    }

    fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n_struct];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.n_struct {
                x[b] = self.a[r * self.width + self.rhs_col()].max(0.0);
            }
        }
        x
    }

    fn duals(&self, n_constraints: usize) -> Vec<f64> {
        let mut y = vec![0.0; n_constraints];
        for (r, origin) in self.origins.iter().enumerate() {
            y[origin.constraint] += origin.sign * self.obj[self.n_struct + r];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(obj: &[f64], rows: &[(&[f64], Relation, f64)]) -> LinearProgram {
        let mut lp = LinearProgram::new(obj.to_vec()).unwrap();
        for (c, rel, b) in rows {
            lp.add_constraint(c.to_vec(), *rel, *b).unwrap();
        }
        lp
    }

    #[test]
    fn single_upper_bound() {
        let s = solve(&lp(&[1.0], &[(&[1.0], Relation::Le, 5.0)])).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 5.0).abs() < 1e-12);
        assert!((s.duals[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_only_is_unbounded() {
        let s = solve(&lp(&[1.0], &[(&[1.0], Relation::Ge, 1.0)])).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let s = solve(&lp(
            &[1.0, 1.0],
            &[
                (&[1.0, 1.0], Relation::Le, 1.0),
                (&[1.0, 0.0], Relation::Ge, 2.0),
            ],
        ))
        .unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn equality_constraint() {
        // max 2x + y  s.t. x + y = 3, x <= 2
        let s = solve(&lp(
            &[2.0, 1.0],
            &[
                (&[1.0, 1.0], Relation::Eq, 3.0),
                (&[1.0, 0.0], Relation::Le, 2.0),
            ],
        ))
        .unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 5.0).abs() < 1e-12);
        assert!((s.values[0] - 2.0).abs() < 1e-12);
        assert!((s.values[1] - 1.0).abs() < 1e-12);
        // duals: y_eq = 1, y_le = 1
        assert!((s.duals[0] - 1.0).abs() < 1e-12);
        assert!((s.duals[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_constraints() {
        let s = solve(&lp(&[-1.0, 0.0], &[])).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective_value, 0.0);
        let s = solve(&lp(&[0.0, 1.0], &[])).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn iteration_cap_reports_basis() {
        let p = lp(
            &[1.0, 1.0],
            &[
                (&[1.0, 2.0], Relation::Le, 4.0),
                (&[3.0, 1.0], Relation::Le, 6.0),
            ],
        );
        let opts = SolverOptions {
            max_iterations: Some(0),
            ..SolverOptions::default()
        };
        match solve_with(&p, &opts) {
            Err(LpError::NumericalFailure { basis, .. }) => assert_eq!(basis.len(), 2),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Classic degenerate LP on which textbook Dantzig pivoting cycles.
        let p = lp(
            &[0.75, -150.0, 0.02, -6.0],
            &[
                (&[0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0),
                (&[0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0),
                (&[0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0),
            ],
        );
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 0.05).abs() < 1e-9);
    }

    #[test]
    fn deterministic() {
        let p = lp(
            &[3.0, 2.0, 4.0],
            &[
                (&[1.0, 1.0, 2.0], Relation::Le, 4.0),
                (&[2.0, 0.0, 3.0], Relation::Le, 5.0),
                (&[2.0, 1.0, 3.0], Relation::Ge, 1.0),
            ],
        );
        assert_eq!(solve(&p).unwrap(), solve(&p).unwrap());
    }
}
