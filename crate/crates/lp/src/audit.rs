use crate::{LinearProgram, LpSolution, Relation};

/// Independent residual check of a candidate point (and, when present, its
/// dual multipliers) against the original constraint rows. Never reads the
/// solver's tableau.
#[derive(Clone, Debug, PartialEq)]
pub struct Residuals {
    /// Largest constraint or sign violation, each row scaled by
    /// `max(1, max_j |a_j|)`.
    pub max_violation: f64,
    /// Index of the worst row, `None` when the worst violation is a variable
    /// sign or there are no violations.
    pub worst_constraint: Option<usize>,
    pub objective: f64,
    pub dual: Option<DualResiduals>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualResiduals {
    /// Largest violation of `A^T y >= c` or of the multiplier sign rules.
    pub max_violation: f64,
    /// `b · y`, an upper bound on every feasible objective once the dual
    /// residual is zero.
    pub objective: f64,
    pub gap: f64,
}

impl Residuals {
    pub fn is_feasible(&self, tol: f64) -> bool {
        self.max_violation <= tol
    }

    /// Primal feasible, dual feasible and zero gap, all within `tol`
    /// (gap measured relative to `1 + |objective|`).
    pub fn certifies_optimality(&self, tol: f64) -> bool {
        self.is_feasible(tol)
            && self.dual.as_ref().is_some_and(|d| {
                d.max_violation <= tol && d.gap <= tol * (1.0 + self.objective.abs())
            })
    }
}

pub fn check_point(lp: &LinearProgram, x: &[f64]) -> Residuals {
    let mut max_violation: f64 = 0.0;
    let mut worst_constraint = None;
    for v in x {
        if -v > max_violation {
            max_violation = -v;
            worst_constraint = None;
        }
    }
    for (i, c) in lp.constraints().iter().enumerate() {
        let scale = c.coeffs.iter().fold(1.0_f64, |m, a| m.max(a.abs()));
        let lhs = c.activity(x);
        let v = match c.relation {
            Relation::Le => lhs - c.rhs,
            Relation::Ge => c.rhs - lhs,
            Relation::Eq => (lhs - c.rhs).abs(),
        } / scale;
        if v > max_violation {
            max_violation = v;
            worst_constraint = Some(i);
        }
    }
    Residuals {
        max_violation,
        worst_constraint,
        objective: lp.objective_value(x),
        dual: None,
    }
}

pub fn check_solution(lp: &LinearProgram, solution: &LpSolution) -> Residuals {
    let mut res = check_point(lp, &solution.values);
    if solution.status == crate::LpStatus::Optimal
        && solution.duals.len() == lp.constraints().len()
    {
        res.dual = Some(check_dual(lp, &solution.duals, res.objective));
    }
    res
}

fn check_dual(lp: &LinearProgram, y: &[f64], primal_objective: f64) -> DualResiduals {
    let mut max_violation: f64 = 0.0;
    let mut reduced = lp.objective().iter().map(|c| -c).collect::<Vec<_>>();
    let mut objective = 0.0;
    for (c, &yi) in lp.constraints().iter().zip(y) {
        let sign_violation = match c.relation {
            Relation::Le => -yi,
            Relation::Ge => yi,
            Relation::Eq => 0.0,
        };
        max_violation = max_violation.max(sign_violation);
        for (r, a) in reduced.iter_mut().zip(&c.coeffs) {
            *r += a * yi;
        }
        objective += c.rhs * yi;
    }
    for r in reduced {
        max_violation = max_violation.max(-r);
    }
    DualResiduals {
        max_violation,
        objective,
        gap: (objective - primal_objective).abs(),
    }
}
