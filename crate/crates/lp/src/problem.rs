use std::fmt;

use crate::LpError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
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

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum()
    }
}

/// `maximize objective · x` subject to the constraints and `x >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Result<Self, LpError> {
        if objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite("objective".into()));
        }
        Ok(Self {
            objective,
            constraints: Vec::new(),
        })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn add_constraint(
        &mut self,
        coeffs: Vec<f64>,
        relation: Relation,
        rhs: f64,
    ) -> Result<usize, LpError> {
        if coeffs.len() != self.num_vars() {
            return Err(LpError::DimensionMismatch {
                expected: self.num_vars(),
                found: coeffs.len(),
            });
        }
        if !rhs.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite(format!(
                "constraint {}",
                self.constraints.len()
            )));
        }
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        Ok(self.constraints.len() - 1)
    }

    /// Sparse convenience form: `(variable, coefficient)` pairs, repeated
    /// variables are summed.
    pub fn add_sparse(
        &mut self,
        terms: &[(usize, f64)],
        relation: Relation,
        rhs: f64,
    ) -> Result<usize, LpError> {
        let mut coeffs = vec![0.0; self.num_vars()];
        for &(var, c) in terms {
            if var >= coeffs.len() {
                return Err(LpError::DimensionMismatch {
                    expected: self.num_vars(),
                    found: var + 1,
                });
            }
            coeffs[var] += c;
        }
        self.add_constraint(coeffs, relation, rhs)
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

fn write_row(f: &mut fmt::Formatter<'_>, coeffs: &[f64]) -> fmt::Result {
    let mut first = true;
    for (j, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        if first {
            write!(f, "{c} x{j}")?;
            first = false;
        } else if c < 0.0 {
            write!(f, " - {} x{j}", -c)?;
        } else {
            write!(f, " + {c} x{j}")?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// Human-readable dump with a stable ordering; for debugging only.
impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "maximize ")?;
        write_row(f, &self.objective)?;
        writeln!(f)?;
        writeln!(f, "subject to")?;
        for (i, c) in self.constraints.iter().enumerate() {
            write!(f, "  c{i}: ")?;
            write_row(f, &c.coeffs)?;
            writeln!(f, " {} {}", c.relation.symbol(), c.rhs)?;
        }
        write!(f, "  x >= 0 ({} vars)", self.num_vars())
    }
}
