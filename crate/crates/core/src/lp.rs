//! Minimal linear-programming interface used by the leximin solver.
//!
//! The leximin procedure only needs "maximize a linear objective over linear
//! constraints and box bounds, report the optimum and a point attaining it".
//! [`MicroLp`] implements that on top of the `microlp` simplex solver.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub cmp: Cmp,
    pub rhs: f64,
}

/// `maximize objective · x` subject to `constraints` and `lower ≤ x ≤ upper`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub bounds: Vec<(f64, f64)>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn add_var(&mut self, objective: f64, bounds: (f64, f64)) -> usize {
        self.objective.push(objective);
        self.bounds.push(bounds);
        self.objective.len() - 1
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, cmp: Cmp, rhs: f64) {
        self.constraints.push(Constraint { coeffs, cmp, rhs });
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub objective: f64,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("linear program solver failed: {0}")]
    Solver(String),
}

pub trait LpSolver: Sync {
    fn maximize(&self, lp: &LinearProgram) -> Result<LpSolution, LpError>;
}

/// Dense-problem adapter over `microlp`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MicroLp;

impl LpSolver for MicroLp {
    fn maximize(&self, lp: &LinearProgram) -> Result<LpSolution, LpError> {
        use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome};

        let mut problem = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<_> = lp
            .objective
            .iter()
            .zip(&lp.bounds)
            .map(|(&c, &b)| problem.add_var(c, b))
            .collect();
        for c in &lp.constraints {
            let expr: Vec<_> = c.coeffs.iter().map(|&(v, a)| (vars[v], a)).collect();
            let op = match c.cmp {
                Cmp::Le => ComparisonOp::Le,
                Cmp::Ge => ComparisonOp::Ge,
                Cmp::Eq => ComparisonOp::Eq,
            };
            problem.add_constraint(expr.as_slice(), op, c.rhs);
        }
        let solution = match problem.solve() {
            Ok(SolveOutcome::Solution(s)) => s,
            Ok(SolveOutcome::Interrupted(_)) => {
                return Err(LpError::Solver("solve interrupted".into()))
            }
            Err(microlp::Error::Infeasible) => return Err(LpError::Infeasible),
            Err(microlp::Error::Unbounded) => return Err(LpError::Unbounded),
            Err(e) => return Err(LpError::Solver(e.to_string())),
        };
        Ok(LpSolution {
            objective: solution.objective(),
            point: vars.iter().map(|&v| solution.var_value(v)).collect(),
        })
    }
}
