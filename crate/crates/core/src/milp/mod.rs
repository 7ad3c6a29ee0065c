//! A small mixed-binary linear programming engine and the scheduling
//! formulations built on it.

use std::time::Duration;

use serde::Serialize;

mod bnb;
pub mod builders;
mod lp_format;
mod model;
mod simplex;

pub use bnb::{branch_and_bound, branch_and_bound_with, BnbOptions};
pub use builders::{
    build_raswtg0, build_raswtg_k, build_saa_rwtg, build_wsras, saa_objective, wsras_objective, Formulation,
};
pub use lp_format::write_lp;
pub use model::{Constraint, LinExpr, LinearModel, Relation, VarId, Variable};
pub use simplex::{simplex_solve, simplex_solve_with, SimplexOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MilpStatus {
    Optimal,
    Infeasible,
    IterationLimit,
    TimeLimit,
    NodeLimit,
    /// No solution strictly better than the supplied cutoff exists.
    Cutoff,
}

/// Result of an LP or MILP solve.
///
/// `objective` is `+inf` and `values` is empty when no solution is known.
/// `bound` is a proven lower bound on the optimum.
#[derive(Clone, Debug)]
pub struct MilpSolution {
    pub status: MilpStatus,
    pub objective: f64,
    pub values: Vec<f64>,
    pub bound: f64,
    pub nodes: usize,
    pub iterations: usize,
    pub elapsed: Duration,
}

impl MilpSolution {
    pub fn has_solution(&self) -> bool {
        !self.values.is_empty()
    }

    pub fn value(&self, v: VarId) -> f64 {
        self.values[v.0]
    }
}
