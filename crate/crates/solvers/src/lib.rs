//! Self-contained mathematical-programming kernels: dense bounded-variable
//! simplex with dual values, an active-set convex QP solver, and a
//! best-first branch-and-bound MILP solver.
//!
//! All solvers are deterministic: fixed pivot rules with lowest-index
//! tie-breaking, no randomization, no threading. Dual values follow the
//! value-function convention: the reported dual of row `r` is the
//! sensitivity `dV/db_r` of the optimal objective to that row's
//! right-hand side. For a minimization problem this makes duals of `<=`
//! rows nonpositive and duals of `>=` rows nonnegative.

mod milp;
mod problem;
mod qp;
mod simplex;

pub use milp::{solve_milp, MilpOptions};
pub use problem::{LinearProgram, QuadraticProgram, Sense, SolveOutcome, SolveStatus, SolverError};
pub use qp::{solve_qp, solve_qp_warm, QpWorkspace};
pub use simplex::{solve_lp, solve_lp_with, SimplexOptions, Tableau};

pub(crate) const FEAS_TOL: f64 = 1e-9;
pub(crate) const COST_TOL: f64 = 1e-9;
pub(crate) const PIVOT_TOL: f64 = 1e-10;
