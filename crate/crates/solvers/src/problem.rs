use std::fmt;

/// Constraint sense for a linear row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

/// A linear program in the form
///
/// ```text
///     minimize    c' x
///     subject to  A x {<=,=,>=} b
///                 lower <= x <= upper
/// ```
///
/// Bounds may be infinite. Rows are stored dense.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearProgram {
    /// An LP with `n` variables, no rows, zero objective and free variables.
    pub fn new(n: usize) -> Self {
        LinearProgram {
            objective: vec![0.0; n],
            rows: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.num_vars());
        self.rows.push(coeffs);
        self.senses.push(sense);
        self.rhs.push(rhs);
    }

    /// Adds a sparse row given as (variable, coefficient) pairs.
    pub fn add_sparse_row(&mut self, entries: &[(usize, f64)], sense: Sense, rhs: f64) {
        let mut row = vec![0.0; self.num_vars()];
        for &(j, v) in entries {
            row[j] += v;
        }
        self.add_row(row, sense, rhs);
    }

    /// Checks dimensional consistency and bound ordering.
    pub fn validate(&self) -> Result<(), SolverError> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(SolverError::DimensionMismatch(
                "bound vectors do not match variable count".into(),
            ));
        }
        if self.rows.len() != self.senses.len() || self.rows.len() != self.rhs.len() {
            return Err(SolverError::DimensionMismatch(
                "row/sense/rhs lengths differ".into(),
            ));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(SolverError::DimensionMismatch(format!(
                    "row {} has {} coefficients, expected {}",
                    i,
                    row.len(),
                    n
                )));
            }
        }
        for j in 0..n {
            if self.lower[j] > self.upper[j] {
                return Err(SolverError::InvalidBounds(j, self.lower[j], self.upper[j]));
            }
        }
        Ok(())
    }
}

/// A convex quadratic program: a [`LinearProgram`] plus a symmetric
/// positive-semidefinite matrix `Q` so the objective reads
/// `1/2 y' Q y + c' y`.
#[derive(Debug, Clone)]
pub struct QuadraticProgram {
    pub linear: LinearProgram,
    /// Dense symmetric PSD matrix, row-major, `n x n`.
    pub q: Vec<Vec<f64>>,
}

impl QuadraticProgram {
    pub fn new(n: usize) -> Self {
        QuadraticProgram {
            linear: LinearProgram::new(n),
            q: vec![vec![0.0; n]; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.linear.num_vars()
    }

    /// Adds `v` to `Q[i][j]` and `Q[j][i]` (or to the diagonal once).
    pub fn add_q(&mut self, i: usize, j: usize, v: f64) {
        if i == j {
            self.q[i][i] += v;
        } else {
            self.q[i][j] += v;
            self.q[j][i] += v;
        }
    }

    pub fn objective_value(&self, y: &[f64]) -> f64 {
        let mut obj = 0.0;
        for i in 0..self.num_vars() {
            obj += self.linear.objective[i] * y[i];
            let mut qy = 0.0;
            for j in 0..self.num_vars() {
                qy += self.q[i][j] * y[j];
            }
            obj += 0.5 * y[i] * qy;
        }
        obj
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        self.linear.validate()?;
        let n = self.num_vars();
        if self.q.len() != n || self.q.iter().any(|r| r.len() != n) {
            return Err(SolverError::DimensionMismatch("Q is not n x n".into()));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if (self.q[i][j] - self.q[j][i]).abs() > 1e-12 {
                    return Err(SolverError::NotSymmetric(i, j));
                }
            }
        }
        Ok(())
    }
}

/// Termination status of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// Result of an LP/QP/MILP solve.
///
/// `duals` holds one entry per constraint row and is populated only when
/// `status == Optimal`. For infeasible LPs, `farkas` carries the phase-one
/// duals (an infeasibility certificate) and `infeasibility` the residual
/// phase-one objective.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub primal: Vec<f64>,
    pub duals: Vec<f64>,
    pub objective: f64,
    /// Phase-one row duals when status == Infeasible.
    pub farkas: Vec<f64>,
    /// Minimum total constraint violation when status == Infeasible.
    pub infeasibility: f64,
    /// Best-bound gap reported by MILP when stopping at a node cap.
    pub gap: f64,
    /// Proven lower bound (MILP); equals `objective` when the gap is zero.
    pub bound: f64,
    /// Nonnegative KKT multipliers of active variable bounds (QP only).
    pub bound_duals: Vec<f64>,
}

impl SolveOutcome {
    pub fn new(status: SolveStatus) -> Self {
        SolveOutcome {
            status,
            primal: Vec::new(),
            duals: Vec::new(),
            objective: f64::NAN,
            farkas: Vec::new(),
            infeasibility: 0.0,
            gap: 0.0,
            bound: f64::NAN,
            bound_duals: Vec::new(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolverError {
    DimensionMismatch(String),
    InvalidBounds(usize, f64, f64),
    NotSymmetric(usize, usize),
    NotPsd(String),
    UnboundedInteger(usize),
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::DimensionMismatch(msg) => write!(f, "dimension mismatch: {}", msg),
            SolverError::InvalidBounds(j, lo, hi) => {
                write!(f, "variable {} has lower bound {} > upper bound {}", j, lo, hi)
            }
            SolverError::NotSymmetric(i, j) => {
                write!(f, "quadratic matrix not symmetric at ({}, {})", i, j)
            }
            SolverError::NotPsd(msg) => write!(f, "quadratic matrix not PSD: {}", msg),
            SolverError::UnboundedInteger(j) => {
                write!(f, "integer variable {} must have finite bounds", j)
            }
        }
    }
}

impl std::error::Error for SolverError {}
