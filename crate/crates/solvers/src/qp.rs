use crate::problem::{QuadraticProgram, Sense, SolveOutcome, SolveStatus, SolverError};
use crate::simplex::solve_lp;

const STEP_TOL: f64 = 1e-11;
const MULT_TOL: f64 = 1e-9;
const ACT_TOL: f64 = 1e-9;

/// Internal inequality rows in `a' y <= b` form, tagged with their origin
/// so duals can be mapped back.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowTag {
    /// Original constraint row (index, sign flip applied?).
    Row(usize, bool),
    Lower(usize),
    Upper(usize),
}

struct InternalRows {
    eq_coeffs: Vec<Vec<f64>>,
    eq_rhs: Vec<f64>,
    eq_tags: Vec<usize>, // original row index
    ineq_coeffs: Vec<Vec<f64>>,
    ineq_rhs: Vec<f64>,
    ineq_tags: Vec<RowTag>,
}

fn build_rows(qp: &QuadraticProgram) -> InternalRows {
    let lp = &qp.linear;
    let n = lp.num_vars();
    let mut rows = InternalRows {
        eq_coeffs: Vec::new(),
        eq_rhs: Vec::new(),
        eq_tags: Vec::new(),
        ineq_coeffs: Vec::new(),
        ineq_rhs: Vec::new(),
        ineq_tags: Vec::new(),
    };
    for r in 0..lp.num_rows() {
        match lp.senses[r] {
            Sense::Eq => {
                rows.eq_coeffs.push(lp.rows[r].clone());
                rows.eq_rhs.push(lp.rhs[r]);
                rows.eq_tags.push(r);
            }
            Sense::Le => {
                rows.ineq_coeffs.push(lp.rows[r].clone());
                rows.ineq_rhs.push(lp.rhs[r]);
                rows.ineq_tags.push(RowTag::Row(r, false));
            }
            Sense::Ge => {
                rows.ineq_coeffs.push(lp.rows[r].iter().map(|v| -v).collect());
                rows.ineq_rhs.push(-lp.rhs[r]);
                rows.ineq_tags.push(RowTag::Row(r, true));
            }
        }
    }
    for j in 0..n {
        if lp.upper[j].is_finite() {
            let mut c = vec![0.0; n];
            c[j] = 1.0;
            rows.ineq_coeffs.push(c);
            rows.ineq_rhs.push(lp.upper[j]);
            rows.ineq_tags.push(RowTag::Upper(j));
        }
        if lp.lower[j].is_finite() {
            let mut c = vec![0.0; n];
            c[j] = -1.0;
            rows.ineq_coeffs.push(c);
            rows.ineq_rhs.push(-lp.lower[j]);
            rows.ineq_tags.push(RowTag::Lower(j));
        }
    }
    rows
}

/// Reusable state for re-solving a QP whose objective changed but whose
/// feasible set did not (the previous point stays feasible, so the active
/// set restarts warm).
#[derive(Debug, Clone, Default)]
pub struct QpWorkspace {
    y: Vec<f64>,
    working: Vec<usize>,
}

/// Solves a convex QP with a primal active-set method.
///
/// The starting point comes from a phase-one LP (so infeasibility is
/// detected with a certificate). Equality rows stay in the working set for
/// the whole solve; inequality rows enter when blocking and leave when
/// their multiplier goes negative (lowest index on ties). Duals follow the
/// `dV/db` convention of the LP solver; nonnegative KKT multipliers of
/// active variable bounds are reported in `bound_duals`.
pub fn solve_qp(qp: &QuadraticProgram) -> Result<SolveOutcome, SolverError> {
    solve_qp_warm(qp, None)
}

pub fn solve_qp_warm(
    qp: &QuadraticProgram,
    warm: Option<&mut QpWorkspace>,
) -> Result<SolveOutcome, SolverError> {
    qp.validate()?;
    psd_check(&qp.q)?;
    let n = qp.num_vars();
    let rows = build_rows(qp);

    // Starting point: reuse the warm point when it is still feasible,
    // otherwise run a phase-one LP.
    let mut y: Option<Vec<f64>> = None;
    let mut working: Vec<usize> = Vec::new();
    if let Some(ws) = warm.as_deref() {
        if ws.y.len() == n && point_feasible(&rows, &ws.y) {
            y = Some(ws.y.clone());
            working = ws
                .working
                .iter()
                .copied()
                .filter(|&r| r < rows.ineq_coeffs.len())
                .filter(|&r| {
                    let act = dot(&rows.ineq_coeffs[r], &ws.y) - rows.ineq_rhs[r];
                    act.abs() <= 1e-7
                })
                .collect();
        }
    }
    let mut y = match y {
        Some(v) => v,
        None => {
            let mut feas = qp.linear.clone();
            for c in feas.objective.iter_mut() {
                *c = 0.0;
            }
            let out = solve_lp(&feas)?;
            match out.status {
                SolveStatus::Optimal => out.primal,
                SolveStatus::Infeasible => {
                    let mut res = SolveOutcome::new(SolveStatus::Infeasible);
                    res.farkas = out.farkas;
                    res.infeasibility = out.infeasibility;
                    return Ok(res);
                }
                other => return Ok(SolveOutcome::new(other)),
            }
        }
    };

    let n_eq = rows.eq_coeffs.len();
    let max_iter = 200 + 50 * (n + rows.ineq_coeffs.len());

    for _iter in 0..max_iter {
        // KKT system on the current working set.
        let w = working.len();
        let dim = n + n_eq + w;
        let mut kkt = vec![vec![0.0; dim]; dim];
        let mut rhs = vec![0.0; dim];
        let grad = gradient(qp, &y);
        for i in 0..n {
            for j in 0..n {
                kkt[i][j] = qp.q[i][j];
            }
            rhs[i] = -grad[i];
        }
        for (k, row) in rows.eq_coeffs.iter().enumerate() {
            for j in 0..n {
                kkt[n + k][j] = row[j];
                kkt[j][n + k] = row[j];
            }
            rhs[n + k] = 0.0;
        }
        for (k, &r) in working.iter().enumerate() {
            let row = &rows.ineq_coeffs[r];
            for j in 0..n {
                kkt[n + n_eq + k][j] = row[j];
                kkt[j][n + n_eq + k] = row[j];
            }
            rhs[n + n_eq + k] = 0.0;
        }
        let sol = match lu_solve(kkt, rhs.clone()) {
            Some(s) => s,
            None => {
                // Semidefinite directions: regularize the Q block slightly.
                let mut kkt2 = vec![vec![0.0; dim]; dim];
                for i in 0..n {
                    for j in 0..n {
                        kkt2[i][j] = qp.q[i][j];
                    }
                    kkt2[i][i] += 1e-10 * (1.0 + qp.q[i][i].abs());
                }
                for (k, row) in rows.eq_coeffs.iter().enumerate() {
                    for j in 0..n {
                        kkt2[n + k][j] = row[j];
                        kkt2[j][n + k] = row[j];
                    }
                }
                for (k, &r) in working.iter().enumerate() {
                    let row = &rows.ineq_coeffs[r];
                    for j in 0..n {
                        kkt2[n + n_eq + k][j] = row[j];
                        kkt2[j][n + n_eq + k] = row[j];
                    }
                }
                match lu_solve(kkt2, rhs) {
                    Some(s) => s,
                    None => return Ok(SolveOutcome::new(SolveStatus::IterationLimit)),
                }
            }
        };
        let step = &sol[..n];
        let step_norm = step.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let scale = 1.0 + y.iter().fold(0.0f64, |m, v| m.max(v.abs()));

        if step_norm <= STEP_TOL * scale {
            // Stationary on the working set; check multipliers.
            let mults: Vec<f64> = sol[n + n_eq..].to_vec();
            let mut drop: Option<(usize, f64)> = None;
            for (k, &mu) in mults.iter().enumerate() {
                if mu < -MULT_TOL {
                    match drop {
                        Some((_, dv)) if mu >= dv => {}
                        _ => drop = Some((k, mu)),
                    }
                }
            }
            match drop {
                Some((k, _)) => {
                    working.remove(k);
                    continue;
                }
                None => {
                    // Optimal: package the outcome.
                    let eq_mults = &sol[n..n + n_eq];
                    return Ok(package(
                        qp, &rows, &y, eq_mults, &working, &mults, warm,
                    ));
                }
            }
        }

        // Ratio test against inactive inequalities.
        let mut alpha = 1.0f64;
        let mut blocker: Option<usize> = None;
        for r in 0..rows.ineq_coeffs.len() {
            if working.contains(&r) {
                continue;
            }
            let apr = dot(&rows.ineq_coeffs[r], step);
            if apr <= ACT_TOL {
                continue;
            }
            let slack = rows.ineq_rhs[r] - dot(&rows.ineq_coeffs[r], &y);
            let a = (slack / apr).max(0.0);
            if a < alpha - 1e-13 {
                alpha = a;
                blocker = Some(r);
            }
        }
        if step_norm > 1e13 {
            return Ok(SolveOutcome::new(SolveStatus::Unbounded));
        }
        for (yi, si) in y.iter_mut().zip(step.iter()) {
            *yi += alpha * si;
        }
        if let Some(r) = blocker {
            working.push(r);
        }
    }
    Ok(SolveOutcome::new(SolveStatus::IterationLimit))
}

fn package(
    qp: &QuadraticProgram,
    rows: &InternalRows,
    y: &[f64],
    eq_mults: &[f64],
    working: &[usize],
    ineq_mults: &[f64],
    warm: Option<&mut QpWorkspace>,
) -> SolveOutcome {
    let mut out = SolveOutcome::new(SolveStatus::Optimal);
    out.primal = y.to_vec();
    out.objective = qp.objective_value(y);
    out.bound = out.objective;
    out.duals = vec![0.0; qp.linear.num_rows()];
    out.bound_duals = vec![0.0; qp.num_vars()];
    // Lagrangian form is f + mu' (A y - b), so dV/db = -mu.
    for (k, &orig) in rows.eq_tags.iter().enumerate() {
        out.duals[orig] = -eq_mults[k];
    }
    for (k, &r) in working.iter().enumerate() {
        let mu = ineq_mults[k];
        match rows.ineq_tags[r] {
            RowTag::Row(orig, flipped) => {
                out.duals[orig] = if flipped { mu } else { -mu };
            }
            RowTag::Upper(j) | RowTag::Lower(j) => {
                out.bound_duals[j] = mu.max(0.0);
            }
        }
    }
    if let Some(ws) = warm {
        ws.y = y.to_vec();
        ws.working = working.to_vec();
    }
    out
}

fn point_feasible(rows: &InternalRows, y: &[f64]) -> bool {
    for (row, &b) in rows.eq_coeffs.iter().zip(rows.eq_rhs.iter()) {
        if (dot(row, y) - b).abs() > 1e-7 {
            return false;
        }
    }
    for (row, &b) in rows.ineq_coeffs.iter().zip(rows.ineq_rhs.iter()) {
        if dot(row, y) - b > 1e-7 {
            return false;
        }
    }
    true
}

fn gradient(qp: &QuadraticProgram, y: &[f64]) -> Vec<f64> {
    let n = qp.num_vars();
    let mut g = qp.linear.objective.clone();
    for i in 0..n {
        let mut qy = 0.0;
        for j in 0..n {
            qy += qp.q[i][j] * y[j];
        }
        g[i] += qy;
    }
    g
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Dense LU with partial pivoting; returns None when singular.
fn lu_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut piv = k;
        let mut best = a[perm[k]][k].abs();
        for i in (k + 1)..n {
            let v = a[perm[i]][k].abs();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best < 1e-12 {
            return None;
        }
        perm.swap(k, piv);
        let pk = perm[k];
        let diag = a[pk][k];
        for i in (k + 1)..n {
            let pi = perm[i];
            let factor = a[pi][k] / diag;
            if factor != 0.0 {
                a[pi][k] = factor;
                for j in (k + 1)..n {
                    let v = a[pk][j];
                    a[pi][j] -= factor * v;
                }
                b[pi] -= factor * b[pk];
            } else {
                a[pi][k] = 0.0;
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let pk = perm[k];
        let mut v = b[pk];
        for j in (k + 1)..n {
            v -= a[pk][j] * x[j];
        }
        x[k] = v / a[pk][k];
    }
    Some(x)
}

/// Verifies positive semidefiniteness by diagonally pivoted symmetric
/// elimination: every pivot must stay above -1e-10 (relative).
fn psd_check(q: &[Vec<f64>]) -> Result<(), SolverError> {
    let n = q.len();
    let mut a: Vec<Vec<f64>> = q.to_vec();
    let mut active: Vec<usize> = (0..n).collect();
    let scale = q
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1.0);
    while let Some((pos, &piv_idx)) = active
        .iter()
        .enumerate()
        .max_by(|x, y| a[*x.1][*x.1].total_cmp(&a[*y.1][*y.1]))
    {
        let d = a[piv_idx][piv_idx];
        if d < -1e-10 * scale {
            return Err(SolverError::NotPsd(format!(
                "negative pivot {} at index {}",
                d, piv_idx
            )));
        }
        if d <= 1e-14 * scale {
            // The largest remaining diagonal is (numerically) zero: PSD
            // requires the rest of the diagonal to be nonnegative and the
            // corresponding off-diagonals to vanish.
            for &i in &active {
                if a[i][i] < -1e-10 * scale {
                    return Err(SolverError::NotPsd(format!(
                        "negative pivot {} at index {}",
                        a[i][i], i
                    )));
                }
                for &j in &active {
                    if a[i][j].abs() > 1e-7 * scale && i != j {
                        return Err(SolverError::NotPsd(format!(
                            "zero diagonal with nonzero off-diagonal at ({}, {})",
                            i, j
                        )));
                    }
                }
            }
            return Ok(());
        }
        active.remove(pos);
        let row: Vec<f64> = a[piv_idx].clone();
        for &i in &active {
            let f = a[i][piv_idx] / d;
            if f != 0.0 {
                for &j in &active {
                    a[i][j] -= f * row[j];
                }
            }
        }
        if active.is_empty() {
            break;
        }
    }
    Ok(())
}
