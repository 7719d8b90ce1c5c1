use crate::problem::{LinearProgram, Sense, SolveOutcome, SolveStatus};
use crate::{COST_TOL, FEAS_TOL, PIVOT_TOL};

/// Options controlling the simplex iteration.
#[derive(Debug, Clone)]
pub struct SimplexOptions {
    /// Hard pivot cap across both phases.
    pub max_pivots: usize,
    /// Switch from Dantzig pricing to Bland's rule after this many pivots.
    pub bland_after: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_pivots: 100_000,
            bland_after: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable held at zero.
    FreeZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

/// Dense bounded-variable simplex tableau.
///
/// Columns are laid out as `[structural | logicals | artificials]` with one
/// logical per row (its bounds encode the row sense). The tableau matrix is
/// `B^{-1} A` maintained by explicit pivoting; `tb = B^{-1} b` rides along so
/// basic values can be refreshed exactly. Rows are scaled to unit max-norm
/// on entry and duals are unscaled on extraction.
///
/// The tableau is retained after a solve so callers can change bounds or
/// append rows and re-optimize with the dual simplex (used by branch-and-
/// bound and by Benders masters).
#[derive(Debug, Clone)]
pub struct Tableau {
    n_struct: usize,
    /// t[r][j], including logical and artificial columns.
    t: Vec<Vec<f64>>,
    /// B^{-1} b, updated by the same pivots as `t`.
    tb: Vec<f64>,
    /// Current values of basic variables, row-indexed.
    beta: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    /// Phase-2 objective per column (zero for logicals/artificials).
    cost: Vec<f64>,
    /// Reduced costs for the active phase.
    d: Vec<f64>,
    /// Current objective value for the active phase.
    z: f64,
    /// Columns barred from pricing (artificials after phase 1).
    barred: Vec<bool>,
    row_scale: Vec<f64>,
    phase: Phase,
    pivots: usize,
    options: SimplexOptions,
    /// Phase-one duals captured when the LP is infeasible.
    farkas: Vec<f64>,
    infeasibility: f64,
}

impl Tableau {
    /// Builds a tableau from an LP. Rows are scaled; no solve happens yet.
    pub fn new(lp: &LinearProgram, options: SimplexOptions) -> Tableau {
        let n = lp.num_vars();
        let m = lp.num_rows();
        let ncols = n + m;
        let mut t = Vec::with_capacity(m);
        let mut row_scale = Vec::with_capacity(m);
        let mut lo = lp.lower.clone();
        let mut hi = lp.upper.clone();
        let mut cost = lp.objective.clone();
        lo.reserve(m);
        hi.reserve(m);
        cost.resize(ncols, 0.0);
        let mut tb = Vec::with_capacity(m);
        for r in 0..m {
            let mut scale: f64 = 0.0;
            for &v in &lp.rows[r] {
                scale = scale.max(v.abs());
            }
            if scale <= 0.0 {
                scale = 1.0;
            }
            let mut row = vec![0.0; ncols];
            for j in 0..n {
                row[j] = lp.rows[r][j] / scale;
            }
            row[n + r] = 1.0;
            t.push(row);
            tb.push(lp.rhs[r] / scale);
            row_scale.push(scale);
            let (slo, shi) = match lp.senses[r] {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Eq => (0.0, 0.0),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
            };
            lo.push(slo);
            hi.push(shi);
        }
        let mut state = Vec::with_capacity(ncols);
        for j in 0..ncols {
            state.push(initial_nonbasic_state(lo[j], hi[j]));
        }
        Tableau {
            n_struct: n,
            t,
            tb,
            beta: vec![0.0; m],
            basis: Vec::new(),
            state,
            lo,
            hi,
            cost,
            d: vec![0.0; ncols],
            z: 0.0,
            barred: vec![false; ncols],
            row_scale,
            phase: Phase::One,
            pivots: 0,
            options,
            farkas: Vec::new(),
            infeasibility: 0.0,
        }
    }

    fn ncols(&self) -> usize {
        self.t.first().map_or(self.n_struct, |r| r.len())
    }

    fn nrows(&self) -> usize {
        self.t.len()
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::AtLower => self.lo[j],
            VarState::AtUpper => self.hi[j],
            VarState::FreeZero => 0.0,
            VarState::Basic => unreachable!("basic variable has no nonbasic value"),
        }
    }

    /// Two-phase primal solve from a fresh logical basis.
    pub fn solve_primal(&mut self) -> SolveStatus {
        let m = self.nrows();
        let n = self.n_struct;
        // Start with all structural variables nonbasic and logicals basic.
        for j in 0..self.ncols() {
            self.state[j] = initial_nonbasic_state(self.lo[j], self.hi[j]);
        }
        self.basis = (n..n + m).collect();
        for r in 0..m {
            self.state[n + r] = VarState::Basic;
        }
        self.refresh_beta();

        // Replace out-of-bound logicals with artificials. An artificial is a
        // +e_r column (so the basic-column identity holds) whose one-sided
        // bound and phase-one cost match the sign of the residual it carries.
        let mut art_cols: Vec<(usize, f64)> = Vec::new();
        for r in 0..m {
            let s = n + r;
            let (blo, bhi) = (self.lo[s], self.hi[s]);
            if self.beta[r] >= blo - FEAS_TOL && self.beta[r] <= bhi + FEAS_TOL {
                continue;
            }
            let clamp = if self.beta[r] < blo { blo } else { bhi };
            let residual = self.beta[r] - clamp;
            // Park the logical at the clamped bound; the artificial carries
            // the (signed) residual.
            self.state[s] = if clamp == blo {
                VarState::AtLower
            } else {
                VarState::AtUpper
            };
            let col = self.ncols();
            for (i, row) in self.t.iter_mut().enumerate() {
                row.push(if i == r { 1.0 } else { 0.0 });
            }
            let sign = if residual > 0.0 { 1.0 } else { -1.0 };
            if sign > 0.0 {
                self.lo.push(0.0);
                self.hi.push(f64::INFINITY);
            } else {
                self.lo.push(f64::NEG_INFINITY);
                self.hi.push(0.0);
            }
            self.cost.push(0.0);
            self.d.push(0.0);
            self.state.push(VarState::Basic);
            self.barred.push(false);
            self.basis[r] = col;
            self.beta[r] = residual;
            art_cols.push((col, sign));
        }

        if !art_cols.is_empty() {
            self.phase = Phase::One;
            let mut phase1_cost = vec![0.0; self.ncols()];
            for &(c, sign) in &art_cols {
                phase1_cost[c] = sign;
            }
            self.refresh_costs(&phase1_cost);
            let status = self.primal_loop(&phase1_cost);
            if status == SolveStatus::IterationLimit {
                return status;
            }
            if self.z > 1e-7 {
                self.infeasibility = self.z;
                self.farkas = self.extract_duals();
                return SolveStatus::Infeasible;
            }
            let cols: Vec<usize> = art_cols.iter().map(|&(c, _)| c).collect();
            self.finish_phase_one(&cols);
        }

        self.phase = Phase::Two;
        let cost = self.cost.clone();
        self.refresh_costs(&cost);
        self.primal_loop(&cost)
    }

    /// Pivot out artificials that linger in the basis at zero and bar all
    /// artificial columns from future pricing.
    fn finish_phase_one(&mut self, art_cols: &[usize]) {
        for &c in art_cols {
            self.barred[c] = true;
            self.lo[c] = 0.0;
            self.hi[c] = 0.0;
        }
        for r in 0..self.nrows() {
            let b = self.basis[r];
            if !self.barred[b] {
                continue;
            }
            // Any unbarred column with a usable pivot entry will do.
            let mut pick = None;
            for j in 0..self.ncols() {
                if self.barred[j] || self.state[j] == VarState::Basic {
                    continue;
                }
                if self.t[r][j].abs() > 1e-7 {
                    pick = Some(j);
                    break;
                }
            }
            if let Some(j) = pick {
                // Exchange at (essentially) zero step so the artificial
                // leaves the basis at its pinned zero value.
                let entering_value = self.nonbasic_value(j) + self.beta[r] / self.t[r][j];
                self.pivot(r, j, entering_value, VarState::AtLower);
            }
            // A redundant row keeps its artificial basic at zero.
        }
    }

    fn refresh_beta(&mut self) {
        let m = self.nrows();
        for r in 0..m {
            let mut v = self.tb[r];
            for j in 0..self.ncols() {
                if self.state[j] != VarState::Basic {
                    let val = self.nonbasic_value(j);
                    if val != 0.0 {
                        v -= self.t[r][j] * val;
                    }
                }
            }
            self.beta[r] = v;
        }
    }

    /// Recomputes reduced costs `d = c - c_B' T` and the objective value.
    fn refresh_costs(&mut self, cost: &[f64]) {
        let m = self.nrows();
        self.d = cost.to_vec();
        for r in 0..m {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                let row = &self.t[r];
                for (dj, &tv) in self.d.iter_mut().zip(row.iter()) {
                    *dj -= cb * tv;
                }
            }
        }
        let mut z = 0.0;
        for j in 0..self.ncols() {
            if self.state[j] == VarState::Basic {
                continue;
            }
            let v = self.nonbasic_value(j);
            if v != 0.0 {
                z += cost[j] * v;
            }
        }
        for r in 0..m {
            z += cost[self.basis[r]] * self.beta[r];
        }
        self.z = z;
    }

    fn primal_loop(&mut self, cost: &[f64]) -> SolveStatus {
        loop {
            if self.pivots >= self.options.max_pivots {
                return SolveStatus::IterationLimit;
            }
            let bland = self.pivots >= self.options.bland_after;
            let entering = self.price(bland);
            let (j, dir) = match entering {
                None => return SolveStatus::Optimal,
                Some(e) => e,
            };
            match self.ratio_test(j, dir) {
                RatioOutcome::Unbounded => {
                    if self.phase == Phase::Two {
                        return SolveStatus::Unbounded;
                    }
                    // Phase 1 is bounded below; treat as numerical trouble.
                    return SolveStatus::IterationLimit;
                }
                RatioOutcome::BoundFlip(delta) => {
                    let old = self.nonbasic_value(j);
                    let new = old + dir * delta;
                    self.state[j] = if dir > 0.0 {
                        VarState::AtUpper
                    } else {
                        VarState::AtLower
                    };
                    for r in 0..self.nrows() {
                        self.beta[r] -= self.t[r][j] * (new - old);
                    }
                    self.z += self.d[j] * (new - old);
                    self.pivots += 1;
                }
                RatioOutcome::Pivot(r, delta, leave_state) => {
                    let old = self.nonbasic_value(j);
                    let new = old + dir * delta;
                    self.pivot(r, j, new, leave_state);
                    self.pivots += 1;
                    if self.pivots % 512 == 0 {
                        self.refresh_beta();
                        self.refresh_costs(cost);
                    }
                }
            }
        }
    }

    /// Chooses the entering column; returns (column, direction).
    fn price(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.ncols() {
            if self.barred[j] || self.state[j] == VarState::Basic {
                continue;
            }
            if self.lo[j] == self.hi[j] && self.state[j] != VarState::FreeZero {
                continue; // fixed variable
            }
            let d = self.d[j];
            let (viol, dir) = match self.state[j] {
                VarState::AtLower => {
                    if d < -COST_TOL {
                        (-d, 1.0)
                    } else {
                        continue;
                    }
                }
                VarState::AtUpper => {
                    if d > COST_TOL {
                        (d, -1.0)
                    } else {
                        continue;
                    }
                }
                VarState::FreeZero => {
                    if d < -COST_TOL {
                        (-d, 1.0)
                    } else if d > COST_TOL {
                        (d, -1.0)
                    } else {
                        continue;
                    }
                }
                VarState::Basic => continue,
            };
            if bland {
                return Some((j, dir));
            }
            match best {
                Some((_, bv, _)) if viol <= bv => {}
                _ => best = Some((j, viol, dir)),
            }
        }
        best.map(|(j, _, dir)| (j, dir))
    }

    fn ratio_test(&self, j: usize, dir: f64) -> RatioOutcome {
        let own_span = self.hi[j] - self.lo[j];
        // Pass 1: smallest step before some basic variable hits a bound.
        let mut min_delta = f64::INFINITY;
        for r in 0..self.nrows() {
            let rate = self.t[r][j] * dir; // basic r changes by -rate per unit step
            if rate.abs() <= PIVOT_TOL {
                continue;
            }
            let b = self.basis[r];
            let delta = if rate > 0.0 {
                if !self.lo[b].is_finite() {
                    continue;
                }
                (self.beta[r] - self.lo[b]) / rate
            } else {
                if !self.hi[b].is_finite() {
                    continue;
                }
                (self.beta[r] - self.hi[b]) / rate
            };
            let delta = delta.max(0.0);
            if delta < min_delta {
                min_delta = delta;
            }
        }
        if own_span.is_finite() && own_span <= min_delta + 1e-12 {
            return RatioOutcome::BoundFlip(own_span.max(0.0));
        }
        if !min_delta.is_finite() {
            return RatioOutcome::Unbounded;
        }
        // Pass 2: among near-minimal rows prefer the largest pivot, then the
        // lowest basic variable index.
        let mut pick: Option<(usize, VarState, f64)> = None;
        let mut pick_basic = usize::MAX;
        for r in 0..self.nrows() {
            let rate = self.t[r][j] * dir;
            if rate.abs() <= PIVOT_TOL {
                continue;
            }
            let b = self.basis[r];
            let (delta, leave_state) = if rate > 0.0 {
                if !self.lo[b].is_finite() {
                    continue;
                }
                ((self.beta[r] - self.lo[b]) / rate, VarState::AtLower)
            } else {
                if !self.hi[b].is_finite() {
                    continue;
                }
                ((self.beta[r] - self.hi[b]) / rate, VarState::AtUpper)
            };
            let delta = delta.max(0.0);
            if delta > min_delta + 1e-9 {
                continue;
            }
            let better = match pick {
                None => true,
                Some((_, _, bp)) => {
                    rate.abs() > bp + 1e-12 || (rate.abs() >= bp - 1e-12 && b < pick_basic)
                }
            };
            if better {
                pick = Some((r, leave_state, rate.abs()));
                pick_basic = b;
            }
        }
        match pick {
            Some((r, leave_state, _)) => RatioOutcome::Pivot(r, min_delta, leave_state),
            None => RatioOutcome::Unbounded,
        }
    }

    /// Performs the basis exchange at row `r` with entering column `j`.
    fn pivot(&mut self, r: usize, j: usize, entering_value: f64, leave_state: VarState) {
        let old_val = self.nonbasic_value(j);
        let step = entering_value - old_val;
        for i in 0..self.nrows() {
            if i != r {
                self.beta[i] -= self.t[i][j] * step;
            }
        }
        self.z += self.d[j] * step;

        let leaving = self.basis[r];
        self.state[leaving] = leave_state;
        self.basis[r] = j;
        self.state[j] = VarState::Basic;
        self.beta[r] = entering_value;

        let piv = self.t[r][j];
        let inv = 1.0 / piv;
        for v in self.t[r].iter_mut() {
            *v *= inv;
        }
        self.tb[r] *= inv;
        let pivot_row = std::mem::take(&mut self.t[r]);
        let pivot_tb = self.tb[r];
        for i in 0..self.nrows() {
            if i == r {
                continue;
            }
            let alpha = self.t[i][j];
            if alpha != 0.0 {
                let row = &mut self.t[i];
                for (rv, &pv) in row.iter_mut().zip(pivot_row.iter()) {
                    *rv -= alpha * pv;
                }
                self.tb[i] -= alpha * pivot_tb;
            }
        }
        let dj = self.d[j];
        if dj != 0.0 {
            for (dv, &pv) in self.d.iter_mut().zip(pivot_row.iter()) {
                *dv -= dj * pv;
            }
        }
        self.t[r] = pivot_row;
    }

    /// Flips nonbasic variables whose reduced-cost sign disagrees with the
    /// bound they sit at (possible after unfixing a variable). Returns false
    /// when a wrong-signed column has no opposite finite bound to flip to.
    fn restore_dual_feasibility(&mut self) -> bool {
        for j in 0..self.ncols() {
            if self.barred[j] || self.state[j] == VarState::Basic || self.lo[j] == self.hi[j] {
                continue;
            }
            let d = self.d[j];
            let flip_to = match self.state[j] {
                VarState::AtLower if d < -COST_TOL => {
                    if self.hi[j].is_finite() {
                        VarState::AtUpper
                    } else {
                        return false;
                    }
                }
                VarState::AtUpper if d > COST_TOL => {
                    if self.lo[j].is_finite() {
                        VarState::AtLower
                    } else {
                        return false;
                    }
                }
                VarState::FreeZero if d.abs() > COST_TOL => return false,
                _ => continue,
            };
            let old = self.nonbasic_value(j);
            self.state[j] = flip_to;
            let new = self.nonbasic_value(j);
            for r in 0..self.nrows() {
                self.beta[r] -= self.t[r][j] * (new - old);
            }
            self.z += d * (new - old);
        }
        true
    }

    /// Dual simplex: restores primal feasibility while keeping reduced
    /// costs dual-feasible. Reduced costs that lost their sign after a
    /// bound change are first repaired by bound flips; if that is not
    /// possible the caller must re-solve from scratch.
    pub fn dual_simplex(&mut self) -> SolveStatus {
        if !self.restore_dual_feasibility() {
            return SolveStatus::IterationLimit;
        }
        loop {
            if self.pivots >= self.options.max_pivots {
                return SolveStatus::IterationLimit;
            }
            // Most-violated basic, ties by lowest basic variable index.
            let mut pick: Option<(usize, f64, bool)> = None;
            for r in 0..self.nrows() {
                let b = self.basis[r];
                let below = self.lo[b] - self.beta[r];
                let above = self.beta[r] - self.hi[b];
                let (viol, low_side) = if below > above { (below, true) } else { (above, false) };
                if viol <= 1e-9 {
                    continue;
                }
                match pick {
                    Some((pr, pv, _)) => {
                        if viol > pv + 1e-12 || (viol >= pv - 1e-12 && b < self.basis[pr]) {
                            pick = Some((r, viol, low_side));
                        }
                    }
                    None => pick = Some((r, viol, low_side)),
                }
            }
            let (r, _, low_side) = match pick {
                None => return SolveStatus::Optimal,
                Some(p) => p,
            };

            // Entering column via the dual ratio test.
            let mut best: Option<(usize, f64, f64)> = None; // (col, ratio, |pivot|)
            for j in 0..self.ncols() {
                if self.barred[j] || self.state[j] == VarState::Basic {
                    continue;
                }
                if self.lo[j] == self.hi[j] && self.state[j] != VarState::FreeZero {
                    continue;
                }
                let a = self.t[r][j];
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                // If the leaving basic is below its lower bound it must rise:
                // an increasing entering variable needs a < 0, a decreasing
                // one needs a > 0 (and vice versa when above the upper bound).
                let can_inc = matches!(self.state[j], VarState::AtLower | VarState::FreeZero);
                let can_dec = matches!(self.state[j], VarState::AtUpper | VarState::FreeZero);
                let usable = if low_side {
                    (can_inc && a < 0.0) || (can_dec && a > 0.0)
                } else {
                    (can_inc && a > 0.0) || (can_dec && a < 0.0)
                };
                if !usable {
                    continue;
                }
                let ratio = (self.d[j] / a).abs();
                match best {
                    Some((bj, br, bp)) => {
                        if ratio < br - 1e-12
                            || (ratio <= br + 1e-12
                                && (a.abs() > bp + 1e-12 || (a.abs() >= bp - 1e-12 && j < bj)))
                        {
                            best = Some((j, ratio, a.abs()));
                        }
                    }
                    None => best = Some((j, ratio, a.abs())),
                }
            }
            let (j, _, _) = match best {
                None => return SolveStatus::Infeasible,
                Some(b) => b,
            };

            let bvar = self.basis[r];
            let target = if low_side { self.lo[bvar] } else { self.hi[bvar] };
            let a = self.t[r][j];
            let entering_value = self.nonbasic_value(j) + (self.beta[r] - target) / a;
            let leave_state = if low_side {
                VarState::AtLower
            } else {
                VarState::AtUpper
            };
            self.pivot(r, j, entering_value, leave_state);
            self.pivots += 1;
            if self.pivots % 512 == 0 {
                self.refresh_beta();
                let cost = self.cost.clone();
                self.refresh_costs(&cost);
            }
        }
    }

    /// Changes the bounds of a structural variable, keeping the tableau
    /// consistent. Follow with [`Tableau::dual_simplex`] to re-optimize.
    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        debug_assert!(var < self.n_struct);
        debug_assert!(lower <= upper);
        if self.state[var] == VarState::Basic {
            self.lo[var] = lower;
            self.hi[var] = upper;
            return;
        }
        // The current value must be read before the bounds move.
        let old = self.nonbasic_value(var);
        self.lo[var] = lower;
        self.hi[var] = upper;
        let mut new_state = self.state[var];
        if new_state == VarState::FreeZero && (lower.is_finite() || upper.is_finite()) {
            new_state = if lower.is_finite() {
                VarState::AtLower
            } else {
                VarState::AtUpper
            };
        }
        if new_state == VarState::AtLower && !lower.is_finite() {
            new_state = VarState::AtUpper;
        }
        if new_state == VarState::AtUpper && !upper.is_finite() {
            new_state = VarState::AtLower;
        }
        self.state[var] = new_state;
        let new = self.nonbasic_value(var);
        if new != old {
            for r in 0..self.nrows() {
                self.beta[r] -= self.t[r][var] * (new - old);
            }
            self.z += self.d[var] * (new - old);
        }
    }

    /// Appends a constraint row (unscaled structural coefficients) to a
    /// solved tableau; the new logical enters the basis, preserving dual
    /// feasibility, so a dual-simplex call restores optimality.
    pub fn add_row(&mut self, coeffs: &[f64], sense: Sense, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.n_struct);
        let mut scale: f64 = 0.0;
        for &v in coeffs {
            scale = scale.max(v.abs());
        }
        if scale <= 0.0 {
            scale = 1.0;
        }
        let new_col = self.ncols();
        for row in self.t.iter_mut() {
            row.push(0.0);
        }
        let mut row = vec![0.0; new_col + 1];
        for (j, &v) in coeffs.iter().enumerate() {
            row[j] = v / scale;
        }
        row[new_col] = 1.0;
        let mut tb_new = rhs / scale;
        // Eliminate all basic columns from the new row.
        for i in 0..self.nrows() {
            let b = self.basis[i];
            let alpha = row[b];
            if alpha != 0.0 {
                for (rv, &tv) in row.iter_mut().zip(self.t[i].iter()) {
                    *rv -= alpha * tv;
                }
                tb_new -= alpha * self.tb[i];
            }
        }
        let (slo, shi) = match sense {
            Sense::Le => (0.0, f64::INFINITY),
            Sense::Eq => (0.0, 0.0),
            Sense::Ge => (f64::NEG_INFINITY, 0.0),
        };
        self.lo.push(slo);
        self.hi.push(shi);
        self.cost.push(0.0);
        self.d.push(0.0);
        self.barred.push(false);
        self.state.push(VarState::Basic);
        self.row_scale.push(scale);
        // Basic value of the new logical.
        let mut beta_new = tb_new;
        for j in 0..new_col {
            if self.state[j] != VarState::Basic {
                let v = self.nonbasic_value(j);
                if v != 0.0 {
                    beta_new -= row[j] * v;
                }
            }
        }
        self.t.push(row);
        self.tb.push(tb_new);
        self.basis.push(new_col);
        self.beta.push(beta_new);
    }

    fn extract_duals(&self) -> Vec<f64> {
        let mut duals = vec![0.0; self.nrows()];
        for (r, dual) in duals.iter_mut().enumerate() {
            let logical = self.n_struct + r;
            *dual = -self.d[logical] / self.row_scale[r];
        }
        duals
    }

    /// Packages the current basic solution as a [`SolveOutcome`].
    pub fn outcome(&self, status: SolveStatus) -> SolveOutcome {
        let mut out = SolveOutcome::new(status);
        match status {
            SolveStatus::Optimal => {
                let mut primal = vec![0.0; self.n_struct];
                for (j, p) in primal.iter_mut().enumerate() {
                    if self.state[j] != VarState::Basic {
                        *p = self.nonbasic_value(j);
                    }
                }
                for (r, &b) in self.basis.iter().enumerate() {
                    if b < self.n_struct {
                        primal[b] = self.beta[r];
                    }
                }
                out.primal = primal;
                out.duals = self.extract_duals();
                out.objective = self.z;
                out.bound = self.z;
            }
            SolveStatus::Infeasible => {
                out.farkas = self.farkas.clone();
                out.infeasibility = self.infeasibility;
            }
            _ => {}
        }
        out
    }

    /// Re-derives basic values and reduced costs from first principles;
    /// useful after long pivot sequences.
    pub fn refresh(&mut self) {
        self.refresh_beta();
        let cost = self.cost.clone();
        self.refresh_costs(&cost);
    }

    pub fn objective_value(&self) -> f64 {
        self.z
    }

    /// Clears the pivot counter so warm re-solves get a fresh budget.
    pub fn reset_pivots(&mut self) {
        self.pivots = 0;
    }

    /// Debug check: the current point must satisfy the original (scaled)
    /// row equations `a'x + s = b`. Returns the worst residual.
    pub fn equation_residual(&self, lp: &LinearProgram) -> f64 {
        let n = self.n_struct;
        let mut full = vec![0.0; self.ncols()];
        for j in 0..self.ncols() {
            if self.state[j] != VarState::Basic {
                full[j] = self.nonbasic_value(j);
            }
        }
        for (r, &b) in self.basis.iter().enumerate() {
            full[b] = self.beta[r];
        }
        let mut worst = 0.0f64;
        for r in 0..lp.num_rows() {
            let mut acc = 0.0;
            for j in 0..n {
                acc += lp.rows[r][j] / self.row_scale[r] * full[j];
            }
            acc += full[n + r];
            worst = worst.max((acc - lp.rhs[r] / self.row_scale[r]).abs());
        }
        worst
    }

    /// Largest primal bound violation among basic variables.
    pub fn primal_infeasibility(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.nrows() {
            let b = self.basis[r];
            worst = worst.max(self.lo[b] - self.beta[r]);
            worst = worst.max(self.beta[r] - self.hi[b]);
        }
        worst
    }
}

enum RatioOutcome {
    Pivot(usize, f64, VarState),
    BoundFlip(f64),
    Unbounded,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{LinearProgram, Sense};

    // Regression: negative phase-one residuals once produced an artificial
    // column of -e_r, breaking the basic-column identity and stalling
    // phase one on a feasible instance.
    #[test]
    fn phase_one_handles_negative_residuals() {
        let mut lp = LinearProgram::new(4);
        lp.objective = vec![
            2.2746643077517117,
            2.612559017478774,
            2.284270634171344,
            -0.8952846974958968,
        ];
        lp.lower = vec![
            -1.5870577790568157,
            -3.4495488586394316,
            -2.400365205524732,
            -4.935216385623228,
        ];
        lp.upper = vec![
            4.237747327790244,
            0.9037063489839374,
            3.1307655132241687,
            0.9899627736924175,
        ];
        lp.add_row(
            vec![
                -1.2414710185953508,
                -0.276717958981024,
                0.40911429343302697,
                1.5527817919561526,
            ],
            Sense::Eq,
            -3.4064674242438966,
        );
        lp.add_row(
            vec![
                1.0526537968412786,
                0.0720306254050973,
                1.0053206801281203,
                1.6559074623941168,
            ],
            Sense::Ge,
            -3.2268024432220197,
        );
        lp.add_row(
            vec![
                0.8296777866483902,
                0.25703106402430453,
                0.6451524092605041,
                -0.36050286453857705,
            ],
            Sense::Ge,
            0.15375315287240454,
        );
        let mut tab = Tableau::new(&lp, SimplexOptions::default());
        let status = tab.solve_primal();
        assert_eq!(status, SolveStatus::Optimal);
        tab.refresh();
        assert!(tab.primal_infeasibility() < 1e-9);
        assert!(tab.equation_residual(&lp) < 1e-9);
    }

    // Regression: set_bounds once read the variable's old value after the
    // bounds were overwritten, silently moving nonbasic variables without
    // compensating the basics.
    #[test]
    fn set_bounds_keeps_equations_consistent() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![-1.0, -1.0];
        lp.set_bounds(0, 0.0, 2.0);
        lp.set_bounds(1, 0.0, 2.0);
        lp.add_row(vec![1.0, 1.0], Sense::Le, 3.0);
        let mut tab = Tableau::new(&lp, SimplexOptions::default());
        assert_eq!(tab.solve_primal(), SolveStatus::Optimal);
        // Fix x0 = 2, re-optimize, then restore and check consistency.
        tab.set_bounds(0, 2.0, 2.0);
        assert_eq!(tab.dual_simplex(), SolveStatus::Optimal);
        tab.set_bounds(0, 0.0, 2.0);
        assert!(tab.equation_residual(&lp) < 1e-9);
        assert_eq!(tab.dual_simplex(), SolveStatus::Optimal);
        tab.refresh();
        assert!((tab.objective_value() + 3.0).abs() < 1e-9);
    }
}

fn initial_nonbasic_state(lo: f64, hi: f64) -> VarState {
    if lo.is_finite() {
        if hi.is_finite() && hi.abs() < lo.abs() {
            VarState::AtUpper
        } else {
            VarState::AtLower
        }
    } else if hi.is_finite() {
        VarState::AtUpper
    } else {
        VarState::FreeZero
    }
}

/// Solves a linear program with the two-phase bounded-variable simplex.
pub fn solve_lp(lp: &LinearProgram) -> Result<SolveOutcome, crate::SolverError> {
    solve_lp_with(lp, SimplexOptions::default())
}

pub fn solve_lp_with(
    lp: &LinearProgram,
    options: SimplexOptions,
) -> Result<SolveOutcome, crate::SolverError> {
    lp.validate()?;
    let mut tab = Tableau::new(lp, options);
    let status = tab.solve_primal();
    if status == SolveStatus::Optimal {
        tab.refresh();
        // Guard against drift: re-check feasibility after the refresh.
        if tab.primal_infeasibility() > 1e-7 {
            let status = tab.dual_simplex();
            return Ok(tab.outcome(status));
        }
    }
    Ok(tab.outcome(status))
}
