use crate::problem::{LinearProgram, SolveOutcome, SolveStatus, SolverError};
use crate::simplex::{SimplexOptions, Tableau};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone)]
pub struct MilpOptions {
    /// Node cap; hitting it returns the best incumbent with its gap.
    pub max_nodes: usize,
    pub integrality_tol: f64,
    /// Absolute optimality gap at which a node is fathomed.
    pub gap_abs: f64,
    /// Relative optimality gap (on |incumbent|).
    pub gap_rel: f64,
    /// Warm integer assignment to seed the incumbent.
    pub incumbent_hint: Option<Vec<f64>>,
    pub simplex: SimplexOptions,
}

impl Default for MilpOptions {
    fn default() -> Self {
        MilpOptions {
            max_nodes: 1_000_000,
            integrality_tol: 1e-6,
            gap_abs: 0.0,
            gap_rel: 0.0,
            incumbent_hint: None,
            simplex: SimplexOptions::default(),
        }
    }
}

struct Node {
    /// (variable, lower, upper) overrides accumulated from the root.
    changes: Vec<(usize, f64, f64)>,
}

struct HeapEntry {
    bound: f64,
    id: usize,
    index: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.id == other.id
    }
}
impl Eq for HeapEntry {}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; invert so the lowest bound pops first,
        // ties broken by the lowest node id.
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Solves a mixed-integer linear program by best-first branch and bound.
///
/// Branching picks the most-fractional integer variable (lowest index on
/// ties); node selection is best-bound with lowest-id tie-breaking, so runs
/// are deterministic. Node LPs are re-solved warm with the dual simplex on
/// a single shared tableau.
pub fn solve_milp(
    lp: &LinearProgram,
    integer_vars: &[usize],
    options: &MilpOptions,
) -> Result<SolveOutcome, SolverError> {
    lp.validate()?;
    let mut integer_vars: Vec<usize> = integer_vars.to_vec();
    integer_vars.sort_unstable();
    integer_vars.dedup();
    let integer_vars = &integer_vars[..];
    for &j in integer_vars {
        if !lp.lower[j].is_finite() || !lp.upper[j].is_finite() {
            return Err(SolverError::UnboundedInteger(j));
        }
    }

    let mut work = Tableau::new(lp, options.simplex.clone());
    let root_status = work.solve_primal();
    match root_status {
        SolveStatus::Infeasible | SolveStatus::Unbounded | SolveStatus::IterationLimit => {
            return Ok(work.outcome(root_status));
        }
        SolveStatus::Optimal => {}
    }
    work.refresh();
    let root_outcome = work.outcome(SolveStatus::Optimal);
    let root_bound = root_outcome.objective;

    let mut incumbent: Option<SolveOutcome> = None;

    // Seed the incumbent from the caller's hint, if any.
    if let Some(hint) = &options.incumbent_hint {
        let changes: Vec<(usize, f64, f64)> = integer_vars
            .iter()
            .map(|&j| {
                let v = hint[j].round();
                (j, v, v)
            })
            .collect();
        if let Some(out) = solve_node(&mut work, lp, &changes, &options.simplex) {
            if is_integral(&out.primal, integer_vars, options.integrality_tol) {
                incumbent = Some(out);
            }
        }
    }

    let mut heap = BinaryHeap::new();
    let mut nodes: Vec<Node> = Vec::new();
    nodes.push(Node {
        changes: Vec::new(),
    });
    heap.push(HeapEntry {
        bound: root_bound,
        id: 0,
        index: 0,
    });
    let mut next_id = 1usize;
    let mut explored = 0usize;
    // Lowest bound among nodes left unexplored; infinite once the tree is
    // proven (drained or fathomed by the incumbent).
    let mut open_bound = f64::INFINITY;

    let cutoff = |inc: &Option<SolveOutcome>, opt: &MilpOptions| -> f64 {
        match inc {
            Some(s) => {
                s.objective - opt.gap_abs.max(opt.gap_rel * s.objective.abs()).max(1e-9)
            }
            None => f64::INFINITY,
        }
    };

    while let Some(entry) = heap.pop() {
        if entry.bound >= cutoff(&incumbent, options) {
            // Best-first order means every remaining node is fathomed too.
            break;
        }
        if explored >= options.max_nodes {
            open_bound = entry.bound;
            break;
        }
        explored += 1;
        let changes = std::mem::take(&mut nodes[entry.index].changes);

        let out = match solve_node(&mut work, lp, &changes, &options.simplex) {
            None => continue, // infeasible node
            Some(o) => o,
        };
        let bound = out.objective;
        if bound >= cutoff(&incumbent, options) {
            continue;
        }
        match most_fractional(&out.primal, integer_vars, options.integrality_tol) {
            None => {
                // Integral: candidate incumbent.
                let better = incumbent
                    .as_ref()
                    .map_or(true, |cur| bound < cur.objective - 1e-12);
                if better {
                    incumbent = Some(out);
                }
            }
            Some(j) => {
                // Dive heuristic at the root: round-and-fix for an early
                // incumbent before the tree grows.
                if explored == 1 && incumbent.is_none() {
                    let dive: Vec<(usize, f64, f64)> = integer_vars
                        .iter()
                        .map(|&v| {
                            let r = out.primal[v].round();
                            let r = r.clamp(lp.lower[v], lp.upper[v]);
                            (v, r, r)
                        })
                        .collect();
                    if let Some(dout) = solve_node(&mut work, lp, &dive, &options.simplex) {
                        if is_integral(&dout.primal, integer_vars, options.integrality_tol) {
                            incumbent = Some(dout);
                        }
                    }
                }
                let x = out.primal[j];
                let down = x.floor();
                for (lo_override, hi_override) in
                    [(None, Some(down)), (Some(down + 1.0), None)]
                {
                    let mut child = changes.clone();
                    apply_change(&mut child, j, lo_override, hi_override, lp);
                    let id = next_id;
                    next_id += 1;
                    let index = nodes.len();
                    nodes.push(Node { changes: child });
                    heap.push(HeapEntry { bound, id, index });
                }
            }
        }
    }

    match incumbent {
        Some(mut best) => {
            let proven = !open_bound.is_finite()
                || open_bound >= cutoff(&Some(best.clone()), options);
            let gap = if proven {
                0.0
            } else {
                (best.objective - open_bound).max(0.0) / best.objective.abs().max(1.0)
            };
            best.gap = gap;
            best.bound = if proven {
                best.objective
            } else {
                open_bound.min(best.objective)
            };
            best.status = if proven {
                SolveStatus::Optimal
            } else {
                SolveStatus::IterationLimit
            };
            Ok(best)
        }
        None => {
            if explored >= options.max_nodes {
                Ok(SolveOutcome::new(SolveStatus::IterationLimit))
            } else {
                Ok(SolveOutcome::new(SolveStatus::Infeasible))
            }
        }
    }
}

/// Re-solves the shared tableau with a node's bound overrides applied to
/// every integer variable (others restored to root bounds).
fn solve_node(
    work: &mut Tableau,
    lp: &LinearProgram,
    changes: &[(usize, f64, f64)],
    simplex: &SimplexOptions,
) -> Option<SolveOutcome> {
    let mut touched: Vec<(usize, f64, f64)> = changes.to_vec();
    touched.sort_by_key(|&(j, _, _)| j);
    // Restore root bounds everywhere first, then apply overrides. Restoring
    // only variables that differ keeps this cheap.
    for j in 0..lp.num_vars() {
        work.set_bounds(j, lp.lower[j], lp.upper[j]);
    }
    for &(j, lo, hi) in &touched {
        if lo > hi {
            return None;
        }
        work.set_bounds(j, lo, hi);
    }
    work.reset_pivots();
    match work.dual_simplex() {
        SolveStatus::Optimal => {
            work.refresh();
            if work.primal_infeasibility() > 1e-7 {
                let status = work.dual_simplex();
                if status != SolveStatus::Optimal {
                    return None;
                }
            }
            Some(work.outcome(SolveStatus::Optimal))
        }
        SolveStatus::Infeasible => None,
        _ => {
            // Cold restart as a fallback for a stalled warm solve.
            let mut lp2 = lp.clone();
            for &(j, lo, hi) in &touched {
                lp2.set_bounds(j, lo, hi);
            }
            let mut fresh = Tableau::new(&lp2, simplex.clone());
            let status = fresh.solve_primal();
            if status == SolveStatus::Optimal {
                fresh.refresh();
                *work = fresh;
                Some(work.outcome(SolveStatus::Optimal))
            } else {
                None
            }
        }
    }
}

fn apply_change(
    changes: &mut Vec<(usize, f64, f64)>,
    var: usize,
    lo_override: Option<f64>,
    hi_override: Option<f64>,
    lp: &LinearProgram,
) {
    let existing = changes.iter_mut().find(|(j, _, _)| *j == var);
    match existing {
        Some((_, lo, hi)) => {
            if let Some(l) = lo_override {
                *lo = lo.max(l);
            }
            if let Some(h) = hi_override {
                *hi = hi.min(h);
            }
        }
        None => {
            let lo = lo_override.unwrap_or(lp.lower[var]);
            let hi = hi_override.unwrap_or(lp.upper[var]);
            changes.push((var, lo, hi));
        }
    }
}

fn is_integral(primal: &[f64], integer_vars: &[usize], tol: f64) -> bool {
    integer_vars
        .iter()
        .all(|&j| (primal[j] - primal[j].round()).abs() <= tol)
}

/// Index of the most fractional integer variable, lowest index on ties.
fn most_fractional(primal: &[f64], integer_vars: &[usize], tol: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &j in integer_vars {
        let frac = primal[j] - primal[j].floor();
        let dist = frac.min(1.0 - frac);
        if dist <= tol {
            continue;
        }
        match best {
            Some((_, bd)) if dist <= bd + 1e-15 => {}
            _ => best = Some((j, dist)),
        }
    }
    best.map(|(j, _)| j)
}
