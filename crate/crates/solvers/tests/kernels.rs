use chpuc_solvers::{
    solve_lp, solve_milp, solve_qp, LinearProgram, MilpOptions, QuadraticProgram, Sense,
    SolveStatus,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn lp_single_lower_bound_row() {
    // min x s.t. x >= 3
    let mut lp = LinearProgram::new(1);
    lp.objective[0] = 1.0;
    lp.add_row(vec![1.0], Sense::Ge, 3.0);
    let out = solve_lp(&lp).unwrap();
    assert_eq!(out.status, SolveStatus::Optimal);
    assert!((out.primal[0] - 3.0).abs() < 1e-9);
    assert!((out.objective - 3.0).abs() < 1e-9);
    assert!((out.duals[0] - 1.0).abs() < 1e-9);
}

#[test]
fn lp_infeasible_pair() {
    // x <= 0, x >= 1
    let mut lp = LinearProgram::new(1);
    lp.add_row(vec![1.0], Sense::Le, 0.0);
    lp.add_row(vec![1.0], Sense::Ge, 1.0);
    let out = solve_lp(&lp).unwrap();
    assert_eq!(out.status, SolveStatus::Infeasible);
    assert!(out.infeasibility > 0.5);
}

#[test]
fn lp_unbounded() {
    let mut lp = LinearProgram::new(1);
    lp.objective[0] = -1.0;
    lp.add_row(vec![1.0], Sense::Ge, 0.0);
    let out = solve_lp(&lp).unwrap();
    assert_eq!(out.status, SolveStatus::Unbounded);
}

#[test]
fn lp_bounded_variables_and_equalities() {
    // min -x - 2y s.t. x + y = 4, 0 <= x <= 3, 0 <= y <= 3
    let mut lp = LinearProgram::new(2);
    lp.objective = vec![-1.0, -2.0];
    lp.set_bounds(0, 0.0, 3.0);
    lp.set_bounds(1, 0.0, 3.0);
    lp.add_row(vec![1.0, 1.0], Sense::Eq, 4.0);
    let out = solve_lp(&lp).unwrap();
    assert_eq!(out.status, SolveStatus::Optimal);
    assert!((out.primal[0] - 1.0).abs() < 1e-9);
    assert!((out.primal[1] - 3.0).abs() < 1e-9);
    assert!((out.objective + 7.0).abs() < 1e-9);
}

fn random_lp(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> (LinearProgram, Vec<f64>) {
    // Feasible by construction: pick an interior point first.
    let x0: Vec<f64> = (0..cols).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let mut lp = LinearProgram::new(cols);
    for j in 0..cols {
        lp.objective[j] = rng.gen_range(-3.0..3.0);
        lp.set_bounds(j, x0[j] - rng.gen_range(0.5..4.0), x0[j] + rng.gen_range(0.5..4.0));
    }
    for _ in 0..rows {
        let coeffs: Vec<f64> = (0..cols).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let act: f64 = coeffs.iter().zip(&x0).map(|(a, b)| a * b).sum();
        match rng.gen_range(0..3) {
            0 => lp.add_row(coeffs, Sense::Le, act + rng.gen_range(0.0..2.0)),
            1 => lp.add_row(coeffs, Sense::Ge, act - rng.gen_range(0.0..2.0)),
            _ => lp.add_row(coeffs, Sense::Eq, act),
        }
    }
    (lp, x0)
}

/// Dual objective for our bounded-variable form: b'y plus bound terms with
/// reduced costs r = c - A'y split by sign.
fn dual_objective(lp: &LinearProgram, duals: &[f64]) -> f64 {
    let n = lp.num_vars();
    let mut val: f64 = duals.iter().zip(&lp.rhs).map(|(y, b)| y * b).sum();
    for j in 0..n {
        let mut r = lp.objective[j];
        for (i, row) in lp.rows.iter().enumerate() {
            r -= duals[i] * row[j];
        }
        if r > 0.0 {
            // Positive reduced cost pushes x to its lower bound.
            val += r * lp.lower[j];
        } else {
            val += r * lp.upper[j];
        }
    }
    val
}

#[test]
fn lp_strong_duality_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut solved = 0;
    for trial in 0..100 {
        let rows = 20;
        let cols = 40;
        let (lp, _) = random_lp(&mut rng, rows, cols);
        let out = solve_lp(&lp).unwrap();
        assert_eq!(
            out.status,
            SolveStatus::Optimal,
            "trial {} should be feasible by construction",
            trial
        );
        // Primal feasibility.
        for (i, row) in lp.rows.iter().enumerate() {
            let act: f64 = row.iter().zip(&out.primal).map(|(a, x)| a * x).sum();
            match lp.senses[i] {
                Sense::Le => assert!(act <= lp.rhs[i] + 1e-7, "trial {trial} row {i}"),
                Sense::Ge => assert!(act >= lp.rhs[i] - 1e-7, "trial {trial} row {i}"),
                Sense::Eq => assert!((act - lp.rhs[i]).abs() <= 1e-7, "trial {trial} row {i}"),
            }
        }
        // Dual sign conventions.
        for (i, &y) in out.duals.iter().enumerate() {
            match lp.senses[i] {
                Sense::Le => assert!(y <= 1e-7, "trial {trial} row {i} dual {y}"),
                Sense::Ge => assert!(y >= -1e-7, "trial {trial} row {i} dual {y}"),
                Sense::Eq => {}
            }
        }
        let dual_obj = dual_objective(&lp, &out.duals);
        let gap = (out.objective - dual_obj).abs();
        assert!(
            gap <= 1e-8 * (1.0 + out.objective.abs()),
            "trial {}: primal {} dual {} gap {}",
            trial,
            out.objective,
            dual_obj,
            gap
        );
        solved += 1;
    }
    assert_eq!(solved, 100);
}

#[test]
fn qp_clipped_parabola_reports_bound_dual() {
    // min (x-5)^2 = x^2 - 10x + 25 s.t. 0 <= x <= 3  ->  x = 3, f = 4.
    let mut qp = QuadraticProgram::new(1);
    qp.add_q(0, 0, 2.0);
    qp.linear.objective[0] = -10.0;
    qp.linear.set_bounds(0, 0.0, 3.0);
    let out = solve_qp(&qp).unwrap();
    assert_eq!(out.status, SolveStatus::Optimal);
    assert!((out.primal[0] - 3.0).abs() < 1e-8);
    assert!((out.objective + 25.0 - 4.0).abs() < 1e-8);
    assert!((out.bound_duals[0] - 4.0).abs() < 1e-8);
}

#[test]
fn qp_symmetric_equality() {
    // min x^2 + y^2 s.t. x + y = 2 -> (1,1), equality dual 2.
    let mut qp = QuadraticProgram::new(2);
    qp.add_q(0, 0, 2.0);
    qp.add_q(1, 1, 2.0);
    qp.linear.add_row(vec![1.0, 1.0], Sense::Eq, 2.0);
    let out = solve_qp(&qp).unwrap();
    assert_eq!(out.status, SolveStatus::Optimal);
    assert!((out.primal[0] - 1.0).abs() < 1e-9);
    assert!((out.primal[1] - 1.0).abs() < 1e-9);
    assert!((out.duals[0] - 2.0).abs() < 1e-9);
}

#[test]
fn qp_rejects_indefinite_matrix() {
    let mut qp = QuadraticProgram::new(2);
    qp.add_q(0, 0, -1.0);
    assert!(solve_qp(&qp).is_err());
}

/// Projected gradient descent onto box bounds, run to high accuracy; an
/// independent first-order oracle for box-constrained QPs.
fn projected_gradient_box(qp: &QuadraticProgram, iters: usize) -> f64 {
    let n = qp.num_vars();
    let mut y: Vec<f64> = (0..n)
        .map(|j| {
            let lo = qp.linear.lower[j];
            let hi = qp.linear.upper[j];
            0.5 * (lo + hi)
        })
        .collect();
    // Lipschitz step from the Gershgorin bound on Q.
    let lip = qp
        .q
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0f64, f64::max)
        .max(1e-9);
    let step = 1.0 / lip;
    for _ in 0..iters {
        let mut g = qp.linear.objective.clone();
        for i in 0..n {
            for j in 0..n {
                g[i] += qp.q[i][j] * y[j];
            }
        }
        for j in 0..n {
            y[j] = (y[j] - step * g[j]).clamp(qp.linear.lower[j], qp.linear.upper[j]);
        }
    }
    qp.objective_value(&y)
}

#[test]
fn qp_random_psd_instances_match_projected_gradient_and_kkt() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..100 {
        let n = rng.gen_range(2..=10);
        // Q = R'R + small diagonal: PSD (in fact PD).
        let r: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let mut qp = QuadraticProgram::new(n);
        for i in 0..n {
            for j in 0..n {
                let mut v = 0.0;
                for (k, row) in r.iter().enumerate() {
                    let _ = k;
                    v += row[i] * row[j];
                }
                qp.q[i][j] = v;
            }
            qp.q[i][i] += 0.1;
            qp.linear.objective[i] = rng.gen_range(-2.0..2.0);
            qp.linear.set_bounds(i, rng.gen_range(-3.0..0.0), rng.gen_range(0.1..3.0));
        }
        let out = solve_qp(&qp).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal, "trial {}", trial);

        // KKT residuals: stationarity with active-bound multipliers folded
        // in, primal feasibility, complementary slackness.
        let mut g = qp.linear.objective.clone();
        for i in 0..n {
            for j in 0..n {
                g[i] += qp.q[i][j] * out.primal[j];
            }
        }
        for j in 0..n {
            let y = out.primal[j];
            let lo = qp.linear.lower[j];
            let hi = qp.linear.upper[j];
            assert!(y >= lo - 1e-8 && y <= hi + 1e-8, "trial {} feasibility", trial);
            let mu = out.bound_duals[j];
            let at_lo = (y - lo).abs() <= 1e-7;
            let at_hi = (y - hi).abs() <= 1e-7;
            if !at_lo && !at_hi {
                assert!(g[j].abs() <= 1e-8 * (1.0 + g[j].abs()), "trial {} stationarity", trial);
                assert!(mu.abs() <= 1e-8, "trial {} slackness", trial);
            } else if at_hi {
                // f + mu (y - hi): stationarity g + mu = 0 with mu >= 0.
                assert!((g[j] + mu).abs() <= 1e-7 || g[j] <= 1e-8, "trial {}", trial);
            } else {
                assert!((g[j] - mu).abs() <= 1e-7 || g[j] >= -1e-8, "trial {}", trial);
            }
        }

        let oracle = projected_gradient_box(&qp, 20000);
        assert!(
            out.objective <= oracle + 1e-6 * (1.0 + oracle.abs()),
            "trial {}: active set {} vs projected gradient {}",
            trial,
            out.objective,
            oracle
        );
        assert!(
            (out.objective - oracle).abs() <= 1e-6 * (1.0 + oracle.abs()),
            "trial {}: objective mismatch {} vs {}",
            trial,
            out.objective,
            oracle
        );
    }
}

#[test]
fn milp_lattice_example() {
    // max 5x + 4y s.t. 6x + 4y <= 24, x + 2y <= 6, x, y integer >= 0.
    // Exhaustive lattice enumeration fixes the expected optimum.
    let mut best = f64::NEG_INFINITY;
    let mut arg = (0, 0);
    for x in 0..=4 {
        for y in 0..=3 {
            let (xf, yf) = (x as f64, y as f64);
            if 6.0 * xf + 4.0 * yf <= 24.0 && xf + 2.0 * yf <= 6.0 {
                let v = 5.0 * xf + 4.0 * yf;
                if v > best {
                    best = v;
                    arg = (x, y);
                }
            }
        }
    }
    assert_eq!((best, arg), (20.0, (4, 0)));

    let mut lp = LinearProgram::new(2);
    lp.objective = vec![-5.0, -4.0]; // minimize the negation
    lp.set_bounds(0, 0.0, 10.0);
    lp.set_bounds(1, 0.0, 10.0);
    lp.add_row(vec![6.0, 4.0], Sense::Le, 24.0);
    lp.add_row(vec![1.0, 2.0], Sense::Le, 6.0);
    let out = solve_milp(&lp, &[0, 1], &MilpOptions::default()).unwrap();
    assert_eq!(out.status, SolveStatus::Optimal);
    assert!((out.objective + best).abs() < 1e-9);
    assert!((out.primal[0] - 4.0).abs() < 1e-6);
    assert!(out.primal[1].abs() < 1e-6);
}

#[test]
fn milp_all_continuous_degenerates_to_lp() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (lp, _) = random_lp(&mut rng, 8, 12);
    let lp_out = solve_lp(&lp).unwrap();
    let milp_out = solve_milp(&lp, &[], &MilpOptions::default()).unwrap();
    assert_eq!(lp_out.status, SolveStatus::Optimal);
    assert_eq!(milp_out.status, SolveStatus::Optimal);
    assert!((lp_out.objective - milp_out.objective).abs() <= 1e-9);
}

#[test]
fn milp_binary_knapsack_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for trial in 0..5 {
        let n = 12;
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..9.0)).collect();
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..9.0)).collect();
        let cap: f64 = weights.iter().sum::<f64>() * 0.45;

        let mut best = 0.0f64;
        for mask in 0u32..(1 << n) {
            let mut w = 0.0;
            let mut v = 0.0;
            for j in 0..n {
                if mask & (1 << j) != 0 {
                    w += weights[j];
                    v += values[j];
                }
            }
            if w <= cap && v > best {
                best = v;
            }
        }

        let mut lp = LinearProgram::new(n);
        for j in 0..n {
            lp.objective[j] = -values[j];
            lp.set_bounds(j, 0.0, 1.0);
        }
        lp.add_row(weights.clone(), Sense::Le, cap);
        let ints: Vec<usize> = (0..n).collect();
        let out = solve_milp(&lp, &ints, &MilpOptions::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal, "trial {}", trial);
        assert!(
            (-out.objective - best).abs() < 1e-6,
            "trial {}: milp {} enumeration {}",
            trial,
            -out.objective,
            best
        );
    }
}

#[test]
fn milp_random_instances_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..30 {
        let n_int = rng.gen_range(2..=14usize);
        let n_cont = rng.gen_range(0..=2usize);
        let n = n_int + n_cont;
        let rows = rng.gen_range(1..=4usize);
        let mut lp = LinearProgram::new(n);
        for j in 0..n_int {
            lp.objective[j] = rng.gen_range(-5.0..5.0);
            lp.set_bounds(j, 0.0, rng.gen_range(1.0f64..3.0).floor());
        }
        for j in n_int..n {
            lp.objective[j] = rng.gen_range(-2.0..2.0);
            lp.set_bounds(j, 0.0, 4.0);
        }
        for _ in 0..rows {
            let coeffs: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..3.0)).collect();
            let slackish: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c.max(0.0) * lp.upper[j])
                .sum();
            lp.add_row(coeffs, Sense::Le, slackish * rng.gen_range(0.3..0.9));
        }

        // Exhaustive enumeration over the integer lattice, solving the
        // continuous remainder by LP.
        let mut best = f64::INFINITY;
        let dims: Vec<usize> = (0..n_int).map(|j| lp.upper[j] as usize + 1).collect();
        let total: usize = dims.iter().product();
        for code in 0..total {
            let mut c = code;
            let mut assign = vec![0.0; n_int];
            for j in 0..n_int {
                assign[j] = (c % dims[j]) as f64;
                c /= dims[j];
            }
            let mut sub = lp.clone();
            for j in 0..n_int {
                sub.set_bounds(j, assign[j], assign[j]);
            }
            let out = solve_lp(&sub).unwrap();
            if out.status == SolveStatus::Optimal && out.objective < best {
                best = out.objective;
            }
        }

        let ints: Vec<usize> = (0..n_int).collect();
        let out = solve_milp(&lp, &ints, &MilpOptions::default()).unwrap();
        if best.is_finite() {
            assert_eq!(out.status, SolveStatus::Optimal, "trial {}", trial);
            assert!(
                (out.objective - best).abs() <= 1e-6 * (1.0 + best.abs()),
                "trial {}: milp {} enumeration {}",
                trial,
                out.objective,
                best
            );
            // Bound sanity: incumbent never beats the root relaxation.
            let relax = solve_lp(&lp).unwrap();
            assert!(out.objective >= relax.objective - 1e-7, "trial {}", trial);
        } else {
            assert_eq!(out.status, SolveStatus::Infeasible, "trial {}", trial);
        }
    }
}

#[test]
fn determinism_identical_inputs_identical_outputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    let (lp, _) = random_lp(&mut rng, 15, 25);
    let a = solve_lp(&lp).unwrap();
    let b = solve_lp(&lp).unwrap();
    assert_eq!(a.status, b.status);
    assert_eq!(a.objective.to_bits(), b.objective.to_bits());
    for (x, y) in a.primal.iter().zip(&b.primal) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
    for (x, y) in a.duals.iter().zip(&b.duals) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
}
