mod common;

use qspline::error::Error;
use qspline::lie_basis::{build_basis, AlgebraElement};
use qspline::report::build_table;
use qspline::scenario;
use qspline::solver::{control_cost, iterate_k, shoot_subinterval, solve_spline};

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

#[test]
fn first_steering_shot_converges_quickly() {
    let spec = scenario::qubit().to_spec().unwrap();
    let mut settings = spec.settings;
    settings.iterations = 1;
    let sol = iterate_k(
        spec.rho0.element().coords(),
        spec.h0.coords(),
        &spec.targets[0].rho,
        0.0,
        0.2,
        &settings,
    )
    .unwrap();
    assert_eq!(sol.newton_steps.len(), 2);
    assert!(sol.newton_steps[1] <= 8, "{:?}", sol.newton_steps);
    assert!(sol.shoot_residual < 1e-10);
}

#[test]
fn zero_iterations_give_the_free_baseline() {
    let mut file = scenario::qubit();
    file.iterations = 0;
    let spec = file.to_spec().unwrap();
    let report = solve_spline(&spec).unwrap();
    let first = &report.subintervals[0];
    // σz commutes with ρ₀, so ρ never moves
    for s in &first.trajectory.samples {
        assert!(common::max_abs_diff(&s.x, spec.rho0.element().coords()) < 1e-15);
    }
    let d = spec.rho0.element().distance(spec.targets[0].rho.element()).unwrap();
    assert!((first.endpoint_distance - d).abs() < 1e-15);
    assert_eq!(report.cost.j_cont, 0.0);
}

#[test]
fn initial_velocity_scales_with_interval_length_for_small_k() {
    let b = build_basis(2).unwrap();
    let k = AlgebraElement::new(&b, vec![0.0, 0.004, -0.007, 0.002]).unwrap();
    let x0 = [0.5, 0.0, 0.0, 0.5];
    let y0 = [0.0, 0.0, 0.0, 1.0];
    let short = shoot_subinterval(&x0, &y0, &k, 0.0, 0.2, 100, 1e-12, None).unwrap();
    let long = shoot_subinterval(&x0, &y0, &k, 0.0, 0.4, 200, 1e-12, None).unwrap();
    let ratio = norm(&long.v0) / norm(&short.v0);
    assert!((ratio - 2.0).abs() < 0.05, "ratio={ratio}");
}

#[test]
fn commuting_k_gives_exactly_linear_velocity() {
    let b = build_basis(3).unwrap();
    let k = AlgebraElement::basis_element(&b, 2).scale(3.0);
    let x0 = vec![0.0; 9];
    let shot = shoot_subinterval(&x0, &[0.0; 9], &k, 0.0, 0.5, 50, 1e-12, None).unwrap();
    assert_eq!(shot.newton_steps, 0);
    for (v, kk) in shot.v0.iter().zip(k.coords()) {
        assert!((v + kk * 0.5).abs() < 1e-15);
    }
}

#[test]
fn qubit_solve_meets_junction_conditions_and_is_deterministic() {
    let spec = scenario::qubit().to_spec().unwrap();
    let a = solve_spline(&spec).unwrap();
    let b = solve_spline(&spec).unwrap();
    for (p, q) in a.subintervals.iter().zip(&b.subintervals) {
        assert_eq!(p.trajectory.last().x, q.trajectory.last().x);
        assert_eq!(p.k_final.coords(), q.k_final.coords());
    }
    assert!(a.rho_continuity.iter().all(|&r| r == 0.0));
    assert!(a.h_continuity.iter().all(|&r| r == 0.0));
    for sub in &a.subintervals {
        assert!(norm(&sub.trajectory.last().v) <= spec.settings.tol_shoot);
        println!(
            "t={:.1} K-consistency {:.3e}  ‖ΔK‖ history tail {:?}",
            sub.t_end,
            sub.k_consistency,
            &sub.k_history[sub.k_history.len() - 3..]
        );
    }
    assert!(!a.off_orbit_warning());
}

#[test]
fn qubit_distances_decrease_after_the_second_iteration() {
    let spec = scenario::qubit().to_spec().unwrap();
    let report = solve_spline(&spec).unwrap();
    for sub in &report.subintervals {
        for w in sub.distance_history[2..].windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "t={} {:?}", sub.t_end, w);
        }
    }
}

#[test]
fn table_costs_add_up_to_the_reported_total() {
    let mut file = scenario::qubit();
    file.iterations = 5;
    let report = solve_spline(&file.to_spec().unwrap()).unwrap();
    let table = build_table(&report);
    let total = table.rows.last().unwrap().j_running;
    let eps = report.settings.epsilon;
    let sum: f64 = table
        .rows
        .iter()
        .map(|r| r.j_cont + r.distance * r.distance / (2.0 * eps))
        .sum();
    assert!((total - report.cost.j_total).abs() < 1e-12);
    assert!((sum - report.cost.j_total).abs() < 1e-12);
    for w in table.rows.windows(2) {
        assert!(w[1].t > w[0].t);
        assert!(w[1].j_running >= w[0].j_running);
    }
}

#[test]
fn control_cost_quadrature_is_converged() {
    let spec = scenario::qubit().to_spec().unwrap();
    let mut settings = spec.settings;
    settings.iterations = 1;
    let x0 = spec.rho0.element().coords();
    let y0 = spec.h0.coords();
    let sol = iterate_k(x0, y0, &spec.targets[0].rho, 0.0, 0.2, &settings).unwrap();
    let k = &sol.k_final;
    let coarse = shoot_subinterval(x0, y0, k, 0.0, 0.2, 200, 1e-12, None).unwrap();
    let fine = shoot_subinterval(x0, y0, k, 0.0, 0.2, 400, 1e-12, None).unwrap();
    let (jc, jf) = (control_cost(&coarse.trajectory), control_cost(&fine.trajectory));
    let rel = (jc - jf).abs() / jf;
    println!("J_cont 200 steps {jc:.12} / 400 steps {jf:.12}: relative change {rel:.2e}");
    assert!(rel < 1e-6);
}

#[test]
fn initial_hamiltonian_sensitivity() {
    // H(0) enters the first subinterval's flow; report how much it moves the costs.
    let b = build_basis(2).unwrap();
    for (label, h0) in [
        ("σz", vec![0.0, 0.0, 0.0, 1.0]),
        ("0", vec![0.0; 4]),
        ("σx", vec![0.0, 1.0, 0.0, 0.0]),
    ] {
        let mut spec = scenario::qubit().to_spec().unwrap();
        spec.h0 = AlgebraElement::new(&b, h0).unwrap();
        let report = solve_spline(&spec).unwrap();
        let jc: Vec<String> = report.subintervals.iter().map(|s| format!("{:.2}", s.j_cont)).collect();
        println!(
            "H0={label}: J_cont [{}], max distance {:.2e}",
            jc.join(", "),
            report.endpoint_distances().iter().fold(0.0f64, |a, &b| a.max(b))
        );
        assert!(report.endpoint_distances().iter().all(|&d| d < 1e-6));
    }
}

#[test]
fn tiny_epsilon_characterization() {
    // ε far below the stable range: record what happens, do not require success.
    let mut file = scenario::qubit();
    file.epsilon = 1e-6;
    file.iterations = 5;
    let spec = file.to_spec().unwrap();
    match solve_spline(&spec) {
        Ok(report) => {
            for sub in &report.subintervals {
                let h = &sub.distance_history;
                let monotone = h.windows(2).all(|w| w[1] <= w[0]);
                println!("t={:.1} distances {:?} monotone={monotone}", sub.t_end, h);
            }
        }
        Err(e) => {
            println!("ε=1e-6 solve failed: {e}");
            let mut inner = &e;
            while let Error::AtSubinterval { source, .. } | Error::AtIteration { source, .. } = inner {
                inner = source;
            }
            assert!(matches!(
                inner,
                Error::ShootingDivergence { .. } | Error::StageConvergence { .. }
            ));
        }
    }
}

#[test]
fn tol_k_stops_the_iteration_early() {
    let mut file = scenario::qubit();
    file.iterations = 500;
    file.tol_k = Some(1e-6);
    let spec = file.to_spec().unwrap();
    let sub = iterate_k(
        spec.rho0.element().coords(),
        spec.h0.coords(),
        &spec.targets[0].rho,
        0.0,
        0.2,
        &spec.settings,
    )
    .unwrap();
    assert!(sub.k_history.len() < 500);
    assert!(*sub.k_history.last().unwrap() < 1e-6);
}
