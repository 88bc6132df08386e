//! Acceptance criteria, one test each. Every test prints a single
//! `criterion N: PASS|FAIL ...` line before asserting.

mod common;

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use common::*;
use qspline::dynamics::PhaseState;
use qspline::lie_basis::{build_basis, AlgebraElement};
use qspline::scenario::{self, Scenario};
use qspline::solver::{first_integral_residual, iterate_k, solve_spline, SplineReport};
use qspline::state::{coords_purity, orbit_distance};
use qspline_oracle::{bracket, reference_integrate, OracleConfig};

struct Solved {
    report: SplineReport,
    elapsed: Duration,
}

fn solve(sc: Scenario, iterations: Option<usize>) -> Solved {
    let mut file = sc.problem();
    if let Some(i) = iterations {
        file.iterations = i;
    }
    let spec = file.to_spec().unwrap();
    let start = Instant::now();
    let report = solve_spline(&spec).unwrap();
    Solved {
        report,
        elapsed: start.elapsed(),
    }
}

fn qubit_coarse() -> &'static Solved {
    static CELL: OnceLock<Solved> = OnceLock::new();
    CELL.get_or_init(|| solve(Scenario::Qubit, Some(5)))
}

fn qubit_converged() -> &'static Solved {
    static CELL: OnceLock<Solved> = OnceLock::new();
    CELL.get_or_init(|| solve(Scenario::Qubit, Some(50)))
}

fn qutrit() -> &'static Solved {
    static CELL: OnceLock<Solved> = OnceLock::new();
    CELL.get_or_init(|| solve(Scenario::Qutrit, None))
}

fn off_orbit() -> &'static Solved {
    static CELL: OnceLock<Solved> = OnceLock::new();
    CELL.get_or_init(|| solve(Scenario::QutritOffOrbit, None))
}

fn all_solves() -> [(&'static str, &'static Solved); 4] {
    [
        ("qubit/5", qubit_coarse()),
        ("qubit/50", qubit_converged()),
        ("qutrit", qutrit()),
        ("qutrit-off-orbit", off_orbit()),
    ]
}

fn verdict(criterion: u32, pass: bool, detail: &str) {
    println!("criterion {criterion}: {} {detail}", if pass { "PASS" } else { "FAIL" });
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|d| format!("{d:.2e}")).collect::<Vec<_>>().join(", ")
}

#[test]
fn criterion_1_qubit_coarse_steering() {
    let s = qubit_coarse();
    let d = s.report.endpoint_distances();
    let pass = d.iter().all(|&x| (0.003..=0.06).contains(&x)) && s.elapsed < Duration::from_secs(30);
    verdict(
        1,
        pass,
        &format!("distances [{}] in [0.003, 0.06], {:.2?}", fmt_list(&d), s.elapsed),
    );
    assert!(pass);
}

#[test]
fn criterion_2_qubit_converged_steering() {
    let coarse = qubit_coarse().report.endpoint_distances();
    let s = qubit_converged();
    let d = s.report.endpoint_distances();
    let pass = d.iter().all(|&x| x < 1e-6)
        && d.iter().zip(&coarse).all(|(a, b)| a <= b)
        && s.elapsed < Duration::from_secs(180);
    verdict(
        2,
        pass,
        &format!(
            "distances [{}] < 1e-6 and below the 5-iteration values, {:.2?}",
            fmt_list(&d),
            s.elapsed
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_3_qutrit_same_orbit() {
    let s = qutrit();
    let d = s.report.endpoint_distances();
    let tight = d.iter().filter(|&&x| x <= 1e-5).count();
    let pass = d.iter().all(|&x| x <= 5e-3) && tight >= 4 && s.elapsed < Duration::from_secs(600);
    verdict(
        3,
        pass,
        &format!("distances [{}], {tight}/6 <= 1e-5, {:.2?}", fmt_list(&d), s.elapsed),
    );
    assert!(pass);
}

#[test]
fn criterion_4_off_orbit_floor() {
    let s = off_orbit();
    let r = &s.report;
    let d = r.endpoint_distances();
    let mut pass = d.iter().all(|&x| (x - 1e-3).abs() <= 1e-4);
    let mut floors = Vec::new();
    for (sub, target) in r.subintervals.iter().zip(&r.targets) {
        let floor = orbit_distance(&r.rho0, &target.rho).unwrap();
        floors.push(floor);
        pass &= sub.distance_history.iter().all(|&h| h >= floor - 1e-9);
    }
    pass &= r.off_orbit_warning();
    verdict(
        4,
        pass,
        &format!(
            "distances [{}], orbit floors [{}], {:.2?}",
            fmt_list(&d),
            fmt_list(&floors),
            s.elapsed
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_5_conservation() {
    let mut pass = true;
    let mut details = Vec::new();
    for (name, s) in all_solves() {
        let r = &s.report;
        let b = &r.basis;
        let x0 = r.rho0.element().coords();
        let id = b.identity_index();
        let spectrum0 = sorted_spectrum(b, x0);
        let (mut purity, mut spectrum, mut identity, mut first_integral) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for sub in &r.subintervals {
            for p in &sub.trajectory.samples {
                purity = purity.max((coords_purity(&p.x) - coords_purity(x0)).abs());
                spectrum = spectrum.max(max_abs_diff(&sorted_spectrum(b, &p.x), &spectrum0));
                identity = identity.max((p.x[id] - x0[id]).abs());
            }
            first_integral = first_integral.max(first_integral_residual(&sub.trajectory));
        }
        let ok = purity < 1e-10 && spectrum < 1e-9 && identity < 1e-14 && first_integral < 1e-7;
        pass &= ok;
        details.push(format!(
            "{name}: purity {purity:.1e}, spectrum {spectrum:.1e}, identity {identity:.1e}, first integral {first_integral:.1e}"
        ));
    }
    verdict(5, pass, &details.join("; "));
    assert!(pass);
}

#[test]
fn criterion_6_interpolation_conditions() {
    let mut pass = true;
    let mut details = Vec::new();
    for (name, s) in all_solves() {
        let r = &s.report;
        let worst_v = r
            .subintervals
            .iter()
            .map(|sub| sub.trajectory.last().v.iter().map(|a| a * a).sum::<f64>().sqrt())
            .fold(0.0f64, f64::max);
        let h_jump = r.h_continuity.iter().fold(0.0f64, |a, &b| a.max(b));
        let rho_jump = r.rho_continuity.iter().fold(0.0f64, |a, &b| a.max(b));
        pass &= worst_v <= 1e-10 && h_jump == 0.0 && rho_jump == 0.0;
        details.push(format!(
            "{name}: max |dH/dt(t_j-)| {worst_v:.1e}, H jump {h_jump:e}, rho jump {rho_jump:e}"
        ));
    }
    verdict(6, pass, &details.join("; "));
    assert!(pass);
}

/// Endpoint error against the reference integrator for each step count.
fn errors_vs_reference(s0: &PhaseState, k: &AlgebraElement, span: f64, steps: &[usize]) -> Vec<f64> {
    let b = k.basis().clone();
    let reference = reference_integrate(
        &phase_to_matrices(&b, s0),
        &k.matrix(),
        span,
        OracleConfig::default().step,
    );
    steps
        .iter()
        .map(|&m| {
            let end = qspline::dynamics::integrate_endpoint(&b, s0, k.coords(), s0.t + span, m).unwrap();
            phase_error(&b, &end, &reference)
        })
        .collect()
}

#[test]
fn criterion_7_integrator_order() {
    // Instance 1: first qubit subinterval after one K update.
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
    let mut instances = vec![(
        "qubit first subinterval",
        sol.trajectory.first().clone(),
        sol.k_final.clone(),
        0.2,
        [10, 20],
    )];
    // Instances 2 and 3: random qubit and qutrit problems.
    let mut rng = OracleConfig {
        seed: 77,
        ..Default::default()
    }
    .rng();
    for n in [2, 3] {
        let b = build_basis(n).unwrap();
        let rho = random_state(&b, &mut rng);
        let s0 = PhaseState::new(
            0.0,
            rho.element().coords().to_vec(),
            random_with_norm(b.dim(), 2.0, &mut rng),
            random_with_norm(b.dim(), 3.0, &mut rng),
        );
        let k = AlgebraElement::new(&b, random_with_norm(b.dim(), 8.0, &mut rng)).unwrap();
        instances.push((if n == 2 { "random n=2" } else { "random n=3" }, s0, k, 0.5, [25, 50]));
    }
    let mut pass = true;
    let mut details = Vec::new();
    for (name, s0, k, span, steps) in instances {
        let e = errors_vs_reference(&s0, &k, span, &steps);
        let ratio = e[0] / e[1];
        pass &= (ratio - 16.0).abs() <= 4.0;
        details.push(format!("{name}: {:.2e} -> {:.2e} (x{ratio:.2})", e[0], e[1]));
    }
    verdict(7, pass, &details.join("; "));
    assert!(pass);
}

#[test]
fn criterion_8_algebra() {
    let s3 = 3f64.sqrt();
    let b2 = build_basis(2).unwrap();
    let b3 = build_basis(3).unwrap();
    // (l, r, s) 1-based with the listed value
    let qubit_listed = [(4, 2, 3, 2.0), (3, 4, 2, 2.0), (2, 3, 4, 2.0)];
    let qutrit_listed = [
        (3, 1, 2, 2.0),
        (8, 4, 5, s3),
        (8, 6, 7, s3),
        (7, 1, 4, 1.0),
        (6, 1, 5, -1.0),
        (6, 2, 4, 1.0),
        (7, 2, 5, 1.0),
        (5, 3, 4, 1.0),
        (7, 6, 3, 1.0),
    ];
    let mut listed_ok = true;
    for (b, listed) in [(&b2, &qubit_listed[..]), (&b3, &qutrit_listed[..])] {
        for &(l, r, s, v) in listed {
            let got = b.structure_constant(l - 1, r - 1, s - 1);
            listed_ok &= got == v && b.structure_constant(l - 1, s - 1, r - 1) == -v;
        }
    }

    let mut rng = OracleConfig {
        seed: 88,
        ..Default::default()
    }
    .rng();
    let mut jacobi = 0.0f64;
    let mut agreement = 0.0f64;
    for n in [2, 3, 4] {
        let b = build_basis(n).unwrap();
        for _ in 0..200 {
            let [x, y, z] = [0; 3].map(|_| random_coords(b.dim(), 1.0, &mut rng));
            let br = |p: &[f64], q: &[f64]| b.bracket_coords(p, q);
            let j1 = br(&x, &br(&y, &z));
            let j2 = br(&y, &br(&z, &x));
            let j3 = br(&z, &br(&x, &y));
            let res = j1
                .iter()
                .zip(&j2)
                .zip(&j3)
                .map(|((a, c), e)| (a + c + e).powi(2))
                .sum::<f64>()
                .sqrt();
            jacobi = jacobi.max(res);
            let reference = to_coords(&b, &bracket(&to_matrix(&b, &x), &to_matrix(&b, &y)));
            agreement = agreement.max(max_abs_diff(&br(&x, &y), &reference));
        }
    }
    let pass = listed_ok && jacobi < 1e-10 && agreement < 1e-12;
    verdict(
        8,
        pass,
        &format!("listed constants exact: {listed_ok}, Jacobi {jacobi:.1e}, bracket vs matrices {agreement:.1e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_9_cost_table_diagnostic() {
    const PUBLISHED: [f64; 5] = [57.82, 85.07, 46.12, 47.55, 60.80];
    let r = &qubit_converged().report;
    let mut within = 0;
    let parts: Vec<String> = r
        .subintervals
        .iter()
        .zip(PUBLISHED)
        .map(|(sub, p)| {
            let ok = (sub.j_cont - p).abs() <= 0.5 * p;
            within += usize::from(ok);
            format!("{:.2} vs {p:.2}{}", sub.j_cont, if ok { "" } else { " (outside ±50%)" })
        })
        .collect();
    // Reported only; never gates.
    println!(
        "criterion 9: DIAGNOSTIC J_cont [{}], {within}/5 within ±50%",
        parts.join(", ")
    );
}

#[test]
fn qutrit_steering_is_monotone_after_second_iteration() {
    let r = &qutrit().report;
    for sub in &r.subintervals {
        for w in sub.distance_history[2.min(sub.distance_history.len())..].windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "t={:.4}: {:e} -> {:e}", sub.t_end, w[0], w[1]);
        }
    }
}
