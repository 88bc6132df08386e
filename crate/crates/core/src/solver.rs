//! Shooting solve of each subinterval and the accumulated-K steering iteration.
//!
//! On every subinterval `[t_{j-1}, t_j]` the Hamiltonian obeys
//! `d²H/dt² = K_j + [H, dH/dt]` with the terminal condition `dH/dt(t_j⁻) = 0`.
//! For fixed `K_j` the free initial velocity is found by Newton shooting; `K_j`
//! itself is refined by
//!
//! ```text
//! K⁰ = 0,    K^{i+1} = K^i + (1/ε) [ρ_j, ρ^i(t_j)]
//! ```
//!
//! Subintervals are solved in order, each starting from the final ρ and H of
//! the previous one.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{integrate_endpoint, integrate_subinterval, PhaseState, Trajectory};
use crate::error::{Error, Result};
use crate::lie_basis::{AlgebraElement, LieBasis};
use crate::state::{orbit_distance, DensityState, SAME_ORBIT_THRESHOLD};

pub const DEFAULT_STEPS: usize = 200;
pub const DEFAULT_TOL_SHOOT: f64 = 1e-10;
pub const DEFAULT_TOL_K: f64 = 1e-12;

/// Newton iteration cap for one shooting solve.
pub const MAX_NEWTON: usize = 25;
/// Step halvings tried before a Newton update is declared stuck.
pub const MAX_HALVINGS: usize = 6;
/// Relative forward-difference perturbation for the shooting Jacobian.
pub const FD_PERTURBATION: f64 = 1e-7;

/// A target state at a given time.
#[derive(Debug, Clone)]
pub struct Target {
    pub t: f64,
    pub rho: DensityState,
}

/// Numerical settings shared by every subinterval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub epsilon: f64,
    pub iterations: usize,
    pub steps: usize,
    pub tol_shoot: f64,
    pub tol_k: f64,
}

impl SolverSettings {
    pub fn new(epsilon: f64, iterations: usize) -> Self {
        Self {
            epsilon,
            iterations,
            steps: DEFAULT_STEPS,
            tol_shoot: DEFAULT_TOL_SHOOT,
            tol_k: DEFAULT_TOL_K,
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidProblem("steps must be at least 1".into()));
        }
        if !(self.tol_shoot > 0.0) {
            return Err(Error::InvalidProblem(format!(
                "tol_shoot must be positive, got {}",
                self.tol_shoot
            )));
        }
        if self.tol_k < 0.0 || self.tol_k.is_nan() {
            return Err(Error::InvalidProblem(format!(
                "tol_k must be non-negative, got {}",
                self.tol_k
            )));
        }
        Ok(())
    }
}

/// A complete interpolation problem.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub basis: Arc<LieBasis>,
    pub rho0: DensityState,
    pub h0: AlgebraElement,
    pub targets: Vec<Target>,
    pub settings: SolverSettings,
}

impl ProblemSpec {
    pub fn n(&self) -> usize {
        self.basis.n()
    }

    /// Checks the structural preconditions of a solve.
    pub fn check(&self) -> Result<()> {
        self.settings.check()?;
        if self.targets.is_empty() {
            return Err(Error::InvalidProblem("at least one target is required".into()));
        }
        let n = self.n();
        if self.rho0.n() != n || self.h0.basis().n() != n {
            return Err(Error::InvalidProblem(
                "rho0 and H0 must live on the problem basis".into(),
            ));
        }
        let mut previous = 0.0;
        for (i, target) in self.targets.iter().enumerate() {
            if target.rho.n() != n {
                return Err(Error::InvalidProblem(format!(
                    "target {i} has n={}, expected {n}",
                    target.rho.n()
                )));
            }
            if !(target.t > previous) || !target.t.is_finite() {
                return Err(Error::InvalidProblem(format!(
                    "target {i}: time {} must exceed the previous time {previous}",
                    target.t
                )));
            }
            previous = target.t;
        }
        Ok(())
    }
}

/// Outcome of a single shooting solve.
#[derive(Debug, Clone)]
pub struct ShotResult {
    pub v0: Vec<f64>,
    pub trajectory: Trajectory,
    pub newton_steps: usize,
    /// `‖dH/dt(t_end)‖` of the returned trajectory.
    pub residual: f64,
}

/// Solution on one subinterval after the K iteration.
#[derive(Debug, Clone)]
pub struct SubintervalSolution {
    pub t_start: f64,
    pub t_end: f64,
    pub trajectory: Trajectory,
    pub k_final: AlgebraElement,
    pub endpoint_distance: f64,
    pub j_cont: f64,
    /// `‖K^{i+1} - K^i‖` for every update performed.
    pub k_history: Vec<f64>,
    /// Endpoint distance of `ρ^i(t_j)` for i = 0..=iterations actually run.
    pub distance_history: Vec<f64>,
    pub newton_steps: Vec<usize>,
    pub shoot_residual: f64,
    /// `‖K_final - (1/ε)[ρ_j, ρ(t_j)]‖`; diagnostic only.
    pub k_consistency: f64,
}

/// Orbit comparison of one target with the initial state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitCheck {
    pub target: usize,
    pub orbit_distance: f64,
    pub same_orbit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostSummary {
    pub j_total: f64,
    pub j_cont: f64,
    pub penalty: f64,
}

/// Full solve: per-subinterval solutions, costs and junction diagnostics.
#[derive(Debug, Clone)]
pub struct SplineReport {
    pub basis: Arc<LieBasis>,
    pub settings: SolverSettings,
    pub rho0: DensityState,
    pub targets: Vec<Target>,
    pub subintervals: Vec<SubintervalSolution>,
    pub orbit_checks: Vec<OrbitCheck>,
    /// `‖x_end(j) - x_start(j+1)‖` at each interior junction.
    pub rho_continuity: Vec<f64>,
    /// `‖y_end(j) - y_start(j+1)‖` at each interior junction.
    pub h_continuity: Vec<f64>,
    pub cost: CostSummary,
}

impl SplineReport {
    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn endpoint_distances(&self) -> Vec<f64> {
        self.subintervals.iter().map(|s| s.endpoint_distance).collect()
    }

    /// True when some target lies off the unitary orbit of ρ₀.
    pub fn off_orbit_warning(&self) -> bool {
        self.orbit_checks.iter().any(|c| !c.same_orbit)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Finds `v0 = dH/dt(t_start⁺)` such that `dH/dt(t_end⁻) = 0` for fixed `K`.
///
/// Newton's method with a forward-difference Jacobian. Without a `guess`
/// the start is `-K (t_end - t_start)`, exact when the bracket term vanishes.
#[allow(clippy::too_many_arguments)]
pub fn shoot_subinterval(
    x0: &[f64],
    y0: &[f64],
    k: &AlgebraElement,
    t_start: f64,
    t_end: f64,
    steps: usize,
    tol_shoot: f64,
    guess: Option<&[f64]>,
) -> Result<ShotResult> {
    let basis = k.basis();
    let d = basis.dim();
    let span = t_end - t_start;
    let endpoint_v = |v0: &[f64]| -> Result<Vec<f64>> {
        let s0 = PhaseState::new(t_start, x0.to_vec(), y0.to_vec(), v0.to_vec());
        Ok(integrate_endpoint(basis, &s0, k.coords(), t_end, steps)?.v)
    };

    let mut v0: Vec<f64> = match guess {
        Some(g) => g.to_vec(),
        None => k.coords().iter().map(|kl| -kl * span).collect(),
    };
    if v0.len() != d {
        return Err(Error::CoordLength {
            got: v0.len(),
            expected: d,
        });
    }
    let mut f = endpoint_v(&v0)?;
    let mut f_norm = norm(&f);
    let mut newton_steps = 0;

    while f_norm > tol_shoot {
        if newton_steps == MAX_NEWTON {
            return Err(Error::ShootingDivergence {
                iterations: newton_steps,
                best_residual: f_norm,
            });
        }
        newton_steps += 1;

        let columns: Vec<Vec<f64>> = (0..d)
            .into_par_iter()
            .map(|c| {
                let delta = FD_PERTURBATION * v0[c].abs().max(1.0);
                let mut probe = v0.clone();
                probe[c] += delta;
                let fp = endpoint_v(&probe)?;
                Ok(fp.iter().zip(&f).map(|(a, b)| (a - b) / delta).collect())
            })
            .collect::<Result<_>>()?;
        let jac = DMatrix::from_fn(d, d, |r, c| columns[c][r]);
        let rhs = -DVector::from_column_slice(&f);
        let Some(step) = jac.lu().solve(&rhs) else {
            return Err(Error::ShootingDivergence {
                iterations: newton_steps,
                best_residual: f_norm,
            });
        };

        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = v0.iter().zip(step.iter()).map(|(a, s)| a + scale * s).collect();
            let ft = endpoint_v(&trial)?;
            let ft_norm = norm(&ft);
            if ft_norm < f_norm {
                accepted = Some((trial, ft, ft_norm));
                break;
            }
            scale *= 0.5;
        }
        match accepted {
            Some((trial, ft, ft_norm)) => {
                v0 = trial;
                f = ft;
                f_norm = ft_norm;
            }
            None => {
                return Err(Error::ShootingDivergence {
                    iterations: newton_steps,
                    best_residual: f_norm,
                })
            }
        }
    }

    let s0 = PhaseState::new(t_start, x0.to_vec(), y0.to_vec(), v0.clone());
    let trajectory = integrate_subinterval(&s0, k, t_end, steps)?;
    let residual = norm(&trajectory.last().v);
    Ok(ShotResult {
        v0,
        trajectory,
        newton_steps,
        residual,
    })
}

/// Runs the accumulated-K steering iteration on one subinterval.
pub fn iterate_k(
    x0: &[f64],
    y0: &[f64],
    target: &DensityState,
    t_start: f64,
    t_end: f64,
    settings: &SolverSettings,
) -> Result<SubintervalSolution> {
    settings.check()?;
    let basis = target.element().basis();
    let inv_eps = 1.0 / settings.epsilon;
    let span = t_end - t_start;
    let endpoint_rho = |shot: &ShotResult| -> AlgebraElement {
        AlgebraElement::new(basis, shot.trajectory.last().x.clone()).expect("length checked by integrator")
    };

    let mut k = AlgebraElement::zero(basis);
    let mut shot = shoot_subinterval(x0, y0, &k, t_start, t_end, settings.steps, settings.tol_shoot, None)
        .map_err(|e| e.at_iteration(0))?;
    let mut rho_end = endpoint_rho(&shot);
    let mut distance_history = vec![rho_end.distance(target.element())?];
    let mut k_history = Vec::new();
    let mut newton_steps = vec![shot.newton_steps];

    for i in 1..=settings.iterations {
        let dk = target.element().bracket(&rho_end)?.scale(inv_eps);
        let dk_norm = dk.norm();
        k_history.push(dk_norm);
        if dk_norm < settings.tol_k {
            break;
        }
        k = k.add(&dk)?;
        let guess: Vec<f64> = shot.v0.iter().zip(dk.coords()).map(|(v, d)| v - d * span).collect();
        shot = shoot_subinterval(
            x0,
            y0,
            &k,
            t_start,
            t_end,
            settings.steps,
            settings.tol_shoot,
            Some(&guess),
        )
        .map_err(|e| e.at_iteration(i))?;
        rho_end = endpoint_rho(&shot);
        distance_history.push(rho_end.distance(target.element())?);
        newton_steps.push(shot.newton_steps);
    }

    let endpoint_distance = *distance_history.last().expect("at least one shot");
    let k_consistency = k.sub(&target.element().bracket(&rho_end)?.scale(inv_eps))?.norm();
    let j_cont = control_cost(&shot.trajectory);
    Ok(SubintervalSolution {
        t_start,
        t_end,
        k_final: k,
        endpoint_distance,
        j_cont,
        k_history,
        distance_history,
        newton_steps,
        shoot_residual: shot.residual,
        k_consistency,
        trajectory: shot.trajectory,
    })
}

/// Solves every subinterval in time order, chaining ρ and H.
pub fn solve_spline(spec: &ProblemSpec) -> Result<SplineReport> {
    spec.check()?;
    let mut x = spec.rho0.element().coords().to_vec();
    let mut y = spec.h0.coords().to_vec();
    let mut t_start = 0.0;
    let mut subintervals = Vec::with_capacity(spec.targets.len());
    for (j, target) in spec.targets.iter().enumerate() {
        let sol =
            iterate_k(&x, &y, &target.rho, t_start, target.t, &spec.settings).map_err(|e| e.at_subinterval(j + 1))?;
        let last = sol.trajectory.last();
        x = last.x.clone();
        y = last.y.clone();
        t_start = target.t;
        subintervals.push(sol);
    }

    let orbit_checks = spec
        .targets
        .iter()
        .enumerate()
        .map(|(i, target)| {
            let dist = orbit_distance(&spec.rho0, &target.rho)?;
            Ok(OrbitCheck {
                target: i + 1,
                orbit_distance: dist,
                same_orbit: dist < SAME_ORBIT_THRESHOLD,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rho_continuity = Vec::new();
    let mut h_continuity = Vec::new();
    for pair in subintervals.windows(2) {
        let (a, b) = (pair[0].trajectory.last(), pair[1].trajectory.first());
        rho_continuity.push(diff_norm(&a.x, &b.x));
        h_continuity.push(diff_norm(&a.y, &b.y));
    }

    let mut report = SplineReport {
        basis: Arc::clone(&spec.basis),
        settings: spec.settings,
        rho0: spec.rho0.clone(),
        targets: spec.targets.clone(),
        subintervals,
        orbit_checks,
        rho_continuity,
        h_continuity,
        cost: CostSummary {
            j_total: 0.0,
            j_cont: 0.0,
            penalty: 0.0,
        },
    };
    report.cost = evaluate_cost(&report, spec.settings.epsilon).summary();
    Ok(report)
}

fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

/// Cost breakdown of a solved report.
#[derive(Debug, Clone, PartialEq)]
pub struct CostBreakdown {
    pub j_total: f64,
    pub j_cont: Vec<f64>,
    pub penalty: f64,
}

impl CostBreakdown {
    pub fn summary(&self) -> CostSummary {
        CostSummary {
            j_total: self.j_total,
            j_cont: self.j_cont.iter().sum(),
            penalty: self.penalty,
        }
    }
}

/// `J = Σ_j ∫ ½‖u‖² dt + (1/2ε) Σ_j d²(ρ(t_j), ρ_j)`.
pub fn evaluate_cost(report: &SplineReport, epsilon: f64) -> CostBreakdown {
    let j_cont: Vec<f64> = report
        .subintervals
        .iter()
        .map(|s| control_cost(&s.trajectory))
        .collect();
    let penalty = report
        .subintervals
        .iter()
        .map(|s| s.endpoint_distance * s.endpoint_distance)
        .sum::<f64>()
        / (2.0 * epsilon);
    CostBreakdown {
        j_total: j_cont.iter().sum::<f64>() + penalty,
        j_cont,
        penalty,
    }
}

/// `∫ ½‖v‖² dt` over the stored samples.
pub fn control_cost(trajectory: &Trajectory) -> f64 {
    let values: Vec<f64> = trajectory
        .samples
        .iter()
        .map(|s| 0.5 * s.v.iter().map(|a| a * a).sum::<f64>())
        .collect();
    simpson_uniform(&values, trajectory.step)
}

/// Composite Simpson rule on uniform samples; an odd panel count closes
/// with a trapezoid on the last panel.
pub fn simpson_uniform(values: &[f64], h: f64) -> f64 {
    let panels = values.len().saturating_sub(1);
    if panels == 0 {
        return 0.0;
    }
    let even = panels - panels % 2;
    let mut sum = 0.0;
    for p in (0..even).step_by(2) {
        sum += values[p] + 4.0 * values[p + 1] + values[p + 2];
    }
    let mut total = sum * h / 3.0;
    if even < panels {
        total += 0.5 * h * (values[panels - 1] + values[panels]);
    }
    total
}

/// Weights of the 7-point centered first-derivative stencil.
const STENCIL: [f64; 7] = [
    -1.0 / 60.0,
    9.0 / 60.0,
    -45.0 / 60.0,
    0.0,
    45.0 / 60.0,
    -9.0 / 60.0,
    1.0 / 60.0,
];

/// Largest `‖dv/dt - [y, v] - K‖` over samples with three neighbours on each
/// side, with `dv/dt` from the 6th-order centered difference of stored `v`.
///
/// The stencil error is well below the integrator's own O(h⁴) defect, so this
/// measures how far the stored samples are from satisfying the first integral.
pub fn first_integral_residual(trajectory: &Trajectory) -> f64 {
    let basis = trajectory.k.basis();
    let samples = &trajectory.samples;
    let h = trajectory.step;
    let d = basis.dim();
    let reach = STENCIL.len() / 2;
    let mut worst = 0.0_f64;
    let mut bracket = vec![0.0; d];
    for i in reach..samples.len().saturating_sub(reach) {
        basis.bracket_coords_into(&samples[i].y, &samples[i].v, &mut bracket);
        let mut sq = 0.0;
        for l in 0..d {
            let dv = STENCIL
                .iter()
                .enumerate()
                .map(|(m, w)| w * samples[i + m - reach].v[l])
                .sum::<f64>()
                / h;
            let r = dv - bracket[l] - trajectory.k.coords()[l];
            sq += r * r;
        }
        worst = worst.max(sq.sqrt());
    }
    worst
}
