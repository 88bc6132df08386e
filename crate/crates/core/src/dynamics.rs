//! Coupled state/Hamiltonian dynamics and the 2-stage Gauss-Legendre integrator.
//!
//! In coordinates over an orthonormal basis the reduced extremal equations are
//!
//! ```text
//! dx/dt = [y, x]        (von Neumann flow of ρ under H)
//! dy/dt = v             (v = dH/dt is the control)
//! dv/dt = K + [y, v]    (first integral of the cubic Hamiltonian equation)
//! ```
//!
//! with `[a, b]_l = Σ c[l][r][s] a_r b_s`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie_basis::{AlgebraElement, LieBasis};

const SQRT3_6: f64 = 0.288_675_134_594_812_9; // sqrt(3) / 6

/// Gauss-Legendre order-4 Butcher tableau.
const GL_A: [[f64; 2]; 2] = [[0.25, 0.25 - SQRT3_6], [0.25 + SQRT3_6, 0.25]];
const GL_B: [f64; 2] = [0.5, 0.5];

/// Target max-norm change of the stage increments between sweeps.
pub const STAGE_TOL: f64 = 1e-14;
/// Residual above which a stage solve is reported as failed.
pub const STAGE_FAIL_TOL: f64 = 1e-12;
pub const STAGE_MAX_SWEEPS: usize = 100;

/// Point in the extended phase space: time, ρ coordinates, H coordinates and
/// dH/dt coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub t: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub v: Vec<f64>,
}

impl PhaseState {
    pub fn new(t: f64, x: Vec<f64>, y: Vec<f64>, v: Vec<f64>) -> Self {
        Self { t, x, y, v }
    }

    fn check(&self, basis: &LieBasis) -> Result<()> {
        let d = basis.dim();
        for len in [self.x.len(), self.y.len(), self.v.len()] {
            if len != d {
                return Err(Error::CoordLength { got: len, expected: d });
            }
        }
        Ok(())
    }

    fn pack(&self) -> Vec<f64> {
        let mut u = Vec::with_capacity(3 * self.x.len());
        u.extend_from_slice(&self.x);
        u.extend_from_slice(&self.y);
        u.extend_from_slice(&self.v);
        u
    }

    fn unpack(t: f64, u: &[f64]) -> Self {
        let d = u.len() / 3;
        Self {
            t,
            x: u[..d].to_vec(),
            y: u[d..2 * d].to_vec(),
            v: u[2 * d..].to_vec(),
        }
    }
}

/// Time derivative of a [`PhaseState`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDerivative {
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub dv: Vec<f64>,
}

/// Uniformly sampled solution over one subinterval.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<PhaseState>,
    pub k: AlgebraElement,
    pub step: f64,
}

impl Trajectory {
    pub fn first(&self) -> &PhaseState {
        &self.samples[0]
    }

    pub fn last(&self) -> &PhaseState {
        self.samples.last().expect("trajectory has at least two samples")
    }
}

/// Evaluates the right-hand side `(dx, dy, dv)`.
pub fn vector_field(s: &PhaseState, k: &AlgebraElement) -> Result<PhaseDerivative> {
    let basis = k.basis();
    s.check(basis)?;
    let d = basis.dim();
    let u = s.pack();
    let mut du = vec![0.0; 3 * d];
    rhs(basis, k.coords(), &u, &mut du);
    Ok(PhaseDerivative {
        dx: du[..d].to_vec(),
        dy: du[d..2 * d].to_vec(),
        dv: du[2 * d..].to_vec(),
    })
}

fn rhs(basis: &LieBasis, k: &[f64], u: &[f64], du: &mut [f64]) {
    let d = basis.dim();
    let (x, rest) = u.split_at(d);
    let (y, v) = rest.split_at(d);
    let (dx, rest) = du.split_at_mut(d);
    let (dy, dv) = rest.split_at_mut(d);
    basis.bracket_coords_into(y, x, dx);
    dy.copy_from_slice(v);
    basis.bracket_coords_into(y, v, dv);
    for (o, kl) in dv.iter_mut().zip(k) {
        *o += kl;
    }
}

/// Reusable buffers for Gauss-Legendre steps with a fixed `K`.
pub(crate) struct GaussStepper<'a> {
    basis: &'a LieBasis,
    k: &'a [f64],
    stages: [Vec<f64>; 2],
    next: [Vec<f64>; 2],
    probe: Vec<f64>,
}

impl<'a> GaussStepper<'a> {
    pub(crate) fn new(basis: &'a LieBasis, k: &'a [f64]) -> Self {
        let n = 3 * basis.dim();
        Self {
            basis,
            k,
            stages: [vec![0.0; n], vec![0.0; n]],
            next: [vec![0.0; n], vec![0.0; n]],
            probe: vec![0.0; n],
        }
    }

    /// Advances the packed state `u` by `h` in place. On failure returns the
    /// number of sweeps and the final residual.
    pub(crate) fn step(&mut self, u: &mut [f64], h: f64) -> std::result::Result<(), (usize, f64)> {
        // Warm start: both stage derivatives equal f(u) (explicit Euler predictor).
        rhs(self.basis, self.k, u, &mut self.stages[0]);
        let (s0, s1) = self.stages.split_at_mut(1);
        s1[0].copy_from_slice(&s0[0]);

        let mut residual = f64::INFINITY;
        let mut sweeps = 0;
        while sweeps < STAGE_MAX_SWEEPS {
            sweeps += 1;
            for i in 0..2 {
                for (j, p) in self.probe.iter_mut().enumerate() {
                    *p = u[j] + h * (GL_A[i][0] * self.stages[0][j] + GL_A[i][1] * self.stages[1][j]);
                }
                rhs(self.basis, self.k, &self.probe, &mut self.next[i]);
            }
            let previous = residual;
            residual = 0.0;
            for i in 0..2 {
                for (a, b) in self.next[i].iter().zip(&self.stages[i]) {
                    residual = f64::max(residual, (h * (a - b)).abs());
                }
            }
            std::mem::swap(&mut self.stages, &mut self.next);
            if residual < STAGE_TOL || (residual >= previous && residual < STAGE_FAIL_TOL) {
                break;
            }
        }
        if residual > STAGE_FAIL_TOL {
            return Err((sweeps, residual));
        }
        for (j, uj) in u.iter_mut().enumerate() {
            *uj += h * (GL_B[0] * self.stages[0][j] + GL_B[1] * self.stages[1][j]);
        }
        Ok(())
    }
}

fn check_step(h: f64) -> Result<()> {
    if h == 0.0 || !h.is_finite() {
        return Err(Error::StepSize(h));
    }
    Ok(())
}

/// One Gauss-Legendre step of size `h`. Negative `h` integrates backwards.
pub fn gauss_step(s: &PhaseState, h: f64, k: &AlgebraElement) -> Result<PhaseState> {
    check_step(h)?;
    let basis = k.basis();
    s.check(basis)?;
    let mut u = s.pack();
    GaussStepper::new(basis, k.coords())
        .step(&mut u, h)
        .map_err(|(sweeps, residual)| Error::StageConvergence {
            step: 0,
            sweeps,
            residual,
        })?;
    Ok(PhaseState::unpack(s.t + h, &u))
}

fn uniform_steps(s0: &PhaseState, t_end: f64, steps: usize) -> Result<f64> {
    if steps == 0 {
        return Err(Error::InvalidProblem("steps must be at least 1".into()));
    }
    if !(t_end > s0.t) {
        return Err(Error::InvalidProblem(format!(
            "end time {t_end} must exceed start time {}",
            s0.t
        )));
    }
    let h = (t_end - s0.t) / steps as f64;
    check_step(h)?;
    Ok(h)
}

fn sample_time(t0: f64, t_end: f64, i: usize, steps: usize) -> f64 {
    if i == steps {
        t_end
    } else {
        t0 + (t_end - t0) * (i as f64 / steps as f64)
    }
}

/// Integrates from `s0.t` to `t_end` in `steps` uniform steps, keeping every sample.
pub fn integrate_subinterval(s0: &PhaseState, k: &AlgebraElement, t_end: f64, steps: usize) -> Result<Trajectory> {
    let basis = k.basis();
    s0.check(basis)?;
    let h = uniform_steps(s0, t_end, steps)?;
    let mut stepper = GaussStepper::new(basis, k.coords());
    let mut u = s0.pack();
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(s0.clone());
    for i in 1..=steps {
        stepper
            .step(&mut u, h)
            .map_err(|(sweeps, residual)| Error::StageConvergence {
                step: i - 1,
                sweeps,
                residual,
            })?;
        samples.push(PhaseState::unpack(sample_time(s0.t, t_end, i, steps), &u));
    }
    Ok(Trajectory {
        samples,
        k: k.clone(),
        step: h,
    })
}

/// Same as [`integrate_subinterval`] but only returns the final state.
pub fn integrate_endpoint(
    basis: &Arc<LieBasis>,
    s0: &PhaseState,
    k: &[f64],
    t_end: f64,
    steps: usize,
) -> Result<PhaseState> {
    s0.check(basis)?;
    let h = uniform_steps(s0, t_end, steps)?;
    let mut stepper = GaussStepper::new(basis, k);
    let mut u = s0.pack();
    for i in 0..steps {
        stepper
            .step(&mut u, h)
            .map_err(|(sweeps, residual)| Error::StageConvergence {
                step: i,
                sweeps,
                residual,
            })?;
    }
    Ok(PhaseState::unpack(t_end, &u))
}
