//! Quantum splines on u*(n).
//!
//! Given target density matrices `ρ_1..ρ_N` at times `t_1 < .. < t_N`, find a
//! piecewise-cubic Hamiltonian `H(t)` whose von Neumann flow from `ρ_0`
//! passes close to every target, trading the control effort
//! `∫ ½‖dH/dt‖² dt` against `(1/2ε) Σ d²(ρ(t_j), ρ_j)`.
//!
//! * [`lie_basis`]: orthonormal Hermitian bases and structure constants.
//! * [`state`]: density-matrix validation, purity, spectra and orbit distance.
//! * [`dynamics`]: the coupled ODE and the Gauss-Legendre integrator.
//! * [`solver`]: shooting, accumulated-K steering and subinterval chaining.
//! * [`report`]: distance tables, CSV and JSON outputs.
//! * [`problem_file`], [`scenario`], [`cli`]: file format, built-in problems
//!   and the command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod lie_basis;
pub mod problem_file;
pub mod report;
pub mod scenario;
pub mod solver;
pub mod state;

pub use dynamics::{gauss_step, integrate_subinterval, vector_field, PhaseState, Trajectory};
pub use error::{Error, Result};
pub use lie_basis::{build_basis, from_coords, to_coords, AlgebraElement, CMatrix, LieBasis};
pub use problem_file::{parse_problem, parse_problem_str, read_problem_file, ProblemFile};
pub use scenario::Scenario;
pub use solver::{
    evaluate_cost, iterate_k, shoot_subinterval, solve_spline, ProblemSpec, SolverSettings, SplineReport,
    SubintervalSolution, Target,
};
pub use state::{bloch_coords, orbit_distance, purity, validate, DensityState, StateTolerance};
