#![allow(dead_code)]

use std::sync::Arc;

use qspline::dynamics::PhaseState;
use qspline::lie_basis::{AlgebraElement, CMatrix, LieBasis};
use qspline::state::{DensityState, StateTolerance};
use qspline_oracle::MatrixPhase;
use rand::Rng;

pub fn to_matrix(basis: &LieBasis, coords: &[f64]) -> CMatrix {
    basis.reconstruct(coords).unwrap()
}

pub fn to_coords(basis: &LieBasis, m: &CMatrix) -> Vec<f64> {
    basis.project(m).unwrap().iter().copied().collect()
}

pub fn phase_to_matrices(basis: &LieBasis, s: &PhaseState) -> MatrixPhase {
    MatrixPhase {
        rho: to_matrix(basis, &s.x),
        h: to_matrix(basis, &s.y),
        v: to_matrix(basis, &s.v),
    }
}

/// Euclidean distance of the three coordinate blocks of `s` from the oracle state `m`.
pub fn phase_error(basis: &LieBasis, s: &PhaseState, m: &MatrixPhase) -> f64 {
    let blocks = [(&s.x, &m.rho), (&s.y, &m.h), (&s.v, &m.v)];
    blocks
        .iter()
        .map(|(c, mat)| {
            let r = to_coords(basis, mat);
            c.iter().zip(&r).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
        })
        .sum::<f64>()
        .sqrt()
}

pub fn random_coords(dim: usize, scale: f64, rng: &mut impl Rng) -> Vec<f64> {
    (0..dim).map(|_| scale * (2.0 * rng.gen::<f64>() - 1.0)).collect()
}

pub fn random_element(basis: &Arc<LieBasis>, scale: f64, rng: &mut impl Rng) -> AlgebraElement {
    AlgebraElement::new(basis, random_coords(basis.dim(), scale, rng)).unwrap()
}

pub fn random_state(basis: &Arc<LieBasis>, rng: &mut impl Rng) -> DensityState {
    let m = qspline_oracle::random_density(basis.n(), rng);
    qspline::state::validate_with(&m, basis, StateTolerance::STRICT).unwrap()
}

pub fn sorted_spectrum(basis: &LieBasis, x: &[f64]) -> Vec<f64> {
    qspline::state::hermitian_spectrum(&to_matrix(basis, x))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

/// Random direction scaled to Euclidean norm `norm`.
pub fn random_with_norm(dim: usize, norm: f64, rng: &mut impl Rng) -> Vec<f64> {
    let v = random_coords(dim, 1.0, rng);
    let len = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.into_iter().map(|a| a * norm / len).collect()
}
