//! Reference computations for testing `qspline`.
//!
//! Everything here works directly on complex matrices and shares no code with
//! the production crate: an explicit RK4 integrator of the matrix equations,
//! a scaling-and-squaring matrix exponential, Haar-random unitaries, and
//! finite-difference derivative checks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type CMatrix = DMatrix<Complex64>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Step of [`reference_integrate`].
    pub step: f64,
    pub seed: u64,
    /// Number of random unitaries for orbit sampling.
    pub samples: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            step: 1e-5,
            seed: 0x5eed,
            samples: 10_000,
        }
    }
}

impl OracleConfig {
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// State `(ρ, H, dH/dt)` of the matrix equations.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPhase {
    pub rho: CMatrix,
    pub h: CMatrix,
    pub v: CMatrix,
}

/// `-i (AB - BA)`.
pub fn bracket(a: &CMatrix, b: &CMatrix) -> CMatrix {
    (a * b - b * a) * (-I)
}

/// `sqrt(½ Tr((A - B)²))` for Hermitian `A`, `B`.
pub fn hs_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / 2f64.sqrt()
}

/// Largest entry of `|M - M†|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn rhs(s: &MatrixPhase, k: &CMatrix) -> MatrixPhase {
    MatrixPhase {
        rho: bracket(&s.h, &s.rho),
        h: s.v.clone(),
        v: k + bracket(&s.h, &s.v),
    }
}

fn axpy(s: &MatrixPhase, a: f64, d: &MatrixPhase) -> MatrixPhase {
    let a = Complex64::new(a, 0.0);
    MatrixPhase {
        rho: &s.rho + &d.rho * a,
        h: &s.h + &d.h * a,
        v: &s.v + &d.v * a,
    }
}

/// Classical RK4 on `dρ/dt = -i[H, ρ]`, `dH/dt = V`, `dV/dt = K - i[H, V]`
/// from `t = 0` to `t_end`, with the largest uniform step not above `step`.
pub fn reference_integrate(s0: &MatrixPhase, k: &CMatrix, t_end: f64, step: f64) -> MatrixPhase {
    assert!(step > 0.0, "step must be positive");
    let n = (t_end.abs() / step).ceil().max(1.0) as usize;
    let h = t_end / n as f64;
    let mut s = s0.clone();
    for _ in 0..n {
        let k1 = rhs(&s, k);
        let k2 = rhs(&axpy(&s, h / 2.0, &k1), k);
        let k3 = rhs(&axpy(&s, h / 2.0, &k2), k);
        let k4 = rhs(&axpy(&s, h, &k3), k);
        let two = Complex64::new(2.0, 0.0);
        let c = |a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix| {
            (a + b * two + c * two + d) * Complex64::new(h / 6.0, 0.0)
        };
        s.rho += c(&k1.rho, &k2.rho, &k3.rho, &k4.rho);
        s.h += c(&k1.h, &k2.h, &k3.h, &k4.h);
        s.v += c(&k1.v, &k2.v, &k3.v, &k4.v);
    }
    s
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm = a.iter().map(|z| z.norm()).sum::<f64>();
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a * Complex64::new(0.5f64.powi(squarings as i32), 0.0);
    let mut term = CMatrix::identity(n, n);
    let mut sum = term.clone();
    for j in 1..=24 {
        term = &term * &scaled * Complex64::new(1.0 / j as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `e^{-iHt} ρ e^{iHt}`.
pub fn expm_flow(rho: &CMatrix, h: &CMatrix, t: f64) -> CMatrix {
    let u = expm(&(h * Complex64::new(0.0, -t)));
    &u * rho * u.adjoint()
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller; the cosine branch is enough here.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn ginibre(n: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| Complex64::new(gaussian(rng), gaussian(rng)))
}

/// Hermitian matrix with standard-normal entries.
pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
    let g = ginibre(n, rng);
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Haar-distributed unitary from the QR factorization of a Ginibre matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    let qr = ginibre(n, rng).qr();
    let (mut q, r) = qr.unpack();
    for c in 0..n {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for row in 0..n {
            q[(row, c)] *= phase;
        }
    }
    q
}

/// Random full-rank density matrix `G G† / Tr(G G†)`.
pub fn random_density(n: usize, rng: &mut impl Rng) -> CMatrix {
    let g = ginibre(n, rng);
    let m = &g * g.adjoint();
    let tr = m.trace();
    m / tr
}

/// Smallest `hs_distance(U a U†, b)` over `samples` Haar-random unitaries.
pub fn sampled_orbit_distance(a: &CMatrix, b: &CMatrix, samples: usize, rng: &mut impl Rng) -> f64 {
    (0..samples)
        .map(|_| {
            let u = random_unitary(a.nrows(), rng);
            hs_distance(&(&u * a * u.adjoint()), b)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Relative error between the central difference of `f` at `point` along
/// `direction` (step `h`) and the claimed derivative `analytic`.
pub fn finite_difference_check<F>(f: F, point: &[f64], direction: &[f64], analytic: &[f64], h: f64) -> f64
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let shifted = |sign: f64| -> Vec<f64> { point.iter().zip(direction).map(|(p, d)| p + sign * h * d).collect() };
    let plus = f(&shifted(1.0));
    let minus = f(&shifted(-1.0));
    let mut err = 0.0;
    let mut scale = 0.0;
    for ((p, m), a) in plus.iter().zip(&minus).zip(analytic) {
        let fd = (p - m) / (2.0 * h);
        err += (fd - a) * (fd - a);
        scale += a * a;
    }
    err.sqrt() / scale.sqrt().max(f64::MIN_POSITIVE)
}
