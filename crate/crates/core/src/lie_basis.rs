//! Orthonormal Hermitian bases of u*(n) and their structure constants.
//!
//! Hermitian matrices are identified with u*(n) through the trace pairing
//! `<A, B> = (1/2) Tr(AB)`. The bracket on the Hermitian side is
//! `[A, B] = -i (AB - BA)`, so that the von Neumann flow reads
//! `dρ/dt = [H, ρ]`. Structure constants are always computed from the basis
//! matrices, never tabulated.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix used for every operator in the crate.
pub type CMatrix = DMatrix<Complex64>;

/// Structure constants below this magnitude are snapped to exactly zero.
pub const STRUCTURE_ZERO_SNAP: f64 = 1e-12;

/// Maximum entrywise anti-Hermitian part accepted by [`LieBasis::to_coords`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// One nonzero structure constant `c[l][r][s]`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    l: usize,
    r: usize,
    s: usize,
    value: f64,
}

/// Orthonormal Hermitian basis of u*(n) with its structure-constant tensor.
///
/// For n = 2 the ordering is the Pauli set (I, σx, σy, σz); for n = 3 it is
/// the Gell-Mann matrices λ1..λ8 followed by `sqrt(2/3) I`. For any other n
/// the generalized Gell-Mann construction is used with the identity last.
pub struct LieBasis {
    n: usize,
    elements: Vec<CMatrix>,
    identity_index: usize,
    dense: Vec<f64>,
    nonzero: Vec<Entry>,
}

impl fmt::Debug for LieBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LieBasis")
            .field("n", &self.n)
            .field("dim", &self.dim())
            .field("nonzero_structure_constants", &self.nonzero.len())
            .finish()
    }
}

/// Builds the canonical basis for an `n`-level system.
pub fn build_basis(n: usize) -> Result<Arc<LieBasis>> {
    LieBasis::new(n).map(Arc::new)
}

impl LieBasis {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let (elements, identity_index) = hermitian_elements(n);
        let dim = elements.len();
        debug_assert_eq!(dim, n * n);

        let mut dense = vec![0.0; dim * dim * dim];
        let mut nonzero = Vec::new();
        for r in 0..dim {
            for s in (r + 1)..dim {
                let comm = commutator(&elements[r], &elements[s]);
                for (l, sigma) in elements.iter().enumerate() {
                    let mut value = half_trace_product(sigma, &comm).re;
                    if value.abs() < STRUCTURE_ZERO_SNAP {
                        value = 0.0;
                    }
                    if value != 0.0 {
                        dense[(l * dim + r) * dim + s] = value;
                        dense[(l * dim + s) * dim + r] = -value;
                        nonzero.push(Entry { l, r, s, value });
                        nonzero.push(Entry {
                            l,
                            r: s,
                            s: r,
                            value: -value,
                        });
                    }
                }
            }
        }
        nonzero.sort_by_key(|e| (e.l, e.r, e.s));

        Ok(Self {
            n,
            elements,
            identity_index,
            dense,
            nonzero,
        })
    }

    /// Hilbert space dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of basis elements, `n²`.
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn element(&self, index: usize) -> &CMatrix {
        &self.elements[index]
    }

    /// Position of the element proportional to the identity.
    pub fn identity_index(&self) -> usize {
        self.identity_index
    }

    /// Coordinate along the identity direction of any unit-trace operator,
    /// `1 / sqrt(2n)`.
    pub fn unit_trace_coord(&self) -> f64 {
        1.0 / (2.0 * self.n as f64).sqrt()
    }

    /// Structure constant `c[l][r][s]` (0-based indices) such that
    /// `[σ_r, σ_s] = Σ_l c[l][r][s] σ_l`.
    pub fn structure_constant(&self, l: usize, r: usize, s: usize) -> f64 {
        let d = self.dim();
        self.dense[(l * d + r) * d + s]
    }

    /// Number of nonzero entries of the structure-constant tensor.
    pub fn structure_nonzeros(&self) -> usize {
        self.nonzero.len()
    }

    /// Coordinate bracket `out[l] = Σ c[l][r][s] a[r] b[s]`.
    ///
    /// This is the hot path of the integrator, so it works on raw slices.
    pub fn bracket_coords_into(&self, a: &[f64], b: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for e in &self.nonzero {
            out[e.l] += e.value * a[e.r] * b[e.s];
        }
    }

    pub fn bracket_coords(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.bracket_coords_into(a, b, &mut out);
        out
    }

    fn check_square(&self, m: &CMatrix) -> Result<()> {
        if m.nrows() != self.n || m.ncols() != self.n {
            return Err(Error::Shape {
                rows: m.nrows(),
                cols: m.ncols(),
                expected: self.n,
            });
        }
        Ok(())
    }

    /// Raw projection `coords[l] = (1/2) Tr(σ_l M)` after a Hermiticity check.
    pub fn project(&self, m: &CMatrix) -> Result<DVector<f64>> {
        self.check_square(m)?;
        let deviation = hermitian_deviation(m);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(DVector::from_iterator(
            self.dim(),
            self.elements.iter().map(|s| half_trace_product(s, m).re),
        ))
    }

    /// Matrix `Σ_l coords[l] σ_l`.
    pub fn reconstruct(&self, coords: &[f64]) -> Result<CMatrix> {
        if coords.len() != self.dim() {
            return Err(Error::CoordLength {
                got: coords.len(),
                expected: self.dim(),
            });
        }
        let mut m = CMatrix::zeros(self.n, self.n);
        for (c, sigma) in coords.iter().zip(&self.elements) {
            if *c != 0.0 {
                m += sigma * Complex64::new(*c, 0.0);
            }
        }
        Ok(m)
    }
}

/// Expands a Hermitian matrix in the basis.
pub fn to_coords(m: &CMatrix, basis: &Arc<LieBasis>) -> Result<AlgebraElement> {
    let coords = basis.project(m)?;
    Ok(AlgebraElement {
        basis: Arc::clone(basis),
        coords,
    })
}

/// Inverse of [`to_coords`].
pub fn from_coords(a: &AlgebraElement) -> CMatrix {
    a.matrix()
}

/// A Hermitian operator represented by its real coordinates over a basis.
#[derive(Clone)]
pub struct AlgebraElement {
    basis: Arc<LieBasis>,
    coords: DVector<f64>,
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlgebraElement")
            .field("n", &self.basis.n)
            .field("coords", &self.coords.as_slice())
            .finish()
    }
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.basis.n == other.basis.n && self.coords == other.coords
    }
}

impl AlgebraElement {
    pub fn new(basis: &Arc<LieBasis>, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != basis.dim() {
            return Err(Error::CoordLength {
                got: coords.len(),
                expected: basis.dim(),
            });
        }
        Ok(Self {
            basis: Arc::clone(basis),
            coords: DVector::from_vec(coords),
        })
    }

    pub fn zero(basis: &Arc<LieBasis>) -> Self {
        Self {
            basis: Arc::clone(basis),
            coords: DVector::zeros(basis.dim()),
        }
    }

    /// The `index`-th basis element as an algebra element.
    pub fn basis_element(basis: &Arc<LieBasis>, index: usize) -> Self {
        let mut e = Self::zero(basis);
        e.coords[index] = 1.0;
        e
    }

    pub fn basis(&self) -> &Arc<LieBasis> {
        &self.basis
    }

    pub fn coords(&self) -> &[f64] {
        self.coords.as_slice()
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords.data.into()
    }

    pub fn matrix(&self) -> CMatrix {
        self.basis
            .reconstruct(self.coords.as_slice())
            .expect("coordinate length fixed at construction")
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.basis.n != other.basis.n {
            return Err(Error::BasisMismatch {
                left: self.basis.n,
                right: other.basis.n,
            });
        }
        Ok(())
    }

    /// Hermitian bracket `-i (AB - BA)` computed through the structure constants.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coords = self
            .basis
            .bracket_coords(self.coords.as_slice(), other.coords.as_slice());
        Ok(Self {
            basis: Arc::clone(&self.basis),
            coords: DVector::from_vec(coords),
        })
    }

    /// Trace pairing `(1/2) Tr(AB)`, i.e. the Euclidean product of coordinates.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(self.coords.dot(&other.coords))
    }

    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }

    /// `d(A, B) = sqrt((1/2) Tr (A - B)²)`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok((&self.coords - &other.coords).norm())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            basis: Arc::clone(&self.basis),
            coords: &self.coords + &other.coords,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            basis: Arc::clone(&self.basis),
            coords: &self.coords - &other.coords,
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            basis: Arc::clone(&self.basis),
            coords: &self.coords * factor,
        }
    }
}

/// Largest entry of `|M - M^†|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `-i (AB - BA)`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    (a * b - b * a) * Complex64::new(0.0, -1.0)
}

fn half_trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc * 0.5
}

/// Basis matrices and the index of the identity direction.
fn hermitian_elements(n: usize) -> (Vec<CMatrix>, usize) {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut out = Vec::with_capacity(n * n);

    // Off-diagonal pairs and diagonals grouped by trailing index k, so that
    // n = 3 reproduces the Gell-Mann ordering λ1..λ8.
    for k in 1..n {
        for j in 0..k {
            let mut sym = CMatrix::zeros(n, n);
            sym[(j, k)] = one;
            sym[(k, j)] = one;
            out.push(sym);

            let mut anti = CMatrix::zeros(n, n);
            anti[(j, k)] = -i;
            anti[(k, j)] = i;
            out.push(anti);
        }
        let scale = (2.0 / (k * (k + 1)) as f64).sqrt();
        let mut diag = CMatrix::zeros(n, n);
        for d in 0..k {
            diag[(d, d)] = Complex64::new(scale, 0.0);
        }
        diag[(k, k)] = Complex64::new(-(k as f64) * scale, 0.0);
        out.push(diag);
    }

    let identity = CMatrix::identity(n, n) * Complex64::new((2.0 / n as f64).sqrt(), 0.0);
    if n == 2 {
        out.insert(0, identity);
        (out, 0)
    } else {
        out.push(identity);
        (out, n * n - 1)
    }
}
