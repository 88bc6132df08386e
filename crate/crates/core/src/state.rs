//! Density matrices: validation, purity, spectra and unitary-orbit distance.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lie_basis::{to_coords, AlgebraElement, CMatrix, LieBasis};

/// Acceptance thresholds for [`validate_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateTolerance {
    /// Maximum `|Tr ρ - 1|`.
    pub trace: f64,
    /// Eigenvalues down to `-eigen_floor` are accepted as round-off.
    pub eigen_floor: f64,
}

impl StateTolerance {
    pub const STRICT: StateTolerance = StateTolerance {
        trace: 1e-12,
        eigen_floor: 1e-10,
    };

    /// Same slack for trace and positivity; used for data published to a
    /// fixed number of decimals.
    pub fn uniform(tol: f64) -> Self {
        Self {
            trace: tol,
            eigen_floor: tol,
        }
    }
}

impl Default for StateTolerance {
    fn default() -> Self {
        Self::STRICT
    }
}

/// Orbit distances below this are reported as "same orbit".
pub const SAME_ORBIT_THRESHOLD: f64 = 1e-4;

/// Purity within this of 1 counts as a pure state.
pub const PURE_TOL: f64 = 1e-10;

/// A validated density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    element: AlgebraElement,
    spectrum: Vec<f64>,
}

/// Validates `m` with [`StateTolerance::STRICT`].
pub fn validate(m: &CMatrix, basis: &Arc<LieBasis>) -> Result<DensityState> {
    validate_with(m, basis, StateTolerance::STRICT)
}

pub fn validate_with(m: &CMatrix, basis: &Arc<LieBasis>, tol: StateTolerance) -> Result<DensityState> {
    let element = to_coords(m, basis)?;
    DensityState::from_element(element, tol)
}

impl DensityState {
    pub fn from_element(element: AlgebraElement, tol: StateTolerance) -> Result<Self> {
        let basis = element.basis();
        let trace = element.coords()[basis.identity_index()] / basis.unit_trace_coord();
        if (trace - 1.0).abs() > tol.trace {
            return Err(Error::Trace { trace, tol: tol.trace });
        }
        let spectrum = hermitian_spectrum(&element.matrix());
        let smallest = *spectrum.last().expect("n >= 1");
        if smallest < -tol.eigen_floor {
            return Err(Error::Positivity {
                eigenvalue: smallest,
                tol: tol.eigen_floor,
            });
        }
        Ok(Self { element, spectrum })
    }

    pub fn element(&self) -> &AlgebraElement {
        &self.element
    }

    pub fn matrix(&self) -> CMatrix {
        self.element.matrix()
    }

    pub fn n(&self) -> usize {
        self.element.basis().n()
    }

    /// Eigenvalues sorted in descending order.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        purity(self)
    }

    pub fn is_pure(&self) -> bool {
        (self.purity() - 1.0).abs() <= PURE_TOL
    }
}

/// `Tr ρ² = 2 <ρ, ρ>` in the orthonormal coordinates.
pub fn purity(s: &DensityState) -> f64 {
    coords_purity(s.element.coords())
}

pub fn coords_purity(coords: &[f64]) -> f64 {
    2.0 * coords.iter().map(|c| c * c).sum::<f64>()
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_spectrum(m: &CMatrix) -> Vec<f64> {
    let mut eig: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    eig
}

/// `sqrt((1/2) Σ_k (λ↓_k(a) - λ↓_k(b))²)`: the smallest distance between `a`
/// and any unitary conjugate of `b`.
pub fn orbit_distance(a: &DensityState, b: &DensityState) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::BasisMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    Ok(spectrum_distance(a.spectrum(), b.spectrum()))
}

/// Orbit distance between two descending spectra.
pub fn spectrum_distance(a: &[f64], b: &[f64]) -> f64 {
    let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (0.5 * sq).sqrt()
}

pub fn same_orbit(a: &DensityState, b: &DensityState) -> Result<bool> {
    Ok(orbit_distance(a, b)? < SAME_ORBIT_THRESHOLD)
}

/// Raw (σ2, σ3, σ4) coordinates of a qubit state; pure states lie on the
/// sphere of radius 1/2.
pub fn bloch_coords(s: &DensityState) -> Result<[f64; 3]> {
    if s.n() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: s.n(),
        });
    }
    let c = s.element.coords();
    Ok([c[1], c[2], c[3]])
}
