//! Built-in problems: a pure-state qubit chain, a mixed qutrit chain on one
//! unitary orbit, and a qutrit chain whose start lies on a neighbouring orbit.

use std::fmt;
use std::str::FromStr;

use crate::problem_file::{MatrixJson, ProblemFile, TargetJson};

/// Qutrit targets are published to six decimals; trace and positivity hold
/// only to that precision.
pub const QUTRIT_STATE_TOL: f64 = 1e-5;

/// Integration steps per qutrit subinterval. The qutrit Hamiltonians are
/// several times larger than the qubit ones, and 400 steps keep the stored
/// samples within 1e-7 of the first integral.
pub const QUTRIT_STEPS: usize = 400;

/// The second off-orbit target approaches its orbit floor slowly; 400 K
/// updates settle it to within 1e-6 of the floor.
pub const OFF_ORBIT_ITERATIONS: usize = 400;

/// Diagonal shift that moves the off-orbit start away from the target orbit.
pub const OFF_ORBIT_SHIFT: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Qubit,
    Qutrit,
    QutritOffOrbit,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Qubit, Scenario::Qutrit, Scenario::QutritOffOrbit];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Qubit => "qubit",
            Scenario::Qutrit => "qutrit",
            Scenario::QutritOffOrbit => "qutrit-off-orbit",
        }
    }

    pub fn problem(self) -> ProblemFile {
        match self {
            Scenario::Qubit => qubit(),
            Scenario::Qutrit => qutrit(),
            Scenario::QutritOffOrbit => qutrit_off_orbit(),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownScenario(pub String);

impl fmt::Display for UnknownScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown scenario '{}' (expected one of: qubit, qutrit, qutrit-off-orbit)",
            self.0
        )
    }
}

impl std::error::Error for UnknownScenario {}

impl FromStr for Scenario {
    type Err = UnknownScenario;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| UnknownScenario(s.to_string()))
    }
}

/// `a1 I + a2 σx + a3 σy + a4 σz`.
fn pauli(a: [f64; 4]) -> MatrixJson {
    vec![
        vec![[a[0] + a[3], 0.0], [a[1], -a[2]]],
        vec![[a[1], a[2]], [a[0] - a[3], 0.0]],
    ]
}

fn real_diag(d: [f64; 3]) -> MatrixJson {
    (0..3)
        .map(|r| (0..3).map(|c| [if r == c { d[r] } else { 0.0 }, 0.0]).collect())
        .collect()
}

/// Hermitian 3x3 matrix from its diagonal and upper off-diagonal entries.
fn herm3(d: [f64; 3], a12: [f64; 2], a13: [f64; 2], a23: [f64; 2]) -> MatrixJson {
    let conj = |z: [f64; 2]| [z[0], -z[1]];
    vec![
        vec![[d[0], 0.0], a12, a13],
        vec![conj(a12), [d[1], 0.0], a23],
        vec![conj(a13), conj(a23), [d[2], 0.0]],
    ]
}

pub fn qubit() -> ProblemFile {
    let r2 = 2f64.sqrt();
    let r3 = 3f64.sqrt();
    let points = [
        [0.5, 0.25, 0.25, r2 / 4.0],
        [0.5, 3.0 / 8.0, r3 / 8.0, 0.25],
        [0.5, 0.5, 0.0, 0.0],
        // σz weight -sqrt(3)/4 puts the point on the pure-state sphere.
        [0.5, r3 / 8.0, 1.0 / 8.0, -r3 / 4.0],
        [0.5, 0.0, 0.5, 0.0],
    ];
    ProblemFile {
        n: 2,
        epsilon: 0.005,
        iterations: 50,
        steps: 200,
        tol_shoot: None,
        tol_k: None,
        state_tol: None,
        rho0: pauli([0.5, 0.0, 0.0, 0.5]),
        h0: pauli([0.0, 0.0, 0.0, 1.0]),
        targets: points
            .iter()
            .enumerate()
            .map(|(i, p)| TargetJson {
                t: (i + 1) as f64 / 5.0,
                rho: pauli(*p),
            })
            .collect(),
    }
}

/// The six published qutrit targets, in time order.
pub fn qutrit_targets() -> [MatrixJson; 6] {
    [
        herm3(
            [0.436919, 0.442465, 0.120616],
            [-0.0234205, -0.187994],
            [0.109777, 0.158205],
            [0.0387764, 0.0518969],
        ),
        herm3(
            [0.25208, 0.358968, 0.388953],
            [0.0710467, -0.0594233],
            [-0.178472, 0.143899],
            [0.0437509, -0.207081],
        ),
        herm3(
            [0.510032, 0.268756, 0.221213],
            [0.0421306, -0.160051],
            [-0.158675, 0.163612],
            [0.0865724, 0.0172119],
        ),
        herm3(
            [0.145442, 0.450398, 0.40416],
            [0.0762356, -0.126603],
            [-0.0740697, 0.211438],
            [-0.107868, -0.0207668],
        ),
        herm3(
            [0.294447, 0.301392, 0.40416],
            [0.1995, -0.0726447],
            [-0.0696641, 0.219691],
            [-0.0818337, -0.0494491],
        ),
        herm3(
            [0.0638338, 0.522085, 0.414082],
            [-0.040794, 0.00995446],
            [0.00664582, -0.133158],
            [0.152599, -0.104391],
        ),
    ]
}

fn lambda9() -> MatrixJson {
    let s = (2.0f64 / 3.0).sqrt();
    real_diag([s, s, s])
}

pub fn qutrit() -> ProblemFile {
    ProblemFile {
        n: 3,
        epsilon: 0.001,
        iterations: 200,
        steps: QUTRIT_STEPS,
        tol_shoot: None,
        tol_k: None,
        state_tol: Some(QUTRIT_STATE_TOL),
        rho0: real_diag([1.0 / 3.0, 2.0 / 3.0, 0.0]),
        h0: lambda9(),
        targets: qutrit_targets()
            .into_iter()
            .enumerate()
            .map(|(i, rho)| TargetJson {
                t: (i + 1) as f64 / 6.0,
                rho,
            })
            .collect(),
    }
}

pub fn qutrit_off_orbit() -> ProblemFile {
    let targets = qutrit_targets();
    ProblemFile {
        n: 3,
        epsilon: 0.001,
        iterations: OFF_ORBIT_ITERATIONS,
        steps: QUTRIT_STEPS,
        tol_shoot: None,
        tol_k: None,
        state_tol: Some(QUTRIT_STATE_TOL),
        rho0: real_diag([1.0 / 3.0 - OFF_ORBIT_SHIFT, 2.0 / 3.0 + OFF_ORBIT_SHIFT, 0.0]),
        h0: lambda9(),
        targets: targets[..2]
            .iter()
            .enumerate()
            .map(|(i, rho)| TargetJson {
                t: (i + 1) as f64 / 6.0,
                rho: rho.clone(),
            })
            .collect(),
    }
}
