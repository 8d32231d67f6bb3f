//! Mach-Zehnder simulation over an internal mixed state and the relation
//! between the maximal output probability and the interferometric distance.
//!
//! The particle enters in arm 0 with its internal degree of freedom in state
//! `rho`; arm 0 applies a gauge unitary `V` commuting with `rho`, arm 1
//! applies an arbitrary unitary `U`. The constructive-port probability is
//! `(1 + Re Tr(U rho V†))/2`, and maximizing over the block gauge gives
//! `1 - d_I^2(rho, U rho U†)/4`.

use crate::geometry::{self, GeometryError};
use crate::numerics::{self, CMatrix};
use crate::states::{self, MixedState, StateError};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InterferometerError {
    #[error("{which} is not unitary: residual {residual:.3e}")]
    NotUnitary { which: &'static str, residual: f64 },
    #[error("arm-0 unitary does not commute with the state: ‖[V, rho]‖ = {residual:.3e}")]
    DoesNotCommute { residual: f64 },
    #[error("operator dimension {got} does not match state dimension {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("arm unitary changed the decomposition type of the state")]
    TypeMismatch,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    State(#[from] StateError),
}

const UNITARY_TOL: f64 = 1e-10;
const COMMUTATOR_TOL: f64 = 1e-8;

fn unitarity_residual(u: &CMatrix) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - CMatrix::identity(n, n)).norm()
}

/// Balanced Mach-Zehnder with internal state `rho`, arm-1 unitary `U`, and an
/// arm-0 gauge `V` block-diagonal in the eigenbasis of `rho`.
#[derive(Clone, Debug)]
pub struct InterferometerSetup {
    rho: MixedState,
    arm_unitary: CMatrix,
    gauge_unitary: CMatrix,
}

impl InterferometerSetup {
    pub fn new(
        rho: MixedState,
        arm_unitary: CMatrix,
        gauge_unitary: CMatrix,
    ) -> Result<Self, InterferometerError> {
        let n = rho.dim();
        for (label, op) in [("U", &arm_unitary), ("V", &gauge_unitary)] {
            if op.nrows() != n || op.ncols() != n {
                return Err(InterferometerError::DimensionMismatch {
                    got: op.nrows(),
                    expected: n,
                });
            }
            let residual = unitarity_residual(op);
            if residual > UNITARY_TOL {
                return Err(InterferometerError::NotUnitary {
                    which: label,
                    residual,
                });
            }
        }
        let commutator = (&gauge_unitary * rho.matrix() - rho.matrix() * &gauge_unitary).norm();
        if commutator > COMMUTATOR_TOL {
            return Err(InterferometerError::DoesNotCommute {
                residual: commutator,
            });
        }
        Ok(Self {
            rho,
            arm_unitary,
            gauge_unitary,
        })
    }

    pub fn rho(&self) -> &MixedState {
        &self.rho
    }

    pub fn arm_unitary(&self) -> &CMatrix {
        &self.arm_unitary
    }

    pub fn gauge_unitary(&self) -> &CMatrix {
        &self.gauge_unitary
    }
}

/// Constructive-port probability `(1 + Re Tr(U rho V†))/2`.
pub fn port_probability(setup: &InterferometerSetup) -> f64 {
    let t = (&setup.arm_unitary * setup.rho.matrix() * setup.gauge_unitary.adjoint()).trace();
    0.5 * (1.0 + t.re)
}

/// Beam-splitter convention. `Symmetric` sends `|0> -> (|0> + i|1>)/sqrt(2)`,
/// putting the constructive port on arm 1; `Hadamard` exchanges the arms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BeamSplitter {
    Symmetric,
    Hadamard,
}

impl BeamSplitter {
    fn matrix(self) -> CMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            BeamSplitter::Symmetric => CMatrix::from_fn(2, 2, |r, c| {
                if r == c {
                    Complex64::new(s, 0.0)
                } else {
                    Complex64::new(0.0, s)
                }
            }),
            BeamSplitter::Hadamard => CMatrix::from_fn(2, 2, |r, c| {
                if r == 1 && c == 1 {
                    Complex64::new(-s, 0.0)
                } else {
                    Complex64::new(s, 0.0)
                }
            }),
        }
    }

    fn constructive_port(self) -> usize {
        match self {
            BeamSplitter::Symmetric => 1,
            BeamSplitter::Hadamard => 0,
        }
    }
}

/// Full density-matrix pipeline through the interferometer.
///
/// Builds the `2n x 2n` composite state through beam splitter, controlled
/// unitary `|0><0| ⊗ V + |1><1| ⊗ U`, and the second beam splitter, then
/// traces each output port. Returns `(constructive, destructive)`
/// probabilities, which sum to one.
pub fn simulate_chain(
    rho: &MixedState,
    arm_unitary: &CMatrix,
    gauge_unitary: &CMatrix,
    convention: BeamSplitter,
) -> Result<(f64, f64), InterferometerError> {
    let setup = InterferometerSetup::new(rho.clone(), arm_unitary.clone(), gauge_unitary.clone())?;
    let n = rho.dim();
    let bs = convention.matrix().kronecker(&CMatrix::identity(n, n));
    let mut controlled = CMatrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            controlled[(r, c)] = setup.gauge_unitary[(r, c)];
            controlled[(n + r, n + c)] = setup.arm_unitary[(r, c)];
        }
    }
    let mut input = CMatrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            input[(r, c)] = rho.matrix()[(r, c)];
        }
    }
    let after_first = &bs * input * bs.adjoint();
    let after_controlled = &controlled * after_first * controlled.adjoint();
    let output = &bs * after_controlled * bs.adjoint();
    let mut port = [0.0_f64; 2];
    for (l, slot) in port.iter_mut().enumerate() {
        *slot = (0..n).map(|r| output[(l * n + r, l * n + r)].re).sum();
    }
    let constructive = convention.constructive_port();
    Ok((port[constructive], port[1 - constructive]))
}

/// Optimal arm-0 gauge and the resulting maximal constructive-port
/// probability `1 - d_I^2(rho, U rho U†)/4`.
///
/// Per block the optimum is the unitary polar factor of `w_i† U w_i`; the
/// kernel block of `V` is the identity since it cannot affect the
/// probability.
pub fn max_port_probability(
    rho: &MixedState,
    arm_unitary: &CMatrix,
    eps_deg: f64,
    eps_zero: f64,
) -> Result<(f64, CMatrix), InterferometerError> {
    let n = rho.dim();
    if arm_unitary.nrows() != n || arm_unitary.ncols() != n {
        return Err(InterferometerError::DimensionMismatch {
            got: arm_unitary.nrows(),
            expected: n,
        });
    }
    let residual = unitarity_residual(arm_unitary);
    if residual > UNITARY_TOL {
        return Err(InterferometerError::NotUnitary {
            which: "U",
            residual,
        });
    }
    let decomposition = states::decompose(rho, eps_deg, eps_zero)?;
    let rotated = MixedState::new(arm_unitary * rho.matrix() * arm_unitary.adjoint())?;
    let rotated_decomposition = states::decompose(&rotated, eps_deg, eps_zero)?;
    if !decomposition.same_type_as(&rotated_decomposition) {
        return Err(InterferometerError::TypeMismatch);
    }

    // V = P_0 + sum_i w_i V_i w_i†, V_i the polar factor of w_i† U w_i.
    let mut gauge = CMatrix::identity(n, n);
    for block in decomposition.blocks() {
        let projector = block.projector();
        gauge -= &projector;
        let overlap = block.frame().adjoint() * (arm_unitary * block.frame());
        // max over V_i of Re Tr(B V_i†) is attained at V_i = g† for the
        // closed-form maximizer g of Re Tr(B g).
        let (_, g) = numerics::max_overlap_unitary(&overlap);
        gauge += block.frame() * g.adjoint() * block.frame().adjoint();
    }

    let distance = geometry::dist_base_decomposed(&decomposition, &rotated_decomposition)?;
    let pr_max = 1.0 - 0.25 * distance * distance;
    Ok((pr_max, gauge))
}
