//! Density-matrix validation, typed spectral decomposition, and Gibbs states.
//!
//! A state's *type* is the tuple of ranks of its spectral projectors with
//! distinct nonzero eigenvalues. Blocks are kept in strictly decreasing
//! eigenvalue order, which fixes a canonical pairing when two states of the
//! same type are compared. The kernel never carries a frame; it is tracked
//! only through its rank.

use crate::numerics::{self, CMatrix, NumericsError};
use num_complex::Complex64;
use thiserror::Error;

/// Default degeneracy-clustering tolerance, as a fraction of the spectral range.
pub const DEFAULT_EPS_DEG: f64 = 1e-8;
/// Default absolute threshold below which an eigenvalue is assigned to the kernel.
pub const DEFAULT_EPS_ZERO: f64 = 1e-12;

const VALIDATION_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("density matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("density matrix is not Hermitian: residual {residual:.3e} exceeds {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },
    #[error("density matrix has eigenvalue {value:.3e} below the PSD tolerance")]
    NegativeEigenvalue { value: f64 },
    #[error("density matrix trace is {trace:.15}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error(
        "eigenvalue clustering is ambiguous: relative gap {gap:.3e} lies inside [{lo:.3e}, {hi:.3e})"
    )]
    AmbiguousClustering { gap: f64, lo: f64, hi: f64 },
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Validated density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug)]
pub struct MixedState {
    dim: usize,
    matrix: CMatrix,
}

impl MixedState {
    pub fn new(matrix: CMatrix) -> Result<Self, StateError> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(StateError::NotSquare { rows, cols });
        }
        if !numerics::all_finite(&matrix) {
            return Err(StateError::Numerics(NumericsError::NonFinite));
        }
        let scale = 1.0 + matrix.norm();
        let tol = VALIDATION_TOL * scale;
        let residual = numerics::hermiticity_residual(&matrix);
        if residual > tol {
            return Err(StateError::NotHermitian { residual, tol });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > tol || trace.im.abs() > tol {
            return Err(StateError::TraceNotOne { trace: trace.re });
        }
        let eig = numerics::eigh(&matrix)?;
        if let Some(&min) = eig.eigenvalues.first() {
            if min < -tol {
                return Err(StateError::NegativeEigenvalue { value: min });
            }
        }
        Ok(Self { dim: rows, matrix })
    }

    /// Constructor for matrices that are valid by construction (Gibbs states,
    /// recomposed decompositions). Checked in debug builds.
    pub(crate) fn from_valid(matrix: CMatrix) -> Self {
        debug_assert!(Self::new(matrix.clone()).is_ok());
        let dim = matrix.nrows();
        Self { dim, matrix }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Tensor product with another state.
    pub fn tensor(&self, other: &MixedState) -> MixedState {
        MixedState::from_valid(self.matrix.kronecker(&other.matrix))
    }
}

/// One spectral block: eigenvalue, multiplicity, and an orthonormal frame
/// whose columns span the eigenspace.
#[derive(Clone, Debug)]
pub struct Block {
    probability: f64,
    rank: usize,
    frame: CMatrix,
}

impl Block {
    pub fn probability(&self) -> f64 {
        self.probability
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn frame(&self) -> &CMatrix {
        &self.frame
    }

    /// Projector onto the block eigenspace, `w w†`.
    pub fn projector(&self) -> CMatrix {
        &self.frame * self.frame.adjoint()
    }
}

/// Typed spectral decomposition: blocks in strictly decreasing eigenvalue
/// order plus the rank of the kernel (eigenvalue-zero subspace).
#[derive(Clone, Debug)]
pub struct TypedDecomposition {
    dim: usize,
    blocks: Vec<Block>,
    kernel_rank: usize,
}

impl TypedDecomposition {
    /// Build and validate a decomposition from `(probability, frame)` pairs
    /// given in strictly decreasing probability order.
    pub fn new(dim: usize, parts: Vec<(f64, CMatrix)>) -> Result<Self, StateError> {
        if parts.is_empty() {
            return Err(StateError::InvalidDecomposition(
                "at least one block is required".into(),
            ));
        }
        let mut blocks = Vec::with_capacity(parts.len());
        let mut total_rank = 0usize;
        let mut weighted = 0.0;
        for (i, (p, frame)) in parts.into_iter().enumerate() {
            if !p.is_finite() || p <= 0.0 {
                return Err(StateError::InvalidDecomposition(format!(
                    "block {i} probability {p} must be positive"
                )));
            }
            if frame.nrows() != dim || frame.ncols() == 0 || frame.ncols() > dim {
                return Err(StateError::InvalidDecomposition(format!(
                    "block {i} frame has shape {}x{}, expected {dim}xr",
                    frame.nrows(),
                    frame.ncols()
                )));
            }
            let rank = frame.ncols();
            let gram = frame.adjoint() * &frame;
            if (gram - CMatrix::identity(rank, rank)).norm() > VALIDATION_TOL * (1.0 + dim as f64) {
                return Err(StateError::InvalidDecomposition(format!(
                    "block {i} frame is not orthonormal"
                )));
            }
            total_rank += rank;
            weighted += p * rank as f64;
            blocks.push(Block {
                probability: p,
                rank,
                frame,
            });
        }
        for w in blocks.windows(2) {
            if w[0].probability <= w[1].probability {
                return Err(StateError::InvalidDecomposition(
                    "block probabilities must be strictly decreasing".into(),
                ));
            }
        }
        for i in 0..blocks.len() {
            for j in (i + 1)..blocks.len() {
                let cross = blocks[i].frame.adjoint() * &blocks[j].frame;
                if cross.norm() > VALIDATION_TOL * (1.0 + dim as f64) {
                    return Err(StateError::InvalidDecomposition(format!(
                        "blocks {i} and {j} are not cross-orthogonal"
                    )));
                }
            }
        }
        if total_rank > dim {
            return Err(StateError::InvalidDecomposition(format!(
                "total rank {total_rank} exceeds dimension {dim}"
            )));
        }
        if (weighted - 1.0).abs() > VALIDATION_TOL {
            return Err(StateError::InvalidDecomposition(format!(
                "sum of rank-weighted probabilities is {weighted}, expected 1"
            )));
        }
        Ok(Self {
            dim,
            blocks,
            kernel_rank: dim - total_rank,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn kernel_rank(&self) -> usize {
        self.kernel_rank
    }

    /// Block ranks in decomposition order (strictly decreasing eigenvalue).
    pub fn type_signature(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.rank).collect()
    }

    /// Block ranks sorted ascending, the conventional type tuple.
    pub fn tau(&self) -> Vec<usize> {
        let mut t = self.type_signature();
        t.sort_unstable();
        t
    }

    /// Two decompositions have the same type when their dimensions agree and
    /// the rank sequences match block by block in eigenvalue order.
    pub fn same_type_as(&self, other: &TypedDecomposition) -> bool {
        self.dim == other.dim && self.type_signature() == other.type_signature()
    }
}

/// Typed spectral decomposition of a density matrix.
///
/// Eigenvalues below `eps_zero` go to the kernel. The rest are clustered by
/// single linkage on the sorted spectrum: an adjacent gap below
/// `eps_deg * (spectral range)` merges, a gap past twice that splits, and a
/// gap inside the band between the two is reported as ambiguous rather than
/// silently resolved.
pub fn decompose(
    rho: &MixedState,
    eps_deg: f64,
    eps_zero: f64,
) -> Result<TypedDecomposition, StateError> {
    assert!(eps_deg > 0.0 && eps_zero > 0.0, "tolerances must be positive");
    let eig = numerics::eigh(rho.matrix())?;
    let n = rho.dim();
    let spectral_range = eig.eigenvalues[n - 1] - eig.eigenvalues[0];

    // Ascending indices of non-kernel eigenvalues.
    let nonzero: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] >= eps_zero).collect();
    if nonzero.is_empty() {
        return Err(StateError::InvalidDecomposition(
            "all eigenvalues fall in the kernel".into(),
        ));
    }

    // Cluster boundaries over the ascending non-kernel spectrum.
    let mut clusters: Vec<Vec<usize>> = vec![vec![nonzero[0]]];
    if spectral_range > eps_zero {
        let merge_below = eps_deg * spectral_range;
        let ambiguous_below = 2.0 * eps_deg * spectral_range;
        for pair in nonzero.windows(2) {
            let gap = eig.eigenvalues[pair[1]] - eig.eigenvalues[pair[0]];
            if gap < merge_below {
                clusters.last_mut().unwrap().push(pair[1]);
            } else if gap < ambiguous_below {
                return Err(StateError::AmbiguousClustering {
                    gap: gap / spectral_range,
                    lo: eps_deg,
                    hi: 2.0 * eps_deg,
                });
            } else {
                clusters.push(vec![pair[1]]);
            }
        }
    } else {
        // Degenerate spectrum (e.g. the maximally mixed state): one block.
        clusters[0].extend_from_slice(&nonzero[1..]);
    }

    // Descending eigenvalue order, mean eigenvalue per cluster.
    let mut parts = Vec::with_capacity(clusters.len());
    for cluster in clusters.iter().rev() {
        let p = cluster.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / cluster.len() as f64;
        let frame = CMatrix::from_fn(n, cluster.len(), |r, c| eig.eigenvectors[(r, cluster[c])]);
        parts.push((p, frame));
    }
    TypedDecomposition::new(n, parts)
}

/// Thermal (Gibbs) state `exp(-beta H)/Tr exp(-beta H)`.
///
/// Computed in the eigenbasis with the largest exponent shifted to zero, so
/// arbitrarily large `beta * spectral spread` cannot overflow.
pub fn gibbs(hamiltonian: &CMatrix, beta: f64) -> Result<MixedState, StateError> {
    assert!(beta.is_finite() && beta >= 0.0, "beta must be finite and nonnegative");
    let eig = numerics::eigh(hamiltonian)?;
    let n = hamiltonian.nrows();
    let exponents: Vec<f64> = eig.eigenvalues.iter().map(|&e| -beta * e).collect();
    let shift = exponents.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = exponents.iter().map(|&e| (e - shift).exp()).collect();
    let z: f64 = weights.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|&w| w / z).collect();
    let v = &eig.eigenvectors;
    let matrix = CMatrix::from_fn(n, n, |r, c| {
        (0..n)
            .map(|k| v[(r, k)] * probs[k] * v[(c, k)].conj())
            .sum::<Complex64>()
    });
    Ok(MixedState::from_valid(matrix))
}

/// Reassemble the density matrix `sum_i p_i w_i w_i†`.
pub fn compose(decomposition: &TypedDecomposition) -> MixedState {
    let n = decomposition.dim();
    let mut matrix = CMatrix::zeros(n, n);
    for block in decomposition.blocks() {
        matrix += block.projector().scale(block.probability());
    }
    MixedState::from_valid(matrix)
}
