//! Distances and Riemannian metrics on spaces of fixed-type density matrices.
//!
//! A point of the total space pairs each distinct eigenvalue with an
//! orthonormal frame spanning its eigenspace; the block gauge group
//! `U(r_1) x ... x U(r_k)` acts on the frames from the right. The Hermitian
//! form on such points induces a distance upstairs, and taking the gauge
//! infimum per block (a nuclear norm, in closed form) produces the
//! interferometric distance downstairs. Finite-difference evaluators recover
//! the metric from curves of density matrices; a sampling oracle keeps the
//! closed-form infimum honest.

use crate::numerics::{self, CMatrix, CVector};
use crate::states::{self, MixedState, StateError, TypedDecomposition};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("type mismatch: left has blocks {left:?} (dim {left_dim}), right has {right:?} (dim {right_dim})")]
    TypeMismatch {
        left: Vec<usize>,
        left_dim: usize,
        right: Vec<usize>,
        right_dim: usize,
    },
    #[error("matrix is not tangent to the frame: residual {residual:.3e}")]
    NotTangent { residual: f64 },
    #[error("decomposition type changed across the finite-difference stencil")]
    TypeChanged,
    #[error("eigenvalue ordering changed across the stencil; reduce the step")]
    StepTooLarge,
    #[error("quantum trace has imaginary residue {residual:.3e} above 1e-10")]
    ImaginaryResidue { residual: f64 },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Numerics(#[from] numerics::NumericsError),
}

/// A point of the fixed-type bundle: `(p_i, w_i)` pairs rather than the
/// equivalence class they project to.
#[derive(Clone, Debug)]
pub struct BundlePoint {
    inner: TypedDecomposition,
}

impl BundlePoint {
    pub fn new(dim: usize, parts: Vec<(f64, CMatrix)>) -> Result<Self, GeometryError> {
        Ok(Self {
            inner: TypedDecomposition::new(dim, parts)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn decomposition(&self) -> &TypedDecomposition {
        &self.inner
    }

    pub fn type_signature(&self) -> Vec<usize> {
        self.inner.type_signature()
    }

    pub fn same_type_as(&self, other: &BundlePoint) -> bool {
        self.inner.same_type_as(&other.inner)
    }

    /// Right gauge action: `w_i -> w_i U_i`, one unitary per block.
    pub fn apply_gauge(&self, gauges: &[CMatrix]) -> BundlePoint {
        assert_eq!(gauges.len(), self.inner.blocks().len());
        let parts = self
            .inner
            .blocks()
            .iter()
            .zip(gauges)
            .map(|(b, u)| (b.probability(), b.frame() * u))
            .collect();
        BundlePoint::new(self.dim(), parts).expect("gauge action preserves validity")
    }
}

impl From<TypedDecomposition> for BundlePoint {
    fn from(inner: TypedDecomposition) -> Self {
        Self { inner }
    }
}

impl From<&TypedDecomposition> for BundlePoint {
    fn from(inner: &TypedDecomposition) -> Self {
        Self {
            inner: inner.clone(),
        }
    }
}

/// Classical/quantum split of a metric evaluation; `total` is their sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricValue {
    pub classical: f64,
    pub quantum: f64,
    pub total: f64,
}

impl MetricValue {
    pub fn new(classical: f64, quantum: f64) -> Self {
        Self {
            classical,
            quantum,
            total: classical + quantum,
        }
    }
}

fn type_mismatch(p: &BundlePoint, q: &BundlePoint) -> GeometryError {
    GeometryError::TypeMismatch {
        left: p.type_signature(),
        left_dim: p.dim(),
        right: q.type_signature(),
        right_dim: q.dim(),
    }
}

fn decomposition_mismatch(p: &TypedDecomposition, q: &TypedDecomposition) -> GeometryError {
    GeometryError::TypeMismatch {
        left: p.type_signature(),
        left_dim: p.dim(),
        right: q.type_signature(),
        right_dim: q.dim(),
    }
}

/// `Tr(a† b)` without forming the product matrix.
fn overlap_trace(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Hermitian form `sum_i sqrt(p_i q_i) Tr(w_i† v_i)` between same-type points.
pub fn hermitian_form(p: &BundlePoint, q: &BundlePoint) -> Result<Complex64, GeometryError> {
    if !p.same_type_as(q) {
        return Err(type_mismatch(p, q));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (bp, bq) in p.inner.blocks().iter().zip(q.inner.blocks()) {
        let weight = (bp.probability() * bq.probability()).sqrt();
        acc += overlap_trace(bp.frame(), bq.frame()) * weight;
    }
    Ok(acc)
}

fn clamped_sqrt_distance(one_minus_re: f64) -> f64 {
    // Guard tiny negative radicands from roundoff near coincident points.
    (2.0 * one_minus_re).max(0.0).sqrt()
}

/// Distance on the total space: `sqrt(2 (1 - Re <p, q>))`.
pub fn dist_total(p: &BundlePoint, q: &BundlePoint) -> Result<f64, GeometryError> {
    let form = hermitian_form(p, q)?;
    Ok(clamped_sqrt_distance(1.0 - form.re))
}

/// Generalized purification of a bundle point as one flat vector.
///
/// Each block's frame is scaled by `sqrt(p_i)` and placed in its own slot of
/// a fixed orthonormal ancilla basis, indexed by `ancilla[i]` (a permutation
/// of `0..k`). Inner products of these vectors reproduce the Hermitian form.
pub fn purification_vector(p: &BundlePoint, ancilla: &[usize]) -> CVector {
    let blocks = p.inner.blocks();
    let k = blocks.len();
    assert_eq!(ancilla.len(), k, "one ancilla index per block");
    let dim = p.dim();
    let frame_len: usize = blocks.iter().map(|b| dim * b.rank()).sum();
    let mut vec = CVector::zeros(frame_len * k);
    let mut offset = 0usize;
    for (block, &slot) in blocks.iter().zip(ancilla) {
        assert!(slot < k, "ancilla index out of range");
        let weight = block.probability().sqrt();
        for (entry_idx, entry) in block.frame().iter().enumerate() {
            vec[(offset + entry_idx) * k + slot] = entry * weight;
        }
        offset += dim * block.rank();
    }
    vec
}

/// Inner product of generalized purifications; equals `hermitian_form` up to
/// rounding.
pub fn purification_inner(p: &BundlePoint, q: &BundlePoint) -> Result<Complex64, GeometryError> {
    if !p.same_type_as(q) {
        return Err(type_mismatch(p, q));
    }
    let k = p.inner.blocks().len();
    let ancilla: Vec<usize> = (0..k).collect();
    let vp = purification_vector(p, &ancilla);
    let vq = purification_vector(q, &ancilla);
    Ok(vp.dotc(&vq))
}

const TANGENT_TOL: f64 = 1e-10;

fn tangency_residual(frame: &CMatrix, tangent: &CMatrix) -> f64 {
    (frame.adjoint() * tangent + tangent.adjoint() * frame).norm()
}

/// Projection of a tangent `v` at frame `w` onto the vertical (fiber)
/// subspace: `w w† v`.
pub fn vertical_project(frame: &CMatrix, tangent: &CMatrix) -> Result<CMatrix, GeometryError> {
    let residual = tangency_residual(frame, tangent);
    if residual > TANGENT_TOL * (1.0 + tangent.norm()) {
        return Err(GeometryError::NotTangent { residual });
    }
    Ok(frame * (frame.adjoint() * tangent))
}

/// Horizontal projection `v - w w† v`; the result satisfies `w† v_H = 0`.
pub fn horizontal_project(frame: &CMatrix, tangent: &CMatrix) -> Result<CMatrix, GeometryError> {
    Ok(tangent - vertical_project(frame, tangent)?)
}

/// Interferometric distance on the base space.
///
/// Blocks of the two states are paired in descending eigenvalue order; the
/// gauge infimum is taken per block in closed form:
/// `sup_{U in U(r)} Re Tr(A U) = ‖A‖_nuclear` for `A = w_i† v_i`.
pub fn dist_base(
    rho: &MixedState,
    sigma: &MixedState,
    eps_deg: f64,
    eps_zero: f64,
) -> Result<f64, GeometryError> {
    let dp = states::decompose(rho, eps_deg, eps_zero)?;
    let dq = states::decompose(sigma, eps_deg, eps_zero)?;
    dist_base_decomposed(&dp, &dq)
}

pub(crate) fn dist_base_decomposed(
    dp: &TypedDecomposition,
    dq: &TypedDecomposition,
) -> Result<f64, GeometryError> {
    if !dp.same_type_as(dq) {
        return Err(decomposition_mismatch(dp, dq));
    }
    let mut acc = 0.0;
    for (bp, bq) in dp.blocks().iter().zip(dq.blocks()) {
        let weight = (bp.probability() * bq.probability()).sqrt();
        let block_overlap = bp.frame().adjoint() * bq.frame();
        acc += weight * numerics::nuclear_norm(&block_overlap);
    }
    Ok(clamped_sqrt_distance(1.0 - acc))
}

/// Exponential of an anti-Hermitian matrix (exactly unitary up to rounding).
fn unitary_exp(anti_hermitian: &CMatrix) -> CMatrix {
    let n = anti_hermitian.nrows();
    let herm = anti_hermitian.map(|z| z * Complex64::new(0.0, 1.0));
    let eig = numerics::eigh(&herm).expect("i*K is Hermitian for anti-Hermitian K");
    let v = &eig.eigenvectors;
    CMatrix::from_fn(n, n, |r, c| {
        (0..n)
            .map(|k| {
                let phase = Complex64::from_polar(1.0, -eig.eigenvalues[k]);
                v[(r, k)] * phase * v[(c, k)].conj()
            })
            .sum()
    })
}

fn random_anti_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = numerics::ginibre(rng, n, n);
    let k = (&g - g.adjoint()).scale(0.5);
    let norm = k.norm();
    if norm > 0.0 {
        k.unscale(norm)
    } else {
        k
    }
}

/// Sampling oracle for the gauge infimum behind `dist_base`.
///
/// Per block, `Re Tr(A U)` is maximized over Haar-random unitaries followed by
/// a hill climb with geometrically shrinking steps. The result can only
/// overestimate the distance, approaching `dist_base` from above.
pub fn dist_base_bruteforce(
    rho: &MixedState,
    sigma: &MixedState,
    samples: usize,
    seed: u64,
) -> Result<f64, GeometryError> {
    let dp = states::decompose(rho, states::DEFAULT_EPS_DEG, states::DEFAULT_EPS_ZERO)?;
    let dq = states::decompose(sigma, states::DEFAULT_EPS_DEG, states::DEFAULT_EPS_ZERO)?;
    if !dp.same_type_as(&dq) {
        return Err(decomposition_mismatch(&dp, &dq));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = 0.0;
    for (bp, bq) in dp.blocks().iter().zip(dq.blocks()) {
        let weight = (bp.probability() * bq.probability()).sqrt();
        let a = bp.frame().adjoint() * bq.frame();
        let r = a.ncols();
        let objective = |u: &CMatrix| (&a * u).trace().re;

        let mut best_u = CMatrix::identity(r, r);
        let mut best = objective(&best_u);
        for _ in 0..samples {
            let u = numerics::haar_unitary(&mut rng, r);
            let val = objective(&u);
            if val > best {
                best = val;
                best_u = u;
            }
        }
        // Local refinement: random unitary steps with shrinking magnitude.
        let mut step = 0.25;
        while step > 1e-7 {
            let mut stalled = 0;
            while stalled < 20 {
                let direction = random_anti_hermitian(&mut rng, r);
                let proposal = &best_u * unitary_exp(&direction.scale(step));
                let val = objective(&proposal);
                if val > best {
                    best = val;
                    best_u = proposal;
                    stalled = 0;
                } else {
                    stalled += 1;
                }
            }
            step *= 0.5;
        }
        acc += weight * best;
    }
    Ok(clamped_sqrt_distance(1.0 - acc))
}

struct Stencil {
    minus: TypedDecomposition,
    center: TypedDecomposition,
    plus: TypedDecomposition,
}

fn decompose_stencil<F>(curve: F, t0: f64, delta: f64) -> Result<Stencil, GeometryError>
where
    F: Fn(f64) -> MixedState,
{
    assert!(delta > 0.0, "finite-difference step must be positive");
    let minus = states::decompose(
        &curve(t0 - delta),
        states::DEFAULT_EPS_DEG,
        states::DEFAULT_EPS_ZERO,
    )?;
    let center = states::decompose(&curve(t0), states::DEFAULT_EPS_DEG, states::DEFAULT_EPS_ZERO)?;
    let plus = states::decompose(
        &curve(t0 + delta),
        states::DEFAULT_EPS_DEG,
        states::DEFAULT_EPS_ZERO,
    )?;
    if !center.same_type_as(&minus) || !center.same_type_as(&plus) {
        return Err(GeometryError::TypeChanged);
    }
    // If an eigenvalue branch crossing swapped the descending order inside the
    // stencil, paired projectors stop overlapping; reject rather than pair
    // the wrong branches.
    for (i, block) in center.blocks().iter().enumerate() {
        let p0 = block.projector();
        for side in [&minus, &plus] {
            let overlap = (&p0 * side.blocks()[i].projector()).trace().re;
            if overlap < block.rank() as f64 - 0.5 {
                return Err(GeometryError::StepTooLarge);
            }
        }
    }
    Ok(Stencil {
        minus,
        center,
        plus,
    })
}

/// Interferometric metric coefficient of a curve at `t0` by second-order
/// central differences.
///
/// Classical part `(1/4) sum_i r_i (dp_i/dt)^2 / p_i`, quantum part
/// `sum_i p_i Tr(P_i dP_i dP_i)`; the quantum trace must be real to 1e-10.
pub fn interferometric_metric_fd<F>(
    curve: F,
    t0: f64,
    delta: f64,
) -> Result<MetricValue, GeometryError>
where
    F: Fn(f64) -> MixedState,
{
    let stencil = decompose_stencil(curve, t0, delta)?;
    let two_delta = 2.0 * delta;
    let mut classical = 0.0;
    let mut quantum = 0.0;
    for (i, block) in stencil.center.blocks().iter().enumerate() {
        let p_dot = (stencil.plus.blocks()[i].probability()
            - stencil.minus.blocks()[i].probability())
            / two_delta;
        classical += 0.25 * block.rank() as f64 * p_dot * p_dot / block.probability();

        let p_dot_matrix = (stencil.plus.blocks()[i].projector()
            - stencil.minus.blocks()[i].projector())
        .unscale(two_delta);
        let trace = (block.projector() * &p_dot_matrix * &p_dot_matrix).trace();
        if trace.im.abs() > 1e-10 {
            return Err(GeometryError::ImaginaryResidue {
                residual: trace.im.abs(),
            });
        }
        quantum += block.probability() * trace.re;
    }
    Ok(MetricValue::new(classical, quantum))
}

/// Bures metric coefficient of a curve at `t0` by central differences.
///
/// Standard spectral formula `(1/2) sum_{j,l} |<j| drho |l>|^2 / (λ_j + λ_l)`
/// over eigenpairs with `λ_j + λ_l` above the kernel threshold. Used as the
/// cross-check route against closed-form pullbacks.
pub fn bures_metric_fd<F>(curve: F, t0: f64, delta: f64) -> Result<f64, GeometryError>
where
    F: Fn(f64) -> MixedState,
{
    // Same stencil guards as the interferometric evaluator.
    let _ = decompose_stencil(&curve, t0, delta)?;
    let rho0 = curve(t0);
    let eig = numerics::eigh(rho0.matrix())?;
    let rho_dot = (curve(t0 + delta).matrix() - curve(t0 - delta).matrix()).unscale(2.0 * delta);
    let in_eigenbasis = eig.eigenvectors.adjoint() * rho_dot * &eig.eigenvectors;
    let n = rho0.dim();
    let mut acc = 0.0;
    for j in 0..n {
        for l in 0..n {
            let denom = eig.eigenvalues[j] + eig.eigenvalues[l];
            if denom > states::DEFAULT_EPS_ZERO {
                acc += in_eigenbasis[(j, l)].norm_sqr() / denom;
            }
        }
    }
    Ok(0.5 * acc)
}
