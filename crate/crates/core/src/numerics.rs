//! Dense small-matrix complex linear algebra and overflow-safe thermal
//! scalar kernels used by every other module.
//!
//! Matrices are `nalgebra` dynamic matrices over `Complex64`; nothing here is
//! tuned for dimensions beyond a few dozen.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

/// Dense complex matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex vector.
pub type CVector = DVector<Complex64>;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("matrix is not Hermitian: asymmetry {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },
    #[error("matrix contains non-finite entries")]
    NonFinite,
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted ascending; column `j` of `eigenvectors` pairs with
/// `eigenvalues[j]` and the columns are orthonormal.
#[derive(Clone, Debug)]
pub struct EighResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

/// Singular value decomposition `a = u * diag(s) * v†`.
///
/// Singular values are sorted descending; `u` and `v` carry `min(m, n)`
/// orthonormal columns each and are completed to full unitaries when `a` is
/// square.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

pub fn all_finite(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Frobenius norm of the anti-Hermitian part residual `‖A − A†‖_F`.
pub fn hermiticity_residual(a: &CMatrix) -> f64 {
    (a - a.adjoint()).norm()
}

/// Hermitian eigendecomposition with ascending eigenvalues.
///
/// The input is checked Hermitian within `1e-10 * (1 + ‖H‖_F)` and
/// symmetrized before being handed to the dense solver, so the reconstruction
/// residual `‖H − VΛV†‖_F` stays below `1e-12 * (1 + ‖H‖_F)`.
pub fn eigh(h: &CMatrix) -> Result<EighResult, NumericsError> {
    if !all_finite(h) {
        return Err(NumericsError::NonFinite);
    }
    let n = h.nrows();
    assert_eq!(n, h.ncols(), "eigh requires a square matrix");
    let tol = 1e-10 * (1.0 + h.norm());
    let residual = hermiticity_residual(h);
    if residual > tol {
        return Err(NumericsError::NotHermitian { residual, tol });
    }
    let sym = (h + h.adjoint()).scale(0.5);
    let se = nalgebra::SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| se.eigenvectors[(r, order[c])]);
    Ok(EighResult {
        eigenvalues,
        eigenvectors,
    })
}

/// One-sided Jacobi SVD.
///
/// Columns of a working copy are orthogonalized pairwise by right rotations;
/// at convergence the column norms are the singular values. This keeps even
/// tiny singular values at close to full accuracy, which matters for the
/// gauge optima extracted from near-singular block overlaps.
pub fn svd(a: &CMatrix) -> SvdResult {
    assert!(all_finite(a), "svd requires finite entries");
    let (m, n) = a.shape();
    if m < n {
        let t = svd(&a.adjoint());
        return SvdResult {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        };
    }
    let mut b = a.clone();
    let mut v = CMatrix::identity(n, n);
    let eps = 1e-15_f64;
    for _sweep in 0..64 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = Complex64::new(0.0, 0.0);
                for r in 0..m {
                    let x = b[(r, p)];
                    let y = b[(r, q)];
                    app += x.norm_sqr();
                    aqq += y.norm_sqr();
                    apq += x.conj() * y;
                }
                let g = apq.norm();
                if app == 0.0 || aqq == 0.0 || g <= eps * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = apq.unscale(g); // e^{i φ}
                let zeta = (aqq - app) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // Right rotation diag(1, e^{-iφ}) · [[c, s], [-s, c]].
                let cp = Complex64::new(c, 0.0);
                let sp = Complex64::new(s, 0.0);
                let e = phase.conj();
                for r in 0..m {
                    let x = b[(r, p)];
                    let y = b[(r, q)] * e;
                    b[(r, p)] = cp * x - sp * y;
                    b[(r, q)] = sp * x + cp * y;
                }
                for r in 0..n {
                    let x = v[(r, p)];
                    let y = v[(r, q)] * e;
                    v[(r, p)] = cp * x - sp * y;
                    v[(r, q)] = sp * x + cp * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(f64, usize)> = (0..n)
        .map(|j| (b.column(j).norm(), j))
        .collect();
    order.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let sigma_max = order.first().map(|x| x.0).unwrap_or(0.0);
    let singular_values: Vec<f64> = order.iter().map(|x| x.0).collect();
    let mut u = CMatrix::zeros(m, n);
    let mut needs_completion = Vec::new();
    for (col, &(sigma, j)) in order.iter().enumerate() {
        if sigma > sigma_max * 1e-13 && sigma > 0.0 {
            let scaled = b.column(j).unscale(sigma);
            u.set_column(col, &scaled);
        } else {
            needs_completion.push(col);
        }
    }
    for col in needs_completion {
        u.set_column(col, &orthogonal_completion(&u, m, col));
    }
    let v_sorted = CMatrix::from_fn(n, n, |r, c| v[(r, order[c].1)]);
    SvdResult {
        u,
        singular_values,
        v: v_sorted,
    }
}

/// Gram-Schmidt a standard basis vector against the filled columns of `u`.
fn orthogonal_completion(u: &CMatrix, dim: usize, upto_excluding: usize) -> CVector {
    for cand in 0..dim {
        let mut vec = CVector::zeros(dim);
        vec[cand] = Complex64::new(1.0, 0.0);
        for c in 0..u.ncols() {
            if c == upto_excluding {
                continue;
            }
            let col = u.column(c);
            if col.norm() < 0.5 {
                continue; // not yet filled
            }
            let overlap = col.dotc(&vec);
            vec -= col * overlap;
        }
        let norm = vec.norm();
        if norm > 0.3 {
            return vec.unscale(norm);
        }
    }
    unreachable!("orthogonal completion always exists for column-deficient u")
}

/// Nuclear (trace) norm: the sum of singular values.
pub fn nuclear_norm(a: &CMatrix) -> f64 {
    svd(a).singular_values.iter().sum()
}

/// Closed-form gauge optimum: returns `(‖A‖_*, G)` with `G` unitary such that
/// `Re Tr(A G) = ‖A‖_*`, namely `G = V U†` from `A = U Σ V†`.
pub fn max_overlap_unitary(a: &CMatrix) -> (f64, CMatrix) {
    assert_eq!(a.nrows(), a.ncols(), "gauge optimum needs a square block");
    let s = svd(a);
    let nuclear = s.singular_values.iter().sum();
    let g = &s.v * s.u.adjoint();
    (nuclear, g)
}

/// Overflow-safe evaluation of `1/(cosh x + 1)` and `cosh x/(cosh x + 1)`.
///
/// Uses `1/(cosh x + 1) = 2 e^{-x}/(1 + e^{-x})^2` and
/// `cosh x/(cosh x + 1) = (1 + e^{-2x})/(1 + e^{-x})^2`, finite for every
/// finite `x >= 0`.
pub fn thermal_factors(x: f64) -> (f64, f64) {
    debug_assert!(x >= 0.0, "thermal_factors takes |beta * E|");
    let e = (-x).exp();
    let d = (1.0 + e) * (1.0 + e);
    (2.0 * e / d, (1.0 + e * e) / d)
}

/// Overflow-safe `sech x = 1/cosh x`.
pub fn sech(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

/// Compensated accumulator (Kahan-Babuška/Neumaier variant) for
/// deterministic fixed-order reductions.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller; rejects u = 0 so the log stays finite.
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            let v: f64 = rng.random();
            return (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos();
        }
    }
}

/// Complex Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(standard_normal(rng), standard_normal(rng)).unscale(std::f64::consts::SQRT_2)
    })
}

/// Haar-distributed random unitary via Gram-Schmidt of a Ginibre matrix.
///
/// Modified Gram-Schmidt keeps the R factor's diagonal real and positive,
/// which is exactly the phase convention that makes Q Haar.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = ginibre(rng, n, n);
    let mut q = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut col: CVector = g.column(j).into();
        for i in 0..j {
            let qi = q.column(i);
            let overlap = qi.dotc(&col);
            col -= qi * overlap;
        }
        let norm = col.norm();
        q.set_column(j, &col.unscale(norm));
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        let g = ginibre(rng, n, n);
        (&g + g.adjoint()).scale(0.5)
    }

    #[test]
    fn eigh_diagonal() {
        let h = CMatrix::from_diagonal(&CVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
        ]));
        let r = eigh(&h).unwrap();
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((r.eigenvalues[1] - 2.0).abs() < 1e-14);
        assert!((&r.eigenvectors * r.eigenvectors.adjoint() - CMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn eigh_pauli_x() {
        let h = CMatrix::from_fn(2, 2, |r, c| {
            if r != c {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let r = eigh(&h).unwrap();
        assert!((r.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((r.eigenvalues[1] - 1.0).abs() < 1e-14);
        // eigenvector for -1 is (|0> - |1>)/sqrt(2) up to phase
        let v = r.eigenvectors.column(0);
        let ratio = v[1] / v[0];
        assert!((ratio + Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn eigh_reconstruction_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let h = random_hermitian(&mut rng, 6);
            let r = eigh(&h).unwrap();
            let lam = CMatrix::from_fn(6, 6, |i, j| {
                if i == j {
                    Complex64::new(r.eigenvalues[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let rebuilt = &r.eigenvectors * lam * r.eigenvectors.adjoint();
            assert!((&rebuilt - &h).norm() <= 1e-12 * (1.0 + h.norm()));
            assert!(
                (&r.eigenvectors.adjoint() * &r.eigenvectors - CMatrix::identity(6, 6)).norm()
                    < 1e-12
            );
            // eigenvalue sum equals trace
            let tr: f64 = h.trace().re;
            let sum: f64 = r.eigenvalues.iter().sum();
            assert!((tr - sum).abs() <= 1e-12 * (1.0 + tr.abs()));
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let mut h = CMatrix::identity(3, 3);
        h[(0, 1)] = Complex64::new(0.5, 0.0);
        assert!(matches!(eigh(&h), Err(NumericsError::NotHermitian { .. })));
    }

    #[test]
    fn nuclear_norm_identity_and_rank_one() {
        let id = CMatrix::identity(4, 4);
        assert!((nuclear_norm(&id) - 4.0).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = ginibre(&mut rng, 5, 1);
        let v = ginibre(&mut rng, 3, 1);
        let outer = &u * v.adjoint();
        assert!((nuclear_norm(&outer) - u.norm() * v.norm()).abs() < 1e-12);
    }

    /// Brute-force the variational form of the nuclear norm: the 3x2 input is
    /// zero-padded to a square so that `Re Tr(Â U)` over sampled unitaries is
    /// well defined; the supremum over U(3) is exactly the nuclear norm.
    #[test]
    fn nuclear_norm_matches_sampled_gauge_supremum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = ginibre(&mut rng, 3, 2);
        let padded = CMatrix::from_fn(3, 3, |r, c| {
            if c < 2 {
                a[(r, c)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let nuc = nuclear_norm(&a);
        let objective = |u: &CMatrix| (&padded * u).trace().re;
        let mut best_u = CMatrix::identity(3, 3);
        let mut best = objective(&best_u);
        for _ in 0..10_000 {
            let u = haar_unitary(&mut rng, 3);
            let val = objective(&u);
            assert!(val <= nuc + 1e-12, "sample exceeded the nuclear norm");
            if val > best {
                best = val;
                best_u = u;
            }
        }
        // Hill climb from the best sample: perturb and retract to the nearest
        // unitary (polar projection).
        let mut step = 0.3;
        while step > 1e-9 {
            let mut stalled = 0;
            while stalled < 15 {
                let perturbed = &best_u + ginibre(&mut rng, 3, 3).scale(step);
                let s = svd(&perturbed);
                let candidate = &s.u * s.v.adjoint();
                let val = objective(&candidate);
                if val > best {
                    assert!(val <= nuc + 1e-12);
                    best = val;
                    best_u = candidate;
                    stalled = 0;
                } else {
                    stalled += 1;
                }
            }
            step *= 0.5;
        }
        assert!((best - nuc).abs() < 1e-3, "refined sampling reached {best}, nuclear norm {nuc}");
        let (closed, g) = max_overlap_unitary(&padded);
        assert!((closed - nuc).abs() < 1e-12);
        assert!((objective(&g) - nuc).abs() < 1e-12);
    }

    #[test]
    fn svd_reconstructs_and_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (m, n) in [(4, 4), (5, 3), (3, 5), (6, 2)] {
            let a = ginibre(&mut rng, m, n);
            let s = svd(&a);
            let k = s.singular_values.len();
            let sig = CMatrix::from_fn(k, k, |i, j| {
                if i == j {
                    Complex64::new(s.singular_values[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let rebuilt = &s.u * sig * s.v.adjoint();
            assert!((&rebuilt - &a).norm() < 1e-12 * (1.0 + a.norm()));
            assert!((&s.u.adjoint() * &s.u - CMatrix::identity(k, k)).norm() < 1e-12);
            assert!((&s.v.adjoint() * &s.v - CMatrix::identity(k, k)).norm() < 1e-12);
            for w in s.singular_values.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn svd_handles_rank_deficiency() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = ginibre(&mut rng, 4, 1);
        let v = ginibre(&mut rng, 4, 1);
        let a = &u * v.adjoint(); // rank 1, 4x4
        let s = svd(&a);
        assert!(s.singular_values[1] < 1e-12 * s.singular_values[0]);
        // u must still be unitary thanks to completion
        assert!((&s.u.adjoint() * &s.u - CMatrix::identity(4, 4)).norm() < 1e-10);
        let (nuc, g) = max_overlap_unitary(&a);
        assert!((&g * g.adjoint() - CMatrix::identity(4, 4)).norm() < 1e-10);
        assert!(((&a * &g).trace().re - nuc).abs() < 1e-10);
    }

    #[test]
    fn thermal_factors_limits() {
        let (inv, ratio) = thermal_factors(0.0);
        assert_eq!(inv, 0.5);
        assert_eq!(ratio, 0.5);

        let (inv, ratio) = thermal_factors(1000.0);
        assert!(inv.is_finite() && ratio.is_finite());
        assert!(inv >= 0.0 && inv < 1e-300);
        assert!((ratio - 1.0).abs() < 1e-15);
    }

    #[test]
    fn thermal_factors_match_naive_in_safe_range() {
        for &x in &[0.1, 0.5, 1.0, 3.0, 10.0, 50.0] {
            let (inv, ratio) = thermal_factors(x);
            let c = x.cosh();
            assert!((inv - 1.0 / (c + 1.0)).abs() <= 1e-15 * (1.0 / (c + 1.0)));
            assert!((ratio - c / (c + 1.0)).abs() <= 1e-15);
        }
    }

    #[test]
    fn thermal_factors_sum_to_one() {
        let mut x = 1e-8;
        while x < 1e6 {
            let (inv, ratio) = thermal_factors(x);
            assert!((inv + ratio - 1.0).abs() <= 1e-15);
            x *= 3.7;
        }
    }

    #[test]
    fn sandwich_inequality() {
        // (1/2) sech x < 1/(cosh x + 1) < sech x, strict for x > 0. The grid
        // stops near x = 30: beyond that the two sides agree to the last bit.
        let mut x = 1e-6;
        while x < 30.0 {
            let (inv, _) = thermal_factors(x);
            let s = sech(x);
            assert!(0.5 * s < inv, "lower bound failed at x={x}");
            assert!(inv < s, "upper bound failed at x={x}");
            x *= 2.3;
        }
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [1, 2, 4] {
            let u = haar_unitary(&mut rng, n);
            assert!((&u.adjoint() * &u - CMatrix::identity(n, n)).norm() < 1e-12);
        }
    }

    #[test]
    fn kahan_sum_is_exact_for_cancellation() {
        let mut k = KahanSum::new();
        let large = 1e100;
        for x in [1.0, large, 1.0, -large] {
            k.add(x);
        }
        assert_eq!(k.value(), 2.0);
    }
}
