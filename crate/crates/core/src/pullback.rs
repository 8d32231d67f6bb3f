//! Closed-form pullback integrands of the interferometric, Bures, and
//! Fubini-Study metrics along the band parameter of a thermal two-band
//! insulator, Brillouin-zone quadrature, the lattice Chern number, the
//! per-momentum Fock-space oracle, and `(M, T)` scans.
//!
//! All quadrature is plain midpoint with fixed-order compensated summation,
//! so scans are reproducible bit for bit regardless of thread count. The
//! near-singular ridge at a gap closing is the object of study; nothing here
//! adapts the grid around it.

use crate::bandmodels::{self, BlochPoint, TwoBandModel};
use crate::geometry::{self, GeometryError, MetricValue};
use crate::numerics::{self, KahanSum};
use crate::states;
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PullbackError {
    #[error("model is gapless on the grid at M = {m}: |d| = {energy:.3e} at k = {k:?}")]
    GaplessParameter { m: f64, k: Vec<f64>, energy: f64 },
    #[error("lattice field strength did not sum to an integer (got {value})")]
    NonIntegerChern { value: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// One `(M, T)` cell of a scan.
#[derive(Clone, Debug)]
pub struct MetricSample {
    pub m: f64,
    pub t: f64,
    pub g_interf: MetricValue,
    pub g_bures: MetricValue,
    pub g_fs: f64,
    pub bz_grid: usize,
    pub gapless_cells: usize,
}

/// Per-point integrand components shared by the three metrics. The classical
/// part is common to the interferometric and Bures pullbacks; they differ
/// only in the thermal weight multiplying `|∂n/∂M|^2`.
#[derive(Clone, Copy, Debug)]
pub struct IntegrandParts {
    pub classical: f64,
    pub interf_quantum: f64,
    pub bures_quantum: f64,
    pub fubini_study: f64,
}

pub fn integrand_parts(bp: &BlochPoint, beta: f64) -> IntegrandParts {
    let x = (beta * bp.energy).abs();
    let (inv_cosh_plus_one, cosh_ratio) = numerics::thermal_factors(x);
    let classical = 0.25 * inv_cosh_plus_one * beta * beta * bp.de_dm * bp.de_dm;
    let fubini_study = 0.25 * bp.dn_dm_sq;
    IntegrandParts {
        classical,
        interf_quantum: cosh_ratio * fubini_study,
        bures_quantum: (1.0 - numerics::sech(x)) * fubini_study,
        fubini_study,
    }
}

/// Interferometric pullback integrand
/// `(1/4) [β² (∂E/∂M)² + cosh(βE) |∂n/∂M|²] / (cosh(βE) + 1)`.
pub fn interf_integrand(bp: &BlochPoint, beta: f64) -> f64 {
    let parts = integrand_parts(bp, beta);
    parts.classical + parts.interf_quantum
}

/// Bures pullback integrand
/// `(1/4) [β² (∂E/∂M)² / (cosh(βE) + 1) + (cosh(βE) - 1)/cosh(βE) |∂n/∂M|²]`.
pub fn bures_integrand(bp: &BlochPoint, beta: f64) -> f64 {
    let parts = integrand_parts(bp, beta);
    parts.classical + parts.bures_quantum
}

/// Fubini-Study integrand `(1/4) |∂n/∂M|²` (the common zero-temperature
/// limit at gapped points).
pub fn fubini_study_integrand(bp: &BlochPoint) -> f64 {
    0.25 * bp.dn_dm_sq
}

fn midpoint(n: usize, i: usize) -> f64 {
    -std::f64::consts::PI + 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n as f64
}

fn cell_momentum(n: usize, dim: usize, mut index: usize, k: &mut [f64]) {
    for slot in (0..dim).rev() {
        k[slot] = midpoint(n, index % n);
        index /= n;
    }
}

/// Midpoint quadrature of `f` over `[-π, π)^dim` with the normalized measure
/// `d^dim k / (2π)^dim`.
///
/// Cells where `f` declines to produce a value are excluded from the sum and
/// counted. Cells are evaluated in parallel but reduced in fixed index order
/// with compensated summation, so the result does not depend on thread
/// count.
pub fn bz_integrate<F>(f: F, n: usize, dim: usize) -> (f64, usize)
where
    F: Fn(&[f64]) -> Option<f64> + Sync,
{
    assert!(n >= 2, "grid must have at least two cells per axis");
    assert!((1..=3).contains(&dim));
    let total = n.pow(dim as u32);
    let values: Vec<Option<f64>> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut k = [0.0; 3];
            cell_momentum(n, dim, idx, &mut k[..dim]);
            f(&k[..dim])
        })
        .collect();
    let mut sum = KahanSum::new();
    let mut skipped = 0usize;
    for value in values {
        match value {
            Some(v) => sum.add(v),
            None => skipped += 1,
        }
    }
    (sum.value() / total as f64, skipped)
}

/// Lattice Chern number of the occupied (lower) band by plaquette field
/// strengths of U(1) link variables.
///
/// The plaquette orientation is fixed so that the Dirac model yields +1 on
/// the `M < 0` side of the `M = 0` transition. The result is an exact
/// integer whenever every plaquette phase stays inside `(-π, π)`; a
/// non-integer total is reported as an error rather than rounded away.
pub fn chern_number(model: &TwoBandModel, m: f64, n: usize) -> Result<i64, PullbackError> {
    assert!(n >= 8, "lattice too coarse for a stable field strength");
    assert_eq!(model.spatial_dim(), 2, "lattice Chern number is wired for d = 2");
    let grid: Vec<f64> = (0..n)
        .map(|i| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / n as f64)
        .collect();
    let mut vectors = vec![[Complex64::new(0.0, 0.0); 2]; n * n];
    for (i, &kx) in grid.iter().enumerate() {
        for (j, &ky) in grid.iter().enumerate() {
            let d = model.d_vector(&[kx, ky], m);
            let energy = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            if energy <= bandmodels::DEFAULT_EPS_GAP {
                return Err(PullbackError::GaplessParameter {
                    m,
                    k: vec![kx, ky],
                    energy,
                });
            }
            let nvec = [d[0] / energy, d[1] / energy, d[2] / energy];
            // larger column of the lower-band projector (I - n·σ)/2
            let col = if nvec[2] <= 0.0 {
                [
                    Complex64::new(0.5 * (1.0 - nvec[2]), 0.0),
                    Complex64::new(-0.5 * nvec[0], -0.5 * nvec[1]),
                ]
            } else {
                [
                    Complex64::new(-0.5 * nvec[0], 0.5 * nvec[1]),
                    Complex64::new(0.5 * (1.0 + nvec[2]), 0.0),
                ]
            };
            let norm = (col[0].norm_sqr() + col[1].norm_sqr()).sqrt();
            vectors[i * n + j] = [col[0].unscale(norm), col[1].unscale(norm)];
        }
    }
    let link = |a: &[Complex64; 2], b: &[Complex64; 2]| -> Complex64 {
        let z = a[0].conj() * b[0] + a[1].conj() * b[1];
        z.unscale(z.norm())
    };
    let at = |i: usize, j: usize| &vectors[(i % n) * n + (j % n)];
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            // orientation chosen to match the model's known phase diagram
            let u1 = link(at(i, j), at(i, j + 1));
            let u2 = link(at(i, j + 1), at(i + 1, j + 1));
            let u3 = link(at(i + 1, j), at(i + 1, j + 1));
            let u4 = link(at(i, j), at(i + 1, j));
            total += (u1 * u2 * u3.conj() * u4.conj()).arg();
        }
    }
    let value = total / (2.0 * std::f64::consts::PI);
    let rounded = value.round();
    if (value - rounded).abs() > 1e-6 {
        return Err(PullbackError::NonIntegerChern { value });
    }
    Ok(rounded as i64)
}

/// Metric of the per-momentum 4x4 Fock-space Gibbs family
/// `M -> exp(-β H_Fock(d(k; M)·σ))/Z`, evaluated by finite differences.
///
/// Returns `(interferometric total, Bures)`. The closed-form integrands must
/// reproduce these values; this is the validation route, not the fast path.
pub fn per_momentum_oracle(
    model: &TwoBandModel,
    k: &[f64],
    m: f64,
    beta: f64,
    delta: f64,
) -> Result<(f64, f64), GeometryError> {
    let curve = |mm: f64| {
        let d = model.d_vector(k, mm);
        let h = bandmodels::fock_hamiltonian(&bandmodels::d_dot_sigma(d))
            .expect("d·σ is Hermitian by construction");
        states::gibbs(&h, beta).expect("Gibbs states are valid by construction")
    };
    let interf = geometry::interferometric_metric_fd(curve, m, delta)?;
    let bures = geometry::bures_metric_fd(curve, m, delta)?;
    Ok((interf.total, bures))
}

struct CellGeometry {
    energy: f64,
    de_dm: f64,
    dn_dm_sq: f64,
}

/// Scan the three metric pullbacks over a grid of `(M, T)` cells.
///
/// Output order is M-major, then T. Per-cell Bloch geometry is computed once
/// per M and reused across temperatures; gapless cells are excluded from
/// every integrand and counted per sample.
pub fn metric_scan(
    model: &TwoBandModel,
    m_values: &[f64],
    t_values: &[f64],
    n: usize,
) -> Vec<MetricSample> {
    assert!(!m_values.is_empty() && !t_values.is_empty());
    assert!(t_values.iter().all(|&t| t > 0.0), "temperatures must be positive");
    assert_eq!(model.spatial_dim(), 2, "scans are wired for d = 2");
    let total = n * n;
    let mut samples = Vec::with_capacity(m_values.len() * t_values.len());
    for &m in m_values {
        let cells: Vec<Option<CellGeometry>> = (0..total)
            .into_par_iter()
            .map(|idx| {
                let k = [midpoint(n, idx / n), midpoint(n, idx % n)];
                bandmodels::bloch_point(model, &k, m).ok().map(|bp| CellGeometry {
                    energy: bp.energy,
                    de_dm: bp.de_dm,
                    dn_dm_sq: bp.dn_dm_sq,
                })
            })
            .collect();
        let gapless_cells = cells.iter().filter(|c| c.is_none()).count();
        for &t in t_values {
            let beta = 1.0 / t;
            let mut classical = KahanSum::new();
            let mut interf_quantum = KahanSum::new();
            let mut bures_quantum = KahanSum::new();
            let mut fubini_study = KahanSum::new();
            for cell in cells.iter().flatten() {
                let x = (beta * cell.energy).abs();
                let (inv_cosh_plus_one, cosh_ratio) = numerics::thermal_factors(x);
                let fs = 0.25 * cell.dn_dm_sq;
                classical.add(0.25 * inv_cosh_plus_one * beta * beta * cell.de_dm * cell.de_dm);
                interf_quantum.add(cosh_ratio * fs);
                bures_quantum.add((1.0 - numerics::sech(x)) * fs);
                fubini_study.add(fs);
            }
            let weight = 1.0 / total as f64;
            let classical = classical.value() * weight;
            samples.push(MetricSample {
                m,
                t,
                g_interf: MetricValue::new(classical, interf_quantum.value() * weight),
                g_bures: MetricValue::new(classical, bures_quantum.value() * weight),
                g_fs: fubini_study.value() * weight,
                bz_grid: n,
                gapless_cells,
            });
        }
    }
    samples
}
