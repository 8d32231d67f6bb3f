//! Two-band Bloch Hamiltonian families `h(k; M) = d(k; M) · σ`, their Bloch
//! quantities and parameter derivatives, and the four-dimensional Fock-space
//! lift used by the per-momentum metric oracle.

use crate::numerics::CMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Smallest admissible band gap; cells at or below it are reported, never
/// silently zeroed.
pub const DEFAULT_EPS_GAP: f64 = 1e-12;

const FD_STEP: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("gapless point: |d(k; M)| = {energy:.3e} at k = {k:?}, M = {m}")]
    GaplessPoint { k: Vec<f64>, m: f64, energy: f64 },
    #[error("matrix is not Hermitian")]
    NotHermitian,
}

type DVectorFn = dyn Fn(&[f64], f64) -> [f64; 3] + Send + Sync;

/// A `d`-vector field over the Brillouin zone, parametrized by a band
/// parameter `M`, with (analytic where available) derivative `∂d/∂M`.
pub struct TwoBandModel {
    name: String,
    spatial_dim: usize,
    d: Box<DVectorFn>,
    d_dm: Option<Box<DVectorFn>>,
}

impl TwoBandModel {
    /// Model without an analytic parameter derivative; `d_vector_dm` falls
    /// back to central finite differences.
    pub fn new<F>(name: impl Into<String>, spatial_dim: usize, d: F) -> Self
    where
        F: Fn(&[f64], f64) -> [f64; 3] + Send + Sync + 'static,
    {
        assert!((1..=3).contains(&spatial_dim));
        Self {
            name: name.into(),
            spatial_dim,
            d: Box::new(d),
            d_dm: None,
        }
    }

    /// Attach an analytic `∂d/∂M`.
    pub fn with_mass_derivative<F>(mut self, d_dm: F) -> Self
    where
        F: Fn(&[f64], f64) -> [f64; 3] + Send + Sync + 'static,
    {
        self.d_dm = Some(Box::new(d_dm));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn spatial_dim(&self) -> usize {
        self.spatial_dim
    }

    pub fn d_vector(&self, k: &[f64], m: f64) -> [f64; 3] {
        debug_assert_eq!(k.len(), self.spatial_dim);
        (self.d)(k, m)
    }

    pub fn d_vector_dm(&self, k: &[f64], m: f64) -> [f64; 3] {
        match &self.d_dm {
            Some(f) => f(k, m),
            None => {
                let plus = (self.d)(k, m + FD_STEP);
                let minus = (self.d)(k, m - FD_STEP);
                [
                    (plus[0] - minus[0]) / (2.0 * FD_STEP),
                    (plus[1] - minus[1]) / (2.0 * FD_STEP),
                    (plus[2] - minus[2]) / (2.0 * FD_STEP),
                ]
            }
        }
    }
}

/// The massive Dirac model in two spatial dimensions:
/// `d = (sin kx, sin ky, M - cos kx - cos ky)`.
pub fn dirac_model() -> TwoBandModel {
    TwoBandModel::new("dirac", 2, |k: &[f64], m: f64| {
        [k[0].sin(), k[1].sin(), m - k[0].cos() - k[1].cos()]
    })
    .with_mass_derivative(|_k, _m| [0.0, 0.0, 1.0])
}

/// Built-in models addressable by name from configuration.
pub fn by_name(name: &str) -> Option<TwoBandModel> {
    match name {
        "dirac" => Some(dirac_model()),
        _ => None,
    }
}

/// Bloch quantities at one `(k, M)`: gap `E = |d|`, unit vector `n = d/E`,
/// and their parameter derivatives.
#[derive(Clone, Copy, Debug)]
pub struct BlochPoint {
    pub energy: f64,
    pub unit_vector: [f64; 3],
    pub de_dm: f64,
    pub dn_dm: [f64; 3],
    pub dn_dm_sq: f64,
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Evaluate the Bloch quantities, rejecting gapless points.
pub fn bloch_point(model: &TwoBandModel, k: &[f64], m: f64) -> Result<BlochPoint, ModelError> {
    bloch_point_gapped(model, k, m, DEFAULT_EPS_GAP)
}

pub fn bloch_point_gapped(
    model: &TwoBandModel,
    k: &[f64],
    m: f64,
    eps_gap: f64,
) -> Result<BlochPoint, ModelError> {
    let d = model.d_vector(k, m);
    let energy = dot(d, d).sqrt();
    if energy <= eps_gap {
        return Err(ModelError::GaplessPoint {
            k: k.to_vec(),
            m,
            energy,
        });
    }
    let d_dm = model.d_vector_dm(k, m);
    let unit_vector = [d[0] / energy, d[1] / energy, d[2] / energy];
    let de_dm = dot(d, d_dm) / energy;
    let dn_dm = [
        d_dm[0] / energy - d[0] * de_dm / (energy * energy),
        d_dm[1] / energy - d[1] * de_dm / (energy * energy),
        d_dm[2] / energy - d[2] * de_dm / (energy * energy),
    ];
    Ok(BlochPoint {
        energy,
        unit_vector,
        de_dm,
        dn_dm,
        dn_dm_sq: dot(dn_dm, dn_dm),
    })
}

/// `d · σ` as a 2x2 Hermitian matrix.
pub fn d_dot_sigma(d: [f64; 3]) -> CMatrix {
    CMatrix::from_fn(2, 2, |r, c| match (r, c) {
        (0, 0) => Complex64::new(d[2], 0.0),
        (0, 1) => Complex64::new(d[0], -d[1]),
        (1, 0) => Complex64::new(d[0], d[1]),
        _ => Complex64::new(-d[2], 0.0),
    })
}

/// Second-quantized lift of a 2x2 single-particle Hamiltonian onto the Fock
/// basis `{|vac>, c_1†|vac>, c_2†|vac>, c_1† c_2†|vac>}`.
///
/// For traceless `h = d · σ` the spectrum is `{0, E, -E, 0}` with `E = |d|`.
pub fn fock_hamiltonian(h: &CMatrix) -> Result<CMatrix, ModelError> {
    assert_eq!(h.shape(), (2, 2));
    if (h - h.adjoint()).norm() > 1e-10 * (1.0 + h.norm()) {
        return Err(ModelError::NotHermitian);
    }
    let mut fock = CMatrix::zeros(4, 4);
    for r in 0..2 {
        for c in 0..2 {
            fock[(1 + r, 1 + c)] = h[(r, c)];
        }
    }
    fock[(3, 3)] = h[(0, 0)] + h[(1, 1)];
    Ok(fock)
}
