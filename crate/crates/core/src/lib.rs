//! Quantum information geometry of mixed states.
//!
//! This crate computes distances and Riemannian metrics on density matrices
//! whose spectral degeneracy structure (the *type*: the multiset of ranks of
//! the spectral projectors) is held fixed. The central objects are
//!
//! - the interferometric metric, a Fisher-Rao classical part plus an
//!   eigenvalue-weighted Grassmannian quantum part, obtained by reducing the
//!   Uhlmann gauge group `U(r)` to the block gauge group `U(r_1) x ... x U(r_k)`,
//! - the Bures metric, kept alongside for comparison,
//! - the Mach-Zehnder port probability that realizes the interferometric
//!   distance operationally, and
//! - closed-form pullbacks of both metrics to the parameter axis of thermal
//!   (Gibbs) states of two-band Bloch Hamiltonians, integrated over the
//!   Brillouin zone.
//!
//! The intended scale is desk-sized: dense matrices of dimension a few dozen
//! at most, and Brillouin-zone grids of up to ~1000^2 cells.

pub mod bandmodels;
pub mod geometry;
pub mod interferometer;
pub mod numerics;
pub mod pullback;
pub mod states;

pub use bandmodels::{bloch_point, dirac_model, BlochPoint, TwoBandModel};
pub use geometry::{
    dist_base, dist_base_bruteforce, dist_total, hermitian_form, BundlePoint, MetricValue,
};
pub use numerics::{CMatrix, CVector};
pub use states::{decompose, gibbs, MixedState, TypedDecomposition};
