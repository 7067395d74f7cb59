//! Casimir interaction between two inclined cylinders.
//!
//! The interaction energy is the imaginary-frequency integral (or Matsubara
//! sum) of `log det(I - N)`, where the round-trip operator
//! `N = T1 U12 T2 U21` chains cylinder scattering amplitudes with translation
//! matrices between two cylindrical frames that are displaced by `d` along
//! `y` and rotated by `theta` about `y`. The continuous axial wavenumber is
//! discretized with a Nyström rule, so the determinant becomes a dense
//! complex determinant.
//!
//! Units: `hbar = c = k_B = 1`, lengths in whatever unit the radii are given
//! in (canonically `R1 = 1`). Zero-temperature energies therefore come out in
//! `hbar c / R1`, classical energies in `k_B T`.
//!
//! Module map:
//! - [`specfun`]: modified Bessel functions `I_n`, `K_n` and scaled variants.
//! - [`waves`]: scalar and electromagnetic translation kernels.
//! - [`scatter`]: Dirichlet, Neumann and perfect-metal T-matrices.
//! - [`engine`]: Nyström assembly, log-determinants, energies, forces, torque.
//! - [`asympt`]: closed-form large-distance results and the angular function Ω(θ).
//! - [`pfa`]: proximity-force approximation and its gradient-expansion correction.

// `!(x > 0.0)` guards are meant to reject NaN too; quadrature node tables
// keep their published digits; the assembly loops index several arrays.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

pub mod asympt;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod pfa;
pub mod quad;
pub mod scatter;
pub mod specfun;
pub mod waves;

pub use engine::{EnergyResult, Field, Geometry, Regime};
pub use error::{Error, Result};
