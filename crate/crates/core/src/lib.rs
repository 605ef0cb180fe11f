//! Mollified Schrödinger kernels on products of odd-dimensional spheres.
//!
//! The crate builds the kernel `K_N(t, ·)` of `φ(N⁻²Δ) e^{itΔ}` on
//! `S^{d_1} × … × S^{d_r}` with a rational product metric, evaluates it on the
//! maximal torus, and measures how its `L^p` norms scale with `N` on the major
//! arcs of the time circle.
//!
//! Module map:
//!
//! * [`space`]: dimensions, eigenvalues, harmonic dimensions, exponent thresholds, period.
//! * [`specialfn`]: zonal spherical functions, by recurrence and by the finite trigonometric sum.
//! * [`kernel`]: mollifiers, kernel assembly, the ν-decomposition, zonal Schrödinger flow.
//! * [`arcs`]: Farey fractions, major-arc classification, Weyl denominator sums.
//! * [`measure`]: torus quadrature with the `|sin θ|^{d-1}` density, regional norms.
//! * [`verify`]: scans over `N`, arcs and offsets with log–log exponent fits.
//! * [`cli`]: key=value configs and report writers behind the `sphere-dispersion` binary.

pub mod arcs;
pub mod cli;
mod dd;
pub mod error;
pub mod kernel;
pub mod measure;
pub mod rational;
pub mod space;
pub mod specialfn;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
