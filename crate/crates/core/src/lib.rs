//! Numerical laboratory for weighted isoperimetric problems on the half-space
//! `R^N_+ = {x_N > 0}` with perimeter density `|x|^k x_N^alpha` and volume
//! density `|x|^l x_N^alpha`.
//!
//! The crate is organised by capability:
//!
//! * [`params`]: admissibility, the stability and nonexistence conditions,
//!   region classification and parameter grids.
//! * [`quadrature`]: Gauss–Legendre/Jacobi rules, adaptive integration,
//!   log-gamma and a reproducible Monte Carlo integrator.
//! * [`geometry`]: weighted measures, relative perimeters and ratios of trial
//!   domains, and the divergence identity for `k = l + 1`.
//! * [`stereographic`]: projection of the upper half-sphere onto the unit
//!   disk and the associated density and bound checks.
//! * [`spectral`]: Galerkin solver for the weighted Sturm–Liouville problems
//!   on the half-sphere.
//! * [`sweeps`]: ratio decay along translated balls and the radial-density
//!   counterexamples on `R^N`.
//! * [`cli`] and [`verify`]: command-line front end and the acceptance battery.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod format;
pub mod geometry;
pub mod params;
pub mod quadrature;
pub mod spectral;
pub mod sphere;
pub mod stereographic;
pub mod sweeps;
pub mod verify;

pub use params::{classify, evaluate_conditions, RegionTag, WeightParams};
