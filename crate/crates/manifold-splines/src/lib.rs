//! Kernel interpolation and approximation on the compact manifolds
//! S¹, S² and SO(3).
//!
//! The crate provides:
//!
//! - [`geometry`]: points, geodesic distances, point-set generators
//!   (Fibonacci lattices, seeded random sets, greedy ε-nets), mesh
//!   statistics (fill distance h, separation q, mesh ratio ρ) and
//!   product quadrature rules;
//! - [`basis`]: real orthonormal Laplace–Beltrami eigenbases (spherical
//!   harmonics, Wigner rotation functions) with zonal addition-theorem
//!   sums;
//! - [`kernels`]: closed-form and spectral polyharmonic kernels,
//!   including restricted surface splines on spheres, surface splines
//!   on SO(3) and the general 1/Q(λ) spectral builder, with
//!   conditional-positive-definiteness diagnostics;
//! - [`interp`]: the saddle-point interpolation system for conditionally
//!   positive definite kernels, Lagrange (cardinal) function evaluation,
//!   the native-space seminorm and discrete L₂ projection;
//! - [`analysis`]: experiment drivers measuring Lebesgue constants,
//!   Lagrange-function decay rates, L_p stability ratios, projector
//!   norms and convergence rates;
//! - [`cli`]: the command-line front end used by the `manifold-splines`
//!   binary.
//!
//! See the crate examples for runnable end-to-end demonstrations of each
//! capability.

pub mod analysis;
pub mod basis;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod interp;
pub mod kernels;
pub mod targets;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
