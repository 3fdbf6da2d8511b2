//! Polygonal rotopulsators of the curved n-body problem.
//!
//! Point masses move on the unit 3-sphere (`σ = +1`) or on the upper sheet of
//! the unit 3-hyperboloid (`σ = −1`), both embedded in ℝ⁴ with the signed
//! product `x·y = x₁y₁ + x₂y₂ + x₃y₃ + σx₄y₄`. The crate provides
//!
//! - [`geometry`]: the signed product, the planar rotation/boost maps,
//!   projections onto the constraint manifold and the wedge bivector;
//! - [`dynamics`]: the equations of motion, an adaptive Dormand–Prince
//!   integrator with per-step manifold projection, and sample diagnostics;
//! - [`rotopulsator`]: builders for the polygonal elliptic and hyperbolic
//!   ansätze, chord tables, shape metrics and the criterion residuals;
//! - [`equilibria`]: the reduced relative-equilibrium equation, its kernel
//!   and a certified grid-scan root solver;
//! - [`analysis`]: numerical certificates for the conservation lemma, the
//!   equal-phase theorem and the equal-mass theorem.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analysis;
pub mod dynamics;
pub mod equilibria;
mod error;
pub mod geometry;
pub mod rotopulsator;

pub use error::{Error, Result};
pub use geometry::{Bivector, CurvatureSign, Mat2, Vec4};
