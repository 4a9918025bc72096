//! Numerical verification of Hardy inequalities with iterated-logarithm
//! corrections on bounded convex domains.
//!
//! - [`logtower`]: the functions `X_k`, `eta`, `B` and their derivatives.
//! - [`constants`]: `a_N`, `k_p`, `K_p`, `a(p, k)`, `mu_2` and the threshold `D_0`.
//! - [`hardyfn`]: the one-dimensional auxiliary functions and their grid checks.
//! - [`geometry`]: balls, boxes and H-polytopes; exit times and mean-distance checks.
//! - [`functional`]: Hardy functionals of trial functions and the inequality checks.
//! - [`spectral`]: radial eigenvalue problems for the best constant in three dimensions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod functional;
pub mod geometry;
pub mod hardyfn;
pub mod logtower;
pub mod quadrature;
pub mod report;
pub mod special;
pub mod spectral;

pub use constants::HardyParams;
pub use error::{HardyError, Result};
pub use functional::{Classical, Integrator, Profile, RadialProfile, TestFunction};
pub use geometry::{ConvexDomain, HPolytope, SphereQuadrature, SphereScheme};
pub use logtower::Tower;
pub use quadrature::Estimate;
pub use report::{Format, GridReport, SlackReport};
