//! Convex domains, directional exit times and sphere quadrature, plus the
//! mean-distance verifiers built on them.

mod checks;
mod domain;
pub mod sphere;

pub use checks::{check_bmean_bound, check_mean_distance_lemma, min_ratio_identity, volume_identity, IdentityReport};
pub use domain::{ConvexDomain, HPolytope, DIR_EPS, POLYTOPE_MEASURE_MAX_DIM};
pub use sphere::{SphereQuadrature, SphereScheme};
