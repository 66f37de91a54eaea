//! Fourier–Laplace multipliers on the sphere.

pub mod field;
pub mod multiplier;
pub mod poisson;
pub mod projection;
pub mod zonal;

pub use field::MultiplierField;
pub use multiplier::{bridge_multiplier, cosine_multiplier, q_multipliers, raw_cosine_multiplier, MultiplierSpec};
pub use poisson::{poisson_direct, poisson_kernel};
pub use projection::{apply_multiplier_grid, check_degree, ProjectionTable};
pub use zonal::{expand_zonal, expand_zonal_with_nodes, normalized_gegenbauer_all, ZonalExpansion};
