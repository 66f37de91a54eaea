//! Star bodies, quadrature on spheres and sub-spheres, subspace frames and
//! volume functionals.

pub mod body;
pub mod frame;
pub mod quadrature;
pub mod volume;

pub use body::{BodySpec, StarBody, Symmetry, TabulatedRadial};
pub use frame::{
    dot, norm, normalize, project_orth, random_frame, random_completion, random_frame_with, random_rotation_fixing,
    random_rotation_fixing_with, random_unit_vector, rng_for, unit_vector, Rotation, SubspaceFrame,
};
pub use quadrature::{
    axial_quadrature, embed_rule, even_moment, orthant_quadrature, product_quadrature, product_quadrature_even, sphere_rule_coords,
    subsphere_quadrature, QuadratureRule, RuleKind,
};
pub use volume::{
    body_volume, parallel_section_function, ray_exit, section_volume, support_point, ParallelSections,
};
