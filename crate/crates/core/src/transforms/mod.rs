//! Direct quadratures of the spherical Radon, cosine and related transforms,
//! and numerical checks of the identities relating them.

pub mod bispherical;
pub mod direct;
pub mod dual;
pub mod identities;
pub mod suites;

pub use bispherical::{bispherical_mean, subsphere_mean, Budget, SphereFn};
pub use dual::{dual_radon, dual_radon_balanced, gen_dual_cosine, monte_carlo, GrassFn, McEstimate};
pub use direct::{
    cosine_transform, funk_transform, gen_cosine, q_alpha, q_alpha_constant, radon_transform, raw_cosine_transform,
    restriction_constant, restriction_operator,
};
pub use identities::{
    dual_intertwining_point, factorization_points, intertwining_constant, intertwining_sides, q_composition_point,
    restriction_sides, right_inverse_c1, right_inverse_c2, right_inverse_dual_radon, verify_factorization,
    verify_intertwining, IdentityReport, McComparison, QuadraticGrassFn, RightInverse,
};
