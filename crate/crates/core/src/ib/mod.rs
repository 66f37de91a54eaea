//! λ-intersection bodies: classification, construction, sections and the
//! standard families of members.

pub mod classify;
pub mod construct;
pub mod convex;
pub mod examples;
pub mod lambda;
pub mod measure;
pub mod negative;

pub use classify::{
    chamber_levels, chamber_points, classify, classify_many, classify_with, rule_kind_name, default_rule, output_directions, ClassificationReport, ClassifyOptions,
    SmoothingLevel, Verdict,
};
pub use lambda::{c_lambda_n, Branch, LambdaParam};
pub use construct::{
    construct_ib, ib_ball_radius, section_body, section_constant, section_ib, section_volumes, ConstructOptions,
};
pub use negative::{atomic_fit, classify_negative, nnls, AtomicFit};
pub use measure::{poisson_approximate, PoissonOptions, PoissonPair, SphericalMeasure};
pub use examples::{generate_example, ExampleCertificate, ExampleKind, ExampleOptions, GeneratedExample};
pub use convex::{continued_section_integral, convex_range_check, ContinuationPoint, ConvexOptions, ConvexRangeReport};
