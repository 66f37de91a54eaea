//! Numerical toolkit for spherical Radon and generalized cosine transforms,
//! λ-intersection bodies and Busemann–Petty counterexamples.

pub mod error;
pub mod special;
pub mod sphere;
pub mod harmonic;
pub mod transforms;
pub mod ib;
pub mod ql;
pub mod gbp;

pub use error::{Error, Result};
