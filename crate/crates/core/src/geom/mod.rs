//! Exact rational polytope kernel.

pub mod hull;
pub mod polytope;
pub mod profile;
pub mod unimodular;

pub use hull::Halfspace;
pub use polytope::{factorial, Measures, Polytope};
pub use profile::{shadow_profile, PiecewisePoly};
pub use unimodular::{random_unimodular, UnimodularMap};
