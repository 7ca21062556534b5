//! Legendre transform, log-concave polar, Laplace transforms and the
//! auxiliary integral forms.

pub mod forms;
pub mod laplace;
pub mod legendre;

pub use forms::{integral_representation, mussnig_form, weird_valuation, ZetaSpec};
pub use laplace::{
    finiteness_bound_lower, laplace_logconcave, laplace_polytope, laplace_polytope_profile, laplace_scaled,
    omega_lower,
};
pub use legendre::{legendre, legendre_f, legendre_s, polar};
