pub mod error;
pub mod function;
pub mod geom;
pub mod linalg;
pub mod rat;

pub use error::{Error, Result};
pub use rat::{Rat, Vector};
pub mod expint;
pub mod real;
pub mod transforms;
pub mod value;
pub mod harness;
pub mod duality;
