//! Family evaluators, law checkers and verification reports.

pub mod family;
pub mod input;
pub mod laws;
pub mod report;
pub mod transform;

pub use family::{family_eval, FamilyParams, Variant};
pub use input::{Input, InputClass};
pub use laws::{check_law, check_laws, CheckConfig};
pub use report::{LawAccumulator, LawReport, ValuationReport};
pub use transform::{AffineLaw, Coef, Combine, Evaluator, InputOp, Law, Transform};
pub mod cauchy;
pub mod continuity;
pub mod suites;
