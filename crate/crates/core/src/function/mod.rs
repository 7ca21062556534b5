//! Polyhedral convex functions and log-concave wrappers.

pub mod fixtures;
pub mod logconcave;
pub mod pl_f;
pub mod pl_s;
pub mod probe;

use std::fmt;

use crate::rat::{format_rat, Rat};

pub use logconcave::{LcKind, LogConcaveFn};
pub use pl_f::{PLConvexF, Piece};
pub use pl_s::{AffineCell, GraphPoint, PLConvexS};
pub use probe::{compare_on_grid, GridDiff, GridSpec};

/// Extended real value `ℝ ∪ {+∞}` with exact finite part.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ext {
    Finite(Rat),
    Inf,
}

impl Ext {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Ext::Finite(q) => Some(q),
            Ext::Inf => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Ext::Finite(_))
    }

    pub fn add_rat(&self, c: &Rat) -> Ext {
        match self {
            Ext::Finite(q) => Ext::Finite(q + c),
            Ext::Inf => Ext::Inf,
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Finite(q) => write!(f, "{}", format_rat(q)),
            Ext::Inf => write!(f, "inf"),
        }
    }
}

/// A function of either polyhedral class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConvexFn {
    S(PLConvexS),
    F(PLConvexF),
}

impl ConvexFn {
    pub fn dim(&self) -> usize {
        match self {
            ConvexFn::S(u) => u.dim(),
            ConvexFn::F(u) => u.dim(),
        }
    }

    pub fn eval(&self, x: &crate::rat::Vector) -> Ext {
        match self {
            ConvexFn::S(u) => u.eval(x),
            ConvexFn::F(u) => Ext::Finite(u.eval(x)),
        }
    }
}
