//! The linear and exponential solution families of the shifted Cauchy
//! equations, checked as identities on a rational grid.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::report::{LawAccumulator, ValuationReport};
use crate::error::{Error, Result};
use crate::expint::ExpSum;
use crate::rat::{ratio, Rat};
use crate::value::{residual, Value};
use crate::real::Prec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CauchyKind {
    /// `f₁(s) + f₂(r) - σt = f₁(s+t) + f₂(r-t)` solved by
    /// `f₁ = c₁s + c₁'`, `f₂ = c₂r + c₂'`.
    Linear,
    /// `e^{-σt}(f₁(s) + f₂(r)) = f₁(s+t) + f₂(r-t)` solved by
    /// `f₁ = c₁e^{-σs} + c₁'`, `f₂ = c₂e^{σr} + c₂'`.
    Exponential,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CauchySpec {
    pub kind: CauchyKind,
    #[serde(with = "crate::rat::rat_str")]
    pub c1: Rat,
    #[serde(with = "crate::rat::rat_str")]
    pub c2: Rat,
    #[serde(with = "crate::rat::rat_str")]
    pub c1p: Rat,
    #[serde(with = "crate::rat::rat_str")]
    pub c2p: Rat,
    #[serde(with = "crate::rat::rat_str")]
    pub sigma: Rat,
}

impl CauchySpec {
    pub fn linear(c1: Rat, c1p: Rat, c2: Rat, c2p: Rat, sigma: Rat) -> Self {
        CauchySpec { kind: CauchyKind::Linear, c1, c2, c1p, c2p, sigma }
    }

    pub fn exponential(c1: Rat, c1p: Rat, c2: Rat, c2p: Rat, sigma: Rat) -> Self {
        CauchySpec { kind: CauchyKind::Exponential, c1, c2, c1p, c2p, sigma }
    }

    /// Constraint under which the family solves its equation.
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            CauchyKind::Linear if !(&self.c1 - &self.c2 + &self.sigma).is_zero() => {
                Err(Error::Parameter("linear family needs c1 - c2 + σ = 0".into()))
            }
            CauchyKind::Exponential if self.sigma.is_zero() => Err(Error::Parameter("exponential family needs σ != 0".into())),
            CauchyKind::Exponential if !(&self.c1p + &self.c2p).is_zero() => {
                Err(Error::Parameter("exponential family needs c1' + c2' = 0".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn f1(&self, s: &Rat) -> ExpSum {
        match self.kind {
            CauchyKind::Linear => ExpSum::rational(&self.c1 * s + &self.c1p),
            CauchyKind::Exponential => {
                let mut e = ExpSum::term(self.c1.clone(), -(&self.sigma * s));
                e.add_term(self.c1p.clone(), Rat::zero());
                e
            }
        }
    }

    pub fn f2(&self, r: &Rat) -> ExpSum {
        match self.kind {
            CauchyKind::Linear => ExpSum::rational(&self.c2 * r + &self.c2p),
            CauchyKind::Exponential => {
                let mut e = ExpSum::term(self.c2.clone(), &self.sigma * r);
                e.add_term(self.c2p.clone(), Rat::zero());
                e
            }
        }
    }

    /// `(lhs, rhs)` of the equation at `(r, s, t)`.
    pub fn sides(&self, r: &Rat, s: &Rat, t: &Rat) -> (ExpSum, ExpSum) {
        let rhs = self.f1(&(s + t)).add(&self.f2(&(r - t)));
        let sum = self.f1(s).add(&self.f2(r));
        let lhs = match self.kind {
            CauchyKind::Linear => sum.add(&ExpSum::rational(-(&self.sigma * t))),
            CauchyKind::Exponential => sum.shift(&-(&self.sigma * t)),
        };
        (lhs, rhs)
    }
}

/// Grid `{0, 1/2, …, 3}`.
pub fn default_grid() -> Vec<Rat> {
    (0..=6).map(|k| ratio(k, 2)).collect()
}

/// Triples `(r, s, t)` with `r ≥ 0 ≥ t ≥ -s` drawn from the grid.
pub fn triples(grid: &[Rat]) -> Vec<(Rat, Rat, Rat)> {
    let mut out = Vec::new();
    for r in grid.iter().filter(|r| !r.is_negative()) {
        for s in grid {
            for t in grid.iter().map(|t| -t.clone()).filter(|t| !t.is_positive() && (t + s) >= Rat::zero()) {
                out.push((r.clone(), s.clone(), t));
            }
        }
    }
    out
}

/// Checks the equation on every grid triple. Violations are recorded with
/// the first violating triple as witness.
pub fn cauchy_family_check(spec: &CauchySpec, grid: &[Rat], tol: f64, prec: Prec) -> ValuationReport {
    let name = match spec.kind {
        CauchyKind::Linear => "cauchy:linear",
        CauchyKind::Exponential => "cauchy:exponential",
    };
    let mut acc = LawAccumulator::new(name, "grid", tol);
    for (r, s, t) in triples(grid) {
        let (lhs, rhs) = spec.sides(&r, &s, &t);
        let (l, rr) = (Value::Exact(lhs), Value::Exact(rhs));
        acc.record(residual(&l, &rr, prec), || json!({ "spec": spec, "r": r.to_string(), "s": s.to_string(), "t": t.to_string() }));
    }
    let mut report = ValuationReport::new("cauchy", 0);
    report.fixtures = triples(grid).len() as u64;
    report.push(acc.finish());
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn linear_example_holds() {
        let spec = CauchySpec::linear(rat(1), rat(0), rat(2), rat(0), rat(1));
        spec.validate().unwrap();
        let r = cauchy_family_check(&spec, &default_grid(), 1e-12, Prec::default());
        assert!(r.pass);
        assert_eq!(r.laws[0].max_residual, 0.0);
    }

    #[test]
    fn exponential_example_holds() {
        let spec = CauchySpec::exponential(rat(1), rat(-1), rat(1), rat(1), rat(1));
        spec.validate().unwrap();
        assert!(cauchy_family_check(&spec, &default_grid(), 1e-12, Prec::default()).pass);
    }

    #[test]
    fn perturbed_sigma_is_found() {
        let spec = CauchySpec::linear(rat(1), rat(0), rat(2), rat(0), ratio(11, 10));
        assert!(spec.validate().is_err());
        let r = cauchy_family_check(&spec, &default_grid(), 1e-12, Prec::default());
        assert!(!r.pass);
        assert!(r.laws[0].witness.is_some());
    }

    #[test]
    fn triples_respect_the_domain() {
        for (r, s, t) in triples(&default_grid()) {
            assert!(r >= rat(0) && t <= rat(0) && &t + &s >= rat(0));
        }
    }
}
