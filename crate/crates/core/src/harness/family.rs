use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::input::{Input, InputClass};
use crate::error::{Error, Result};
use crate::expint::ExpSum;
use crate::function::{Ext, LogConcaveFn, PLConvexS};
use crate::geom::Polytope;
use crate::rat::{rat, Rat, Vector};
use crate::real::Prec;
use crate::transforms::{laplace_logconcave, laplace_polytope, laplace_scaled, legendre_s, weird_valuation};
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `c₁h_P + c₂h_{-P} + c₃V₀ + c₄V_n + c₅ x·m(P)`
    Thm41,
    /// `c₁e^{σh_P} + c₂e^{-σh_{-P}} + c₃ℒP(σx)`
    Thm42,
    /// `εσu*(x/ε) + c₁`, or `c₂δ_x^0 + c₁` at `ε = 0`
    Thm52,
    /// `c₁e^{εσu*(x/ε)} + c₂∫exp(σx·y - εσu(y))dy`
    Thm59,
    /// `u*(x) + c₁`
    Legendre,
    /// `c₁ℒf(x)`
    Laplace,
    /// `Ẑu(x)`
    Weird,
    /// `c₁f°(x)`
    Polar,
    /// `c₁/f°(x) + c₂ℒf(x)`
    Thm13,
}

impl Variant {
    pub fn input_class(self) -> InputClass {
        match self {
            Variant::Thm41 | Variant::Thm42 => InputClass::Polytope,
            Variant::Thm52 | Variant::Thm59 | Variant::Legendre | Variant::Weird => InputClass::S,
            Variant::Laplace | Variant::Polar | Variant::Thm13 => InputClass::LcSc,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Thm41 => "thm41",
            Variant::Thm42 => "thm42",
            Variant::Thm52 => "thm52",
            Variant::Thm59 => "thm59",
            Variant::Legendre => "legendre",
            Variant::Laplace => "laplace",
            Variant::Weird => "weird",
            Variant::Polar => "polar",
            Variant::Thm13 => "thm13",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn default_c() -> Vec<Rat> {
    vec![Rat::zero(); 5]
}

fn one() -> Rat {
    Rat::one()
}

/// Constants of a classified family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub variant: Variant,
    #[serde(with = "crate::rat::rats_str", default = "default_c")]
    pub c: Vec<Rat>,
    #[serde(with = "crate::rat::rat_str", default = "one")]
    pub sigma: Rat,
    #[serde(with = "crate::rat::rat_str", default = "one")]
    pub eps: Rat,
}

impl FamilyParams {
    pub fn new(variant: Variant, c: &[Rat], sigma: Rat, eps: Rat) -> Result<Self> {
        let mut cc = default_c();
        if c.len() > 5 {
            return Err(Error::Parameter("at most five constants".into()));
        }
        for (i, v) in c.iter().enumerate() {
            cc[i] = v.clone();
        }
        let p = FamilyParams { variant, c: cc, sigma, eps };
        p.validate()?;
        Ok(p)
    }

    pub fn simple(variant: Variant, c: &[i64]) -> Self {
        let c: Vec<Rat> = c.iter().map(|&k| rat(k)).collect();
        Self::new(variant, &c, Rat::one(), Rat::one()).expect("valid constants")
    }

    pub fn c(&self, i: usize) -> &Rat {
        &self.c[i - 1]
    }

    pub fn validate(&self) -> Result<()> {
        if self.c.len() != 5 {
            return Err(Error::Parameter("expected five constants c1..c5".into()));
        }
        match self.variant {
            Variant::Thm42 | Variant::Thm59 if self.sigma.is_zero() => {
                Err(Error::Parameter(format!("{} needs σ != 0", self.variant)))
            }
            Variant::Thm59 if !self.c(2).is_zero() && !(&self.eps * &self.sigma).is_positive() => {
                Err(Error::Parameter("thm59 with c2 != 0 needs εσ > 0".into()))
            }
            _ => Ok(()),
        }
    }

    /// `Z₀(P)` of the translation law: `(c₁-c₂)V₀ + c₅V_n` for thm41, `σ`
    /// for thm42.
    pub fn z0(&self, p: &Polytope) -> Rat {
        match self.variant {
            Variant::Thm42 => self.sigma.clone(),
            _ => {
                let m = p.measures();
                (self.c(1) - self.c(2)) * &m.v0 + self.c(5) * &m.vn
            }
        }
    }
}

fn expect_polytope<'a>(input: &'a Input, v: Variant) -> Result<&'a Polytope> {
    match input {
        Input::Polytope(p) => Ok(p),
        other => Err(Error::Input(format!("{v} expects a polytope, got class {}", other.class()))),
    }
}

fn expect_s<'a>(input: &'a Input, v: Variant) -> Result<&'a PLConvexS> {
    match input {
        Input::S(u) => Ok(u),
        other => Err(Error::Input(format!("{v} expects a class-S function, got class {}", other.class()))),
    }
}

fn expect_lc_sc<'a>(input: &'a Input, v: Variant) -> Result<&'a LogConcaveFn> {
    match input {
        Input::Lc(f) if f.as_s().is_some() => Ok(f),
        other => Err(Error::Input(format!("{v} expects a compactly supported log-concave function, got class {}", other.class()))),
    }
}

fn unit_base(f: &LogConcaveFn) -> Result<&PLConvexS> {
    if !f.scale().is_one() {
        return Err(Error::Domain("polar needs a function of the form e^{-u}".into()));
    }
    Ok(f.as_s().expect("class checked"))
}

fn nonzero(x: &Vector, v: Variant) -> Result<()> {
    if x.is_zero() {
        return Err(Error::Domain(format!("{v} is evaluated at x != 0")));
    }
    Ok(())
}

/// Evaluates a classified family at `x`.
pub fn family_eval(params: &FamilyParams, input: &Input, x: &Vector, prec: Prec) -> Result<Value> {
    params.validate()?;
    x.check_dim(input.dim())?;
    let v = params.variant;
    match v {
        Variant::Thm41 => {
            let p = expect_polytope(input, v)?;
            nonzero(x, v)?;
            if p.is_empty() {
                return Ok(Value::zero());
            }
            let m = p.measures();
            let val = params.c(1) * p.support(x)?
                + params.c(2) * p.reflect().support(x)?
                + params.c(3) * &m.v0
                + params.c(4) * &m.vn
                + params.c(5) * x.dot(&m.moment);
            Ok(Value::rational(val))
        }
        Variant::Thm42 => {
            let p = expect_polytope(input, v)?;
            nonzero(x, v)?;
            if p.is_empty() {
                return Ok(Value::zero());
            }
            let s = &params.sigma;
            let mut e = ExpSum::term(params.c(1).clone(), s * p.support(x)?);
            e.add_term(params.c(2).clone(), -(s * p.reflect().support(x)?));
            let exact = Value::Exact(e);
            if params.c(3).is_zero() || !p.is_full_dim() {
                return Ok(exact);
            }
            let l = laplace_polytope(p, &x.scale(s), prec)?.mul_rat(params.c(3), prec);
            Ok(exact.add(&Value::Approx(l), prec))
        }
        Variant::Thm52 => {
            let u = expect_s(input, v)?;
            if params.eps.is_zero() {
                let delta = if x.is_zero() { params.c(2).clone() } else { Rat::zero() };
                return Ok(Value::rational(delta + params.c(1)));
            }
            let conj = legendre_s(u).eval(&x.scale(&params.eps.recip()));
            Ok(Value::rational(&params.eps * &params.sigma * conj + params.c(1)))
        }
        Variant::Thm59 => {
            let u = expect_s(input, v)?;
            let es = &params.eps * &params.sigma;
            if es.is_zero() {
                return Ok(Value::zero());
            }
            let conj = legendre_s(u).eval(&x.scale(&params.eps.recip()));
            let first = Value::Exact(ExpSum::term(params.c(1).clone(), &es * conj));
            if params.c(2).is_zero() {
                return Ok(first);
            }
            let second = laplace_scaled(u, &es, &x.scale(&params.sigma), prec)?.mul_rat(params.c(2), prec);
            Ok(first.add(&Value::Approx(second), prec))
        }
        Variant::Legendre => {
            let u = expect_s(input, v)?;
            Ok(Value::rational(legendre_s(u).eval(x) + params.c(1)))
        }
        Variant::Laplace => {
            let f = expect_lc_sc(input, v)?;
            Ok(Value::Approx(laplace_logconcave(f, x, prec)?.mul_rat(params.c(1), prec)))
        }
        Variant::Weird => {
            let u = expect_s(input, v)?;
            Ok(Value::Exact(weird_valuation(u, x)?))
        }
        Variant::Polar => {
            let f = expect_lc_sc(input, v)?;
            let conj = legendre_s(unit_base(f)?).eval(x);
            Ok(Value::Exact(ExpSum::term(params.c(1).clone(), -conj)))
        }
        Variant::Thm13 => {
            let f = expect_lc_sc(input, v)?;
            let conj = legendre_s(unit_base(f)?).eval(x);
            let first = Value::Exact(ExpSum::term(params.c(1).clone(), conj));
            if params.c(2).is_zero() {
                return Ok(first);
            }
            let l = laplace_logconcave(f, x, prec)?.mul_rat(params.c(2), prec);
            Ok(first.add(&Value::Approx(l), prec))
        }
    }
}

/// `u(x)` as a value, for laws whose right side is the input itself.
pub fn ext_value(e: Ext) -> Result<Value> {
    match e {
        Ext::Finite(q) => Ok(Value::rational(q)),
        Ext::Inf => Err(Error::Domain("value is +∞".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;

    fn p() -> Prec {
        Prec::default()
    }

    #[test]
    fn thm41_worked_example() {
        let params = FamilyParams::simple(Variant::Thm41, &[1, 0, 0, 0, 2]);
        let cube = Polytope::cube(3, rat(0), rat(1));
        let e1 = Vector::basis(3, 0);
        let before = family_eval(&params, &Input::Polytope(cube.clone()), &e1, p()).unwrap();
        assert_eq!(before.as_rational(), Some(rat(2)));
        let moved = Input::Polytope(cube.translate(&e1).unwrap());
        let after = family_eval(&params, &moved, &e1, p()).unwrap();
        assert_eq!(after.as_rational(), Some(rat(5)));
        assert_eq!(params.z0(&cube), rat(3));
    }

    #[test]
    fn thm42_worked_example() {
        let params = FamilyParams::simple(Variant::Thm42, &[1]);
        let cube = Polytope::cube(3, rat(0), rat(1));
        let e1 = Vector::basis(3, 0);
        let moved = Input::Polytope(cube.translate(&-&e1).unwrap());
        let v = family_eval(&params, &moved, &e1, p()).unwrap();
        assert_eq!(v.as_rational(), Some(rat(1)));
    }

    #[test]
    fn thm52_at_unit_parameters_is_legendre() {
        let cube = Polytope::cube(3, rat(0), rat(1));
        let y = Vector::from_i64(&[1, 0, -1]);
        let u = PLConvexS::cone(&cube, &y, &ratio(1, 2)).unwrap();
        let x = Vector::from_i64(&[2, 1, 1]);
        let params = FamilyParams::simple(Variant::Thm52, &[]);
        let v = family_eval(&params, &Input::S(u), &x, p()).unwrap();
        let want = cube.support(&(&x - &y)).unwrap() - ratio(1, 2);
        assert_eq!(v.as_rational(), Some(want));
    }

    #[test]
    fn parameter_errors() {
        assert!(FamilyParams::new(Variant::Thm42, &[rat(1)], rat(0), rat(1)).is_err());
        assert!(FamilyParams::new(Variant::Thm59, &[rat(1), rat(1)], rat(1), rat(-1)).is_err());
        assert!(FamilyParams::new(Variant::Thm59, &[rat(1)], rat(1), rat(-1)).is_ok());
        let params = FamilyParams::simple(Variant::Thm41, &[1]);
        let u = Input::S(PLConvexS::indicator(&Polytope::cube(1, rat(0), rat(1))).unwrap());
        assert!(family_eval(&params, &u, &Vector::from_i64(&[1]), p()).is_err());
    }

    #[test]
    fn params_json_defaults() {
        let p: FamilyParams = serde_json::from_str(r#"{"variant":"thm42","c":["1","0","1/2"]}"#).unwrap();
        assert_eq!(p.c.len(), 3);
        assert!(p.validate().is_err());
        let q: FamilyParams = serde_json::from_str(r#"{"variant":"thm42","c":["1","0","1/2","0","0"],"sigma":"-2"}"#).unwrap();
        assert!(q.validate().is_ok());
        assert_eq!(q.eps, rat(1));
    }
}
