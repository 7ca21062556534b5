use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{ConvexFn, Ext, PLConvexF, PLConvexS};
use crate::error::{Error, Result};
use crate::expint::ExpSum;
use crate::geom::UnimodularMap;
use crate::rat::{format_rat, value_to_rat, Rat, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LcKind {
    S,
    F,
}

/// `f = s·e^{-u}` with `u` of either class and a constant factor `s >= 0`.
///
/// The factor is only there so that `λf` stays representable; it is `1` for
/// every function built from a convex function directly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogConcaveFn {
    base: ConvexFn,
    scale: Rat,
}

impl LogConcaveFn {
    pub fn from_s(u: PLConvexS) -> Self {
        LogConcaveFn { base: ConvexFn::S(u), scale: Rat::one() }
    }

    pub fn from_f(u: PLConvexF) -> Self {
        LogConcaveFn { base: ConvexFn::F(u), scale: Rat::one() }
    }

    pub fn new(base: ConvexFn, scale: Rat) -> Result<Self> {
        if scale.is_negative() {
            return Err(Error::Input("log-concave factor must be nonnegative".into()));
        }
        Ok(LogConcaveFn { base, scale })
    }

    pub fn kind(&self) -> LcKind {
        match self.base {
            ConvexFn::S(_) => LcKind::S,
            ConvexFn::F(_) => LcKind::F,
        }
    }

    pub fn base(&self) -> &ConvexFn {
        &self.base
    }

    pub fn scale(&self) -> &Rat {
        &self.scale
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn as_s(&self) -> Option<&PLConvexS> {
        match &self.base {
            ConvexFn::S(u) => Some(u),
            ConvexFn::F(_) => None,
        }
    }

    pub fn as_f(&self) -> Option<&PLConvexF> {
        match &self.base {
            ConvexFn::F(u) => Some(u),
            ConvexFn::S(_) => None,
        }
    }

    /// `f(x)` as an exact exponential sum.
    pub fn eval(&self, x: &Vector) -> ExpSum {
        match self.base.eval(x) {
            Ext::Finite(v) => ExpSum::term(self.scale.clone(), -v),
            Ext::Inf => ExpSum::zero(),
        }
    }

    /// `1/f(x)`, `None` where `f` vanishes.
    pub fn eval_recip(&self, x: &Vector) -> Option<ExpSum> {
        if self.scale.is_zero() {
            return None;
        }
        match self.base.eval(x) {
            Ext::Finite(v) => Some(ExpSum::term(self.scale.recip(), v)),
            Ext::Inf => None,
        }
    }

    fn map(&self, f: impl FnOnce(&ConvexFn) -> Result<ConvexFn>) -> Result<Self> {
        Ok(LogConcaveFn { base: f(&self.base)?, scale: self.scale.clone() })
    }

    /// `τ_y f`
    pub fn translate(&self, y: &Vector) -> Result<Self> {
        self.map(|b| match b {
            ConvexFn::S(u) => Ok(ConvexFn::S(u.translate(y)?)),
            ConvexFn::F(u) => Ok(ConvexFn::F(u.translate(y)?)),
        })
    }

    /// `e^{-ℓ_y} f`
    pub fn mul_exp_linear(&self, y: &Vector) -> Result<Self> {
        self.map(|b| match b {
            ConvexFn::S(u) => Ok(ConvexFn::S(u.dual_translate(y)?)),
            ConvexFn::F(u) => Ok(ConvexFn::F(u.dual_translate(y)?)),
        })
    }

    /// `e^{-t} f`
    pub fn mul_exp_const(&self, t: &Rat) -> Self {
        self.map(|b| match b {
            ConvexFn::S(u) => Ok(ConvexFn::S(u.add_const(t))),
            ConvexFn::F(u) => Ok(ConvexFn::F(u.add_const(t))),
        })
        .expect("infallible")
    }

    /// `f ∘ λ`
    pub fn scale_arg(&self, lambda: &Rat) -> Result<Self> {
        self.map(|b| match b {
            ConvexFn::S(u) => Ok(ConvexFn::S(u.scale_arg(lambda)?)),
            ConvexFn::F(u) => Ok(ConvexFn::F(u.scale_arg(lambda)?)),
        })
    }

    /// `λ f` for `λ >= 0`.
    pub fn mul_const(&self, lambda: &Rat) -> Result<Self> {
        if lambda.is_negative() {
            return Err(Error::Input("log-concave factor must be nonnegative".into()));
        }
        Ok(LogConcaveFn { base: self.base.clone(), scale: &self.scale * lambda })
    }

    /// `f ∘ φ^{-1}`
    pub fn compose_inverse(&self, phi: &UnimodularMap) -> Result<Self> {
        self.map(|b| match b {
            ConvexFn::S(u) => Ok(ConvexFn::S(u.compose_inverse(phi)?)),
            ConvexFn::F(u) => Ok(ConvexFn::F(u.compose_inverse(phi)?)),
        })
    }

    /// Pointwise max of two class-S functions with unit factor, i.e.
    /// `e^{-(u ∧̃ v)}` when the minimum is convex.
    pub fn join(&self, other: &Self) -> Result<Self> {
        match (&self.base, &other.base) {
            (ConvexFn::S(u), ConvexFn::S(v)) if self.scale.is_one() && other.scale.is_one() => {
                Ok(Self::from_s(u.meet(v)?))
            }
            _ => Err(Error::Unsupported("log-concave join needs unit class-S inputs".into())),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = match &self.base {
            ConvexFn::S(u) => serde_json::to_value(u).expect("serializable"),
            ConvexFn::F(u) => serde_json::to_value(u).expect("serializable"),
        };
        let obj = v.as_object_mut().expect("object");
        let kind = match self.kind() {
            LcKind::S => "S",
            LcKind::F => "F",
        };
        obj.insert("kind".into(), Value::String(kind.into()));
        if !self.scale.is_one() {
            obj.insert("scale".into(), Value::String(format_rat(&self.scale)));
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::parse("kind", "expected \"S\" or \"F\""))?;
        let base = match kind {
            "S" => ConvexFn::S(serde_json::from_value(v.clone())?),
            "F" => ConvexFn::F(serde_json::from_value(v.clone())?),
            other => return Err(Error::parse("kind", format!("unknown kind {other:?}"))),
        };
        let scale = match v.get("scale") {
            None => Rat::one(),
            Some(s) => value_to_rat(s).map_err(|e| Error::parse("scale", e))?,
        };
        Self::new(base, scale)
    }
}

impl Serialize for LogConcaveFn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LogConcaveFn {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        LogConcaveFn::from_json(&v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Polytope;
    use crate::rat::rat;
    use crate::real::Prec;

    #[test]
    fn indicator_values() {
        let f = LogConcaveFn::from_s(PLConvexS::indicator(&Polytope::cube(2, rat(0), rat(1))).unwrap());
        assert_eq!(f.eval(&Vector::from_i64(&[0, 1])).as_rational(), Some(rat(1)));
        assert!(f.eval(&Vector::from_i64(&[2, 0])).is_zero());
        let g = f.mul_exp_const(&rat(1));
        let v = g.eval(&Vector::from_i64(&[0, 0])).eval(Prec::default());
        assert!((v.to_f64() - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip_keeps_kind_and_scale() {
        let f = LogConcaveFn::from_f(PLConvexF::linear(&Vector::from_i64(&[1, -1])))
            .mul_const(&rat(3))
            .unwrap();
        let js = serde_json::to_string(&f).unwrap();
        assert!(js.contains("\"kind\":\"F\""));
        let back: LogConcaveFn = serde_json::from_str(&js).unwrap();
        assert_eq!(back, f);
    }
}
