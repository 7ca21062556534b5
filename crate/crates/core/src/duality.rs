//! Dual valuations `Ψ*(u) = Ψ(u*)` and the closed-form dual families.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};

use crate::error::{Error, Result};
use crate::expint::ExpSum;
use crate::function::LogConcaveFn;
use crate::harness::{AffineLaw, Evaluator, Input, InputClass, Law, Transform};
use crate::rat::{Rat, Vector};
use crate::real::Prec;
use crate::transforms::{laplace_logconcave, legendre_f, legendre_s, polar};
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualVariant {
    /// `u + c₁` on class F.
    IdC,
    /// `c₁f` on positive log-concave functions.
    ScaleC,
    /// `c₁/f + c₂ℒf°` on positive log-concave functions.
    Mix,
}

impl DualVariant {
    pub fn name(self) -> &'static str {
        match self {
            DualVariant::IdC => "id_c",
            DualVariant::ScaleC => "scale_c",
            DualVariant::Mix => "mix",
        }
    }

    pub fn input_class(self) -> InputClass {
        match self {
            DualVariant::IdC => InputClass::F,
            DualVariant::ScaleC | DualVariant::Mix => InputClass::LcPos,
        }
    }
}

impl fmt::Display for DualVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn zero() -> Rat {
    Rat::zero()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualParams {
    pub variant: DualVariant,
    #[serde(with = "crate::rat::rat_str", default = "zero")]
    pub c1: Rat,
    #[serde(with = "crate::rat::rat_str", default = "zero")]
    pub c2: Rat,
}

impl DualParams {
    pub fn new(variant: DualVariant, c1: Rat, c2: Rat) -> Self {
        DualParams { variant, c1, c2 }
    }
}

/// Evaluates a dual family at `x`.
pub fn dual_family_eval(params: &DualParams, input: &Input, x: &Vector, prec: Prec) -> Result<Value> {
    x.check_dim(input.dim())?;
    let class_err = || {
        Error::Input(format!(
            "{} expects class {}, got {}",
            params.variant,
            params.variant.input_class(),
            input.class()
        ))
    };
    match params.variant {
        DualVariant::IdC => {
            let Input::F(u) = input else { return Err(class_err()) };
            Ok(Value::rational(u.eval(x) + &params.c1))
        }
        DualVariant::ScaleC => {
            let f = positive_lc(input).ok_or_else(class_err)?;
            Ok(Value::Exact(f.eval(x).scale(&params.c1)))
        }
        DualVariant::Mix => {
            let f = positive_lc(input).ok_or_else(class_err)?;
            let mut first = ExpSum::zero();
            if !params.c1.is_zero() {
                let recip = f.eval_recip(x).ok_or_else(|| Error::Domain("1/f is undefined for f = 0".into()))?;
                first = recip.scale(&params.c1);
            }
            let first = Value::Exact(first);
            if params.c2.is_zero() {
                return Ok(first);
            }
            let l = laplace_logconcave(&polar(f)?, x, prec)?.mul_rat(&params.c2, prec);
            Ok(first.add(&Value::Approx(l), prec))
        }
    }
}

fn positive_lc(input: &Input) -> Option<&LogConcaveFn> {
    match input {
        Input::Lc(f) if f.as_f().is_some() => Some(f),
        _ => None,
    }
}

/// A transform together with a flag for dualization. Dualizing pre-composes
/// with the Legendre transform (or the polar on log-concave inputs).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformHandle {
    pub transform: Transform,
    pub dualized: bool,
}

impl TransformHandle {
    pub fn new(transform: Transform) -> Self {
        TransformHandle { transform, dualized: false }
    }

    pub fn to_json(&self) -> Json {
        json!({
            "transform": self.transform.name(),
            "params": self.transform.params_json(),
            "dualized": self.dualized,
        })
    }

    pub fn from_json(v: &Json) -> Result<Self> {
        let id = v
            .get("transform")
            .and_then(Json::as_str)
            .ok_or_else(|| Error::parse("transform", "expected a transform id"))?;
        let params = v.get("params").cloned().unwrap_or(Json::Null);
        let dualized = match v.get("dualized") {
            None => false,
            Some(Json::Bool(b)) => *b,
            Some(_) => return Err(Error::parse("dualized", "expected a boolean")),
        };
        let h = TransformHandle { transform: Transform::from_parts(id, &params)?, dualized };
        if dualized {
            h.transform.input_class().dual()?;
        }
        Ok(h)
    }
}

/// `Φ ↦ Φ*`; an involution.
pub fn dualize(h: &TransformHandle) -> Result<TransformHandle> {
    h.transform.input_class().dual()?;
    Ok(TransformHandle { transform: h.transform.clone(), dualized: !h.dualized })
}

/// `u*` for either class, `f°` for log-concave inputs.
pub fn dual_input(input: &Input) -> Result<Input> {
    Ok(match input {
        Input::S(u) => Input::F(legendre_s(u)),
        Input::F(u) => Input::S(legendre_f(u)),
        Input::Lc(f) => Input::Lc(polar(f)?),
        Input::Polytope(_) => return Err(Error::Input("polytopes have no dual input".into())),
    })
}

impl Evaluator for TransformHandle {
    fn id(&self) -> String {
        if self.dualized {
            format!("dualized({})", self.transform.id())
        } else {
            self.transform.id()
        }
    }

    fn input_class(&self) -> InputClass {
        let c = self.transform.input_class();
        if self.dualized {
            c.dual().expect("checked on construction")
        } else {
            c
        }
    }

    fn eval(&self, input: &Input, x: &Vector, prec: Prec) -> Result<Value> {
        if !self.dualized {
            return self.transform.eval(input, x, prec);
        }
        if input.class() != self.input_class() {
            return Err(Error::Input(format!(
                "dualized {} expects class {}, got {}",
                self.transform.name(),
                self.input_class(),
                input.class()
            )));
        }
        self.transform.eval(&dual_input(input)?, x, prec)
    }

    fn punctured(&self) -> bool {
        self.transform.punctured()
    }

    fn prepare(&self, input: Input) -> Input {
        if self.dualized {
            input
        } else {
            self.transform.prepare(input)
        }
    }

    /// Contravariance becomes covariance and the two translation laws swap
    /// roles.
    fn laws(&self) -> Vec<Law> {
        let laws = self.transform.laws();
        if !self.dualized {
            return laws;
        }
        laws.into_iter()
            .map(|l| match l {
                Law::Valuation => Law::Valuation,
                Law::SlnTranspose(_) => Law::SlnInverse,
                Law::SlnInverse => Law::SlnTranspose("sln_contravariant"),
                Law::Affine(a) => {
                    let family = if a.name.starts_with("homomorphism") {
                        "translation_conjugation"
                    } else {
                        "homomorphism"
                    };
                    Law::Affine(AffineLaw::dualized(&a, family))
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Polytope;
    use crate::harness::family::{FamilyParams, Variant};
    use crate::rat::rat;
    use crate::function::{PLConvexF, PLConvexS};

    fn p() -> Prec {
        Prec::default()
    }

    #[test]
    fn id_c_example() {
        let h = PLConvexF::from_dual(&PLConvexS::indicator(&Polytope::cube(3, rat(0), rat(1))).unwrap());
        let params = DualParams::new(DualVariant::IdC, rat(3), rat(0));
        let v = dual_family_eval(&params, &Input::F(h), &Vector::basis(3, 0), p()).unwrap();
        assert_eq!(v.as_rational(), Some(rat(4)));
    }

    #[test]
    fn scale_c_example() {
        let k = PLConvexS::indicator(&Polytope::cube(3, rat(-1), rat(1))).unwrap();
        let f = LogConcaveFn::from_f(legendre_s(&k));
        let params = DualParams::new(DualVariant::ScaleC, rat(2), rat(0));
        let v = dual_family_eval(&params, &Input::Lc(f.clone()), &Vector::zeros(3), p()).unwrap();
        assert_eq!(v.as_rational(), Some(rat(2)));
        let wrong = Input::Lc(LogConcaveFn::from_s(k));
        assert!(dual_family_eval(&params, &wrong, &Vector::zeros(3), p()).is_err());
    }

    #[test]
    fn mix_reciprocal_case() {
        let k = PLConvexS::indicator(&Polytope::cube(3, rat(0), rat(1))).unwrap();
        let f = LogConcaveFn::from_f(legendre_s(&k));
        let x = Vector::from_i64(&[1, -1, 2]);
        let params = DualParams::new(DualVariant::Mix, rat(1), rat(0));
        let v = dual_family_eval(&params, &Input::Lc(f), &x, p()).unwrap();
        let want = ExpSum::term(rat(1), Polytope::cube(3, rat(0), rat(1)).support(&x).unwrap());
        assert_eq!(v, Value::Exact(want));
    }

    #[test]
    fn dualized_legendre_is_identity() {
        let h = dualize(&TransformHandle::new(Transform::legendre())).unwrap();
        assert_eq!(h.input_class(), InputClass::F);
        let u = crate::function::fixtures::random_f(&mut crate::function::fixtures::fixture_rng(3, 0), 3);
        let x = Vector::from_i64(&[1, 2, -1]);
        let v = h.eval(&Input::F(u.clone()), &x, p()).unwrap();
        assert_eq!(v.as_rational(), Some(u.eval(&x)));
        assert_eq!(dualize(&h).unwrap(), TransformHandle::new(Transform::legendre()));
    }

    #[test]
    fn handle_json_round_trip() {
        let t = Transform::family(FamilyParams::new(Variant::Thm59, &[rat(1), rat(2)], rat(2), rat(1)).unwrap());
        let h = dualize(&TransformHandle::new(t)).unwrap();
        let js = h.to_json();
        assert_eq!(js["transform"], "thm59");
        assert_eq!(js["dualized"], true);
        assert_eq!(TransformHandle::from_json(&js).unwrap(), h);
        let polytope = TransformHandle::new(Transform::family(FamilyParams::simple(Variant::Thm41, &[1])));
        assert!(dualize(&polytope).is_err());
    }

    #[test]
    fn dual_laws_swap() {
        let h = dualize(&TransformHandle::new(Transform::legendre())).unwrap();
        let names: Vec<String> = h.laws().iter().map(Law::name).collect();
        assert!(names.contains(&"sln_covariant".to_string()));
        assert!(names.contains(&"homomorphism:translate".to_string()));
    }
}
