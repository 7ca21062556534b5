use serde_json::{json, Value as Json};

use super::family::{family_eval, FamilyParams, Variant};
use super::input::{Input, InputClass};
use crate::duality::{dual_family_eval, DualParams, DualVariant};
use crate::error::{Error, Result};
use crate::rat::{rat, Rat, Vector};
use crate::real::Prec;
use crate::value::Value;

/// Anything the law checkers can evaluate: a map from inputs of one class
/// to functions on `ℝⁿ` (or `ℝⁿ∖{0}` when punctured).
pub trait Evaluator {
    fn id(&self) -> String;
    fn input_class(&self) -> InputClass;
    fn eval(&self, input: &Input, x: &Vector, prec: Prec) -> Result<Value>;
    /// Values are only defined for `x ≠ 0`.
    fn punctured(&self) -> bool {
        false
    }
    fn laws(&self) -> Vec<Law>;
    /// Normalizes a random fixture before it is used for the non-lattice laws.
    fn prepare(&self, input: Input) -> Input {
        input
    }
}

/// How the output changes under an input operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Combine {
    /// `Φu(x - a y) + b x·y`
    Add,
    /// `Φu(x - a y) · e^{b x·y}`
    Mul,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputOp {
    /// `τ_y`, `P + y`
    Translate,
    /// `+ℓ_y`, `e^{-ℓ_y}·`
    DualTranslate,
}

impl InputOp {
    pub fn apply(self, input: &Input, y: &Vector) -> Result<Input> {
        match self {
            InputOp::Translate => input.translate(y),
            InputOp::DualTranslate => input.dual_translate(y),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            InputOp::Translate => "translate",
            InputOp::DualTranslate => "dual_translate",
        }
    }

    pub fn swap(self) -> InputOp {
        match self {
            InputOp::Translate => InputOp::DualTranslate,
            InputOp::DualTranslate => InputOp::Translate,
        }
    }
}

/// Coefficient `b` of the affine law.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coef {
    Const(Rat),
    /// `Z₀(P)` of a polytope family.
    Z0(FamilyParams),
}

impl Coef {
    pub fn value(&self, input: &Input) -> Rat {
        match (self, input) {
            (Coef::Const(b), _) => b.clone(),
            (Coef::Z0(p), Input::Polytope(poly)) => p.z0(poly),
            (Coef::Z0(_), _) => Rat::from_integer(0.into()),
        }
    }
}

/// `Φ(T_y u)(x) = Φu(x - a·y) ⊕ b·(x·y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineLaw {
    pub name: String,
    pub op: InputOp,
    pub shift: Rat,
    pub coef: Coef,
    pub combine: Combine,
    /// The suite expects this law to fail.
    pub expect_failure: bool,
}

impl AffineLaw {
    pub fn new(family: &str, op: InputOp, shift: Rat, coef: Rat, combine: Combine) -> Self {
        AffineLaw {
            name: format!("{family}:{}", op.tag()),
            op,
            shift,
            coef: Coef::Const(coef),
            combine,
            expect_failure: false,
        }
    }

    /// `Φ(τ_y u) = Φu + ℓ_{by}` / `e^{ℓ_{by}}Φu`.
    pub fn tau(family: &str, b: Rat, combine: Combine) -> Self {
        Self::new(family, InputOp::Translate, rat(0), b, combine)
    }

    /// `Φ(u + ℓ_y) = τ_{ay}Φu`.
    pub fn ell(family: &str, a: Rat) -> Self {
        Self::new(family, InputOp::DualTranslate, a, rat(0), Combine::Add)
    }

    /// The law obeyed by `Φ*` when `Φ` obeys `self`: `*` swaps the two
    /// translations.
    pub fn dualized(&self, family: &str) -> Self {
        let op = self.op.swap();
        AffineLaw { name: format!("{family}:{}", op.tag()), op, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Law {
    Valuation,
    /// `Φ(u∘φ^{-1}) = Φu∘φ^t` (for polytopes: `Z(φP) = ZP∘φ^t`).
    SlnTranspose(&'static str),
    /// `Φ(u∘φ^{-1}) = Φu∘φ^{-1}`.
    SlnInverse,
    Affine(AffineLaw),
}

impl Law {
    pub fn name(&self) -> String {
        match self {
            Law::Valuation => "valuation".into(),
            Law::SlnTranspose(n) => (*n).into(),
            Law::SlnInverse => "sln_covariant".into(),
            Law::Affine(a) => a.name.clone(),
        }
    }
}

/// A concrete transform: a classified family or a dual family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Transform {
    Family(FamilyParams),
    Dual(DualParams),
}

impl Transform {
    pub fn legendre() -> Self {
        Transform::Family(FamilyParams::simple(Variant::Legendre, &[]))
    }

    pub fn laplace() -> Self {
        Transform::Family(FamilyParams::simple(Variant::Laplace, &[1]))
    }

    pub fn polar() -> Self {
        Transform::Family(FamilyParams::simple(Variant::Polar, &[1]))
    }

    pub fn weird() -> Self {
        Transform::Family(FamilyParams::simple(Variant::Weird, &[]))
    }

    pub fn family(p: FamilyParams) -> Self {
        Transform::Family(p)
    }

    /// Transform id as used in handle JSON.
    pub fn name(&self) -> &'static str {
        match self {
            Transform::Family(p) => p.variant.name(),
            Transform::Dual(p) => p.variant.name(),
        }
    }

    pub fn params_json(&self) -> Json {
        match self {
            Transform::Family(p) => {
                let mut v = serde_json::to_value(p).expect("serializable");
                v.as_object_mut().expect("object").remove("variant");
                v
            }
            Transform::Dual(p) => {
                let mut v = serde_json::to_value(p).expect("serializable");
                v.as_object_mut().expect("object").remove("variant");
                v
            }
        }
    }

    pub fn from_parts(id: &str, params: &Json) -> Result<Self> {
        let mut obj = match params {
            Json::Object(m) => m.clone(),
            Json::Null => Default::default(),
            _ => return Err(Error::parse("params", "expected an object")),
        };
        obj.insert("variant".into(), Json::String(id.into()));
        let v = Json::Object(obj);
        if let Ok(dv) = serde_json::from_value::<DualVariant>(Json::String(id.into())) {
            let mut p: DualParams = serde_json::from_value(v).map_err(|e| Error::parse("params", e.to_string()))?;
            p.variant = dv;
            return Ok(Transform::Dual(p));
        }
        let defaults = match id {
            "laplace" | "polar" => Some(1),
            _ => None,
        };
        let has_c = v.get("c").is_some();
        let mut p: FamilyParams = serde_json::from_value(v).map_err(|e| Error::parse("transform", e.to_string()))?;
        if let (Some(k), false) = (defaults, has_c) {
            p.c[0] = rat(k);
        }
        // trailing constants may be omitted
        Ok(Transform::Family(FamilyParams::new(p.variant, &p.c, p.sigma, p.eps)?))
    }
}

impl Evaluator for Transform {
    fn id(&self) -> String {
        match self {
            Transform::Family(p) => match p.variant {
                Variant::Legendre | Variant::Weird if p.c.iter().all(|c| *c == rat(0)) => p.variant.name().into(),
                Variant::Laplace | Variant::Polar if p.c[0] == rat(1) => p.variant.name().into(),
                _ => format!("family({})", json!({ "transform": self.name(), "params": self.params_json() })),
            },
            Transform::Dual(p) => format!("{}({})", p.variant.name(), json!(self.params_json())),
        }
    }

    fn input_class(&self) -> InputClass {
        match self {
            Transform::Family(p) => p.variant.input_class(),
            Transform::Dual(p) => p.variant.input_class(),
        }
    }

    fn eval(&self, input: &Input, x: &Vector, prec: Prec) -> Result<Value> {
        match self {
            Transform::Family(p) => family_eval(p, input, x, prec),
            Transform::Dual(p) => dual_family_eval(p, input, x, prec),
        }
    }

    fn punctured(&self) -> bool {
        match self {
            Transform::Family(p) => matches!(p.variant, Variant::Thm41 | Variant::Thm42 | Variant::Weird),
            Transform::Dual(_) => false,
        }
    }

    /// `Ẑ` is only translation conjugating for `min u = 0`.
    fn prepare(&self, input: Input) -> Input {
        match (self, input) {
            (Transform::Family(p), Input::S(u)) if p.variant == Variant::Weird => {
                let m = u.min_value();
                Input::S(u.add_const(&-m))
            }
            (_, input) => input,
        }
    }

    fn laws(&self) -> Vec<Law> {
        let one = rat(1);
        match self {
            Transform::Family(p) => {
                let sln = match p.variant {
                    Variant::Thm41 | Variant::Thm42 => Law::SlnTranspose("sln_covariant"),
                    _ => Law::SlnTranspose("sln_contravariant"),
                };
                let mut laws = vec![Law::Valuation, sln];
                let (sigma, eps) = (p.sigma.clone(), p.eps.clone());
                let affine = match p.variant {
                    Variant::Legendre => vec![
                        AffineLaw::tau("translation_conjugation", one.clone(), Combine::Add),
                        AffineLaw::ell("translation_conjugation", one),
                    ],
                    Variant::Weird => {
                        let mut second = AffineLaw::ell("translation_conjugation", one.clone());
                        second.expect_failure = true;
                        vec![AffineLaw::tau("translation_conjugation", one, Combine::Add), second]
                    }
                    Variant::Thm52 => vec![
                        AffineLaw::tau("translation_conjugation", sigma, Combine::Add),
                        AffineLaw::ell("translation_conjugation", eps),
                    ],
                    Variant::Thm59 => vec![
                        AffineLaw::tau("laplace_laws", sigma, Combine::Mul),
                        AffineLaw::ell("laplace_laws", eps),
                    ],
                    Variant::Polar => vec![
                        AffineLaw::tau("log_conjugation", -one.clone(), Combine::Mul),
                        AffineLaw::ell("log_conjugation", one),
                    ],
                    Variant::Laplace | Variant::Thm13 => vec![
                        AffineLaw::tau("laplace_laws", one.clone(), Combine::Mul),
                        AffineLaw::ell("laplace_laws", one),
                    ],
                    Variant::Thm41 => vec![AffineLaw {
                        name: "translation_covariant:translate".into(),
                        op: InputOp::Translate,
                        shift: rat(0),
                        coef: Coef::Z0(p.clone()),
                        combine: Combine::Add,
                        expect_failure: false,
                    }],
                    Variant::Thm42 => vec![AffineLaw {
                        name: "log_translation_covariant:translate".into(),
                        op: InputOp::Translate,
                        shift: rat(0),
                        coef: Coef::Z0(p.clone()),
                        combine: Combine::Mul,
                        expect_failure: false,
                    }],
                };
                laws.extend(affine.into_iter().map(Law::Affine));
                laws
            }
            Transform::Dual(p) => {
                let family = "homomorphism";
                let second = match p.variant {
                    DualVariant::IdC => AffineLaw::new(family, InputOp::DualTranslate, rat(0), one.clone(), Combine::Add),
                    DualVariant::ScaleC => {
                        AffineLaw::new(family, InputOp::DualTranslate, rat(0), -one.clone(), Combine::Mul)
                    }
                    DualVariant::Mix => AffineLaw::new(family, InputOp::DualTranslate, rat(0), one.clone(), Combine::Mul),
                };
                let first = AffineLaw::new(family, InputOp::Translate, one, rat(0), Combine::Add);
                vec![Law::Valuation, Law::SlnInverse, Law::Affine(first), Law::Affine(second)]
            }
        }
    }
}
