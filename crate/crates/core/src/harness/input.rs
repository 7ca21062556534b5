use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};

use crate::error::{Error, Result};
use crate::function::{LcKind, LogConcaveFn, PLConvexF, PLConvexS};
use crate::geom::{Polytope, UnimodularMap};
use crate::rat::{Rat, Vector};

/// Domain a transform acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputClass {
    Polytope,
    /// Polyhedral super-coercive convex functions.
    S,
    /// Finite max-affine convex functions.
    F,
    /// `e^{-u}` with `u` of class S.
    LcSc,
    /// `e^{-u}` with `u` of class F.
    LcPos,
}

impl InputClass {
    /// Class of the conjugate / polar.
    pub fn dual(self) -> Result<InputClass> {
        match self {
            InputClass::S => Ok(InputClass::F),
            InputClass::F => Ok(InputClass::S),
            InputClass::LcSc => Ok(InputClass::LcPos),
            InputClass::LcPos => Ok(InputClass::LcSc),
            InputClass::Polytope => Err(Error::Input("polytope transforms have no dual".into())),
        }
    }
}

impl fmt::Display for InputClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            InputClass::Polytope => "polytope",
            InputClass::S => "S",
            InputClass::F => "F",
            InputClass::LcSc => "LC_sc",
            InputClass::LcPos => "LC_+",
        };
        f.write_str(s)
    }
}

/// Argument of a transform.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Input {
    Polytope(Polytope),
    S(PLConvexS),
    F(PLConvexF),
    Lc(LogConcaveFn),
}

impl Input {
    pub fn class(&self) -> InputClass {
        match self {
            Input::Polytope(_) => InputClass::Polytope,
            Input::S(_) => InputClass::S,
            Input::F(_) => InputClass::F,
            Input::Lc(f) => match f.kind() {
                LcKind::S => InputClass::LcSc,
                LcKind::F => InputClass::LcPos,
            },
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Input::Polytope(p) => p.ambient_dim(),
            Input::S(u) => u.dim(),
            Input::F(u) => u.dim(),
            Input::Lc(f) => f.dim(),
        }
    }

    /// `P + y`, `τ_y u`, `τ_y f`.
    pub fn translate(&self, y: &Vector) -> Result<Input> {
        Ok(match self {
            Input::Polytope(p) => Input::Polytope(p.translate(y)?),
            Input::S(u) => Input::S(u.translate(y)?),
            Input::F(u) => Input::F(u.translate(y)?),
            Input::Lc(f) => Input::Lc(f.translate(y)?),
        })
    }

    /// `u + ℓ_y`, `e^{-ℓ_y} f`.
    pub fn dual_translate(&self, y: &Vector) -> Result<Input> {
        Ok(match self {
            Input::Polytope(_) => return Err(Error::Input("dual translation of a polytope".into())),
            Input::S(u) => Input::S(u.dual_translate(y)?),
            Input::F(u) => Input::F(u.dual_translate(y)?),
            Input::Lc(f) => Input::Lc(f.mul_exp_linear(y)?),
        })
    }

    /// `u + t`, `e^{-t} f`.
    pub fn add_const(&self, t: &Rat) -> Result<Input> {
        Ok(match self {
            Input::Polytope(_) => return Err(Error::Input("constant shift of a polytope".into())),
            Input::S(u) => Input::S(u.add_const(t)),
            Input::F(u) => Input::F(u.add_const(t)),
            Input::Lc(f) => Input::Lc(f.mul_exp_const(t)),
        })
    }

    /// `φP`, `u ∘ φ^{-1}`, `f ∘ φ^{-1}`.
    pub fn compose_inverse(&self, phi: &UnimodularMap) -> Result<Input> {
        Ok(match self {
            Input::Polytope(p) => Input::Polytope(p.apply_map(phi)?),
            Input::S(u) => Input::S(u.compose_inverse(phi)?),
            Input::F(u) => Input::F(u.compose_inverse(phi)?),
            Input::Lc(f) => Input::Lc(f.compose_inverse(phi)?),
        })
    }

    /// `u ∘ λ` (`λ^{-1}P` for polytopes).
    pub fn scale_arg(&self, lambda: &Rat) -> Result<Input> {
        Ok(match self {
            Input::Polytope(p) => Input::Polytope(p.scale(&lambda.recip())),
            Input::S(u) => Input::S(u.scale_arg(lambda)?),
            Input::F(u) => Input::F(u.scale_arg(lambda)?),
            Input::Lc(f) => Input::Lc(f.scale_arg(lambda)?),
        })
    }

    pub fn to_json(&self) -> Json {
        match self {
            Input::Polytope(p) => json!({ "polytope": p }),
            Input::S(u) => json!({ "S": u }),
            Input::F(u) => json!({ "F": u }),
            Input::Lc(f) => json!({ "LC": f.to_json() }),
        }
    }

    /// Accepts the wrapped form written by [`Input::to_json`] or a bare
    /// object recognized by its keys: `vertices` (polytope), `kind`
    /// (log-concave), `points` (S), `pieces` (F).
    pub fn from_json(v: &Json) -> Result<Input> {
        let obj = v.as_object().ok_or_else(|| Error::parse("$", "expected a JSON object"))?;
        let at = |key: &str, e: serde_json::Error| Error::parse(format!("$.{key}"), e.to_string());
        if obj.len() == 1 {
            let (k, inner) = obj.iter().next().expect("one entry");
            match k.as_str() {
                "polytope" => return Ok(Input::Polytope(serde_json::from_value(inner.clone()).map_err(|e| at(k, e))?)),
                "S" => return Ok(Input::S(serde_json::from_value(inner.clone()).map_err(|e| at(k, e))?)),
                "F" => return Ok(Input::F(serde_json::from_value(inner.clone()).map_err(|e| at(k, e))?)),
                "LC" => return Ok(Input::Lc(LogConcaveFn::from_json(inner)?)),
                _ => {}
            }
        }
        let whole = |e: serde_json::Error| Error::parse("$", e.to_string());
        if obj.contains_key("kind") {
            Ok(Input::Lc(LogConcaveFn::from_json(v)?))
        } else if obj.contains_key("vertices") {
            Ok(Input::Polytope(serde_json::from_value(v.clone()).map_err(whole)?))
        } else if obj.contains_key("points") {
            Ok(Input::S(serde_json::from_value(v.clone()).map_err(whole)?))
        } else if obj.contains_key("pieces") {
            Ok(Input::F(serde_json::from_value(v.clone()).map_err(whole)?))
        } else {
            Err(Error::parse("$", "expected one of polytope, S, F, LC or a bare vertices/points/pieces/kind object"))
        }
    }

    /// Parses JSON text; syntax errors carry line and column.
    pub fn parse_str(text: &str) -> Result<Input> {
        Input::from_json(&parse_json(text)?)
    }
}

/// JSON text to a value, with syntax errors located as `line L column C`.
pub fn parse_json(text: &str) -> Result<Json> {
    serde_json::from_str(text).map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::fixtures::{fixture_rng, random_f, random_s};
    use crate::rat::rat;

    #[test]
    fn json_round_trip_all_classes() {
        let mut rng = fixture_rng(3, 0);
        let u = random_s(&mut rng, 2);
        let inputs = vec![
            Input::Polytope(Polytope::cube(2, rat(0), rat(1))),
            Input::S(u.clone()),
            Input::F(random_f(&mut rng, 2)),
            Input::Lc(LogConcaveFn::from_s(u)),
        ];
        for i in inputs {
            assert_eq!(Input::from_json(&i.to_json()).unwrap().to_json(), i.to_json());
        }
    }

    #[test]
    fn bare_objects_are_recognized() {
        let p = Input::parse_str(r#"{"dim":1,"vertices":[["0"],["2"]]}"#).unwrap();
        assert_eq!(p.class(), InputClass::Polytope);
        let s = Input::parse_str(r#"{"points":[{"x":["0"],"t":"1"},{"x":["1"],"t":"0"}]}"#).unwrap();
        assert_eq!(s.class(), InputClass::S);
    }

    #[test]
    fn syntax_errors_have_a_location() {
        match Input::parse_str("{\n  \"S\": [1,\n") {
            Err(Error::Parse { location, .. }) => assert!(location.starts_with("line "), "{location}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(Input::parse_str("{\"Q\": 1}"), Err(Error::Parse { .. })));
    }
}
