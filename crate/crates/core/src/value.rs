//! Values produced by transforms: exact exponential sums where the result
//! stays in `ℚ[e^ℚ]`, certified balls otherwise.

use num_traits::Zero;
use serde::Serialize;

use crate::expint::ExpSum;
use crate::rat::{format_rat, Rat};
use crate::real::{exp_rat, relative_residual, Ball, Prec, RealJson};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Exact(ExpSum),
    Approx(Ball),
}

impl Value {
    pub fn rational(q: Rat) -> Self {
        Value::Exact(ExpSum::rational(q))
    }

    pub fn zero() -> Self {
        Value::Exact(ExpSum::zero())
    }

    pub fn as_rational(&self) -> Option<Rat> {
        match self {
            Value::Exact(s) => s.as_rational(),
            Value::Approx(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn to_ball(&self, prec: Prec) -> Ball {
        match self {
            Value::Exact(s) => s.eval(prec),
            Value::Approx(b) => b.clone(),
        }
    }

    pub fn add(&self, o: &Value, prec: Prec) -> Value {
        match (self, o) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a.add(b)),
            _ => Value::Approx(self.to_ball(prec).add(&o.to_ball(prec), prec)),
        }
    }

    pub fn scale(&self, k: &Rat, prec: Prec) -> Value {
        match self {
            Value::Exact(a) => Value::Exact(a.scale(k)),
            Value::Approx(b) => Value::Approx(b.mul_rat(k, prec)),
        }
    }

    /// Multiplication by `e^q`.
    pub fn mul_exp(&self, q: &Rat, prec: Prec) -> Value {
        match self {
            Value::Exact(a) => Value::Exact(a.shift(q)),
            Value::Approx(b) => {
                if q.is_zero() {
                    Value::Approx(b.clone())
                } else {
                    Value::Approx(b.mul(&exp_rat(q, prec), prec))
                }
            }
        }
    }

    pub fn to_f64(&self, prec: Prec) -> f64 {
        self.to_ball(prec).to_f64()
    }

    pub fn to_json(&self, prec: Prec) -> ValueJson {
        let ball = self.to_ball(prec);
        let real = RealJson::from(&ball);
        ValueJson {
            value: real.value,
            err_bound: real.err_bound,
            exact: self.as_rational().map(|q| format_rat(&q)),
        }
    }
}

/// `{"value", "err_bound"}` plus the exact rational when there is one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValueJson {
    pub value: String,
    pub err_bound: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

/// Discrepancy between two values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    /// Both sides exact and their difference was decided exactly.
    pub exact: bool,
    /// Certified lower bound on `|a - b|` (exactly 0 when equal).
    pub abs: f64,
    /// `abs / max(|a|, |b|)`.
    pub rel: f64,
}

impl Residual {
    pub const ZERO: Residual = Residual { exact: true, abs: 0.0, rel: 0.0 };

    pub fn is_zero(&self) -> bool {
        self.abs == 0.0
    }
}

pub fn residual(a: &Value, b: &Value, prec: Prec) -> Residual {
    if let (Value::Exact(x), Value::Exact(y)) = (a, b) {
        let d = x.sub(y);
        if d.is_zero() {
            return Residual::ZERO;
        }
        // Distinct exponential sums are distinct reals; report a size.
        let db = d.eval(prec);
        let scale = x.eval(prec).to_f64().abs().max(y.eval(prec).to_f64().abs());
        let abs = db.to_f64().abs().max(f64::MIN_POSITIVE);
        return Residual { exact: true, abs, rel: abs / scale.max(f64::MIN_POSITIVE) };
    }
    let (x, y) = (a.to_ball(prec), b.to_ball(prec));
    let abs = Ball::separation(&x, &y);
    Residual { exact: false, abs, rel: relative_residual(&x, &y) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, ratio};

    #[test]
    fn exact_arithmetic_stays_exact() {
        let p = Prec::default();
        let a = Value::rational(rat(2)).mul_exp(&rat(1), p);
        let b = Value::Exact(ExpSum::term(rat(1), rat(1))).scale(&rat(2), p);
        assert_eq!(residual(&a, &b, p), Residual::ZERO);
        let c = b.add(&Value::rational(ratio(1, 1000)), p);
        let r = residual(&a, &c, p);
        assert!(r.exact && r.abs > 0.0);
    }

    #[test]
    fn mixed_values_use_balls() {
        let p = Prec::default();
        let e = Value::Approx(exp_rat(&rat(1), p));
        let r = residual(&e, &Value::Exact(ExpSum::term(rat(1), rat(1))), p);
        assert!(!r.exact);
        assert!(r.rel < 1e-30);
    }
}
