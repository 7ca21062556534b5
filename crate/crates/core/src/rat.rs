//! Exact scalars and vectors.
//!
//! `Rat` is an arbitrary-precision rational kept in canonical form (reduced,
//! positive denominator). `Vector` is a fixed-length list of `Rat`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"`. Whitespace around the parts is ignored.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::parse(format!("\"{s}\""), "expected a rational \"p/q\" or \"p\"");
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::parse(format!("\"{s}\""), "zero denominator"));
    }
    Ok(Rat::new(num, den))
}

/// Formats as `"p"` for integers, `"p/q"` otherwise.
pub fn format_rat(q: &Rat) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rat_to_f64(q: &Rat) -> f64 {
    // BigRational::to_f64 handles huge numerators/denominators gracefully.
    q.to_f64().unwrap_or_else(|| if q.is_negative() { f64::MIN } else { f64::MAX })
}

/// Smallest rational of the form k/2^20 that is >= sqrt(q), q >= 0.
pub fn sqrt_upper(q: &Rat) -> Rat {
    assert!(!q.is_negative(), "sqrt of a negative rational");
    let scale = rat(1 << 20);
    let mut k = (rat_to_f64(q).sqrt() * (1u64 << 20) as f64).ceil() as i64;
    loop {
        let cand = rat(k) / &scale;
        if &cand * &cand >= *q {
            return cand;
        }
        k += 1;
    }
}

/// Point or direction in R^n with exact coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vector(pub Vec<Rat>);

impl Vector {
    pub fn zeros(n: usize) -> Self {
        Vector(vec![Rat::zero(); n])
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = Rat::one();
        v
    }

    pub fn from_i64(xs: &[i64]) -> Self {
        Vector(xs.iter().map(|&x| rat(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rat> {
        self.0.iter()
    }

    pub fn dot(&self, other: &Vector) -> Rat {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .fold(Rat::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn scale(&self, k: &Rat) -> Vector {
        Vector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn norm_sq(&self) -> Rat {
        self.dot(self)
    }

    /// Appends a trailing coordinate (used to lift x to (x, t)).
    pub fn lift(&self, t: Rat) -> Vector {
        let mut v = self.0.clone();
        v.push(t);
        Vector(v)
    }

    /// Splits (x, t) into x and t.
    pub fn split_last(&self) -> (Vector, Rat) {
        let (t, x) = self.0.split_last().expect("empty vector");
        (Vector(x.to_vec()), t.clone())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(rat_to_f64).collect()
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

impl Index<usize> for Vector {
    type Output = Rat;
    fn index(&self, i: usize) -> &Rat {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut Rat {
        &mut self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, q) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_rat(q))?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Serde adapter for a single `Rat` as a `"p/q"` string. Bare JSON integers
/// are accepted on input.
pub mod rat_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        value_to_rat(&v).map_err(de::Error::custom)
    }
}

pub(crate) fn value_to_rat(v: &serde_json::Value) -> std::result::Result<Rat, String> {
    match v {
        serde_json::Value::String(s) => parse_rat(s).map_err(|e| e.to_string()),
        serde_json::Value::Number(n) if n.is_i64() => Ok(rat(n.as_i64().unwrap())),
        other => Err(format!("expected rational string, got {other}")),
    }
}

/// Serde adapter for `Vec<Rat>` as a list of `"p/q"` strings.
pub mod rats_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
        Vector(q.to_vec()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rat>, D::Error> {
        Ok(Vector::deserialize(d)?.0)
    }
}

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = self.0.iter().map(format_rat).collect();
        strs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let vals = Vec::<serde_json::Value>::deserialize(d)?;
        vals.iter()
            .map(value_to_rat)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Vector)
            .map_err(de::Error::custom)
    }
}

/// Parses a comma-separated coordinate list such as `"1/2, 0, -3"`.
pub fn parse_vector(s: &str) -> Result<Vector> {
    s.split(',').map(parse_rat).collect::<Result<Vec<_>>>().map(Vector)
}

pub fn abs(q: &Rat) -> Rat {
    q.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_are_canonical() {
        assert_eq!(format_rat(&parse_rat("6/-4").unwrap()), "-3/2");
        assert_eq!(format_rat(&parse_rat(" 7 ").unwrap()), "7");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn sqrt_upper_bounds() {
        for k in [0i64, 1, 2, 3, 50, 12345] {
            let q = rat(k);
            let r = sqrt_upper(&q);
            assert!(&r * &r >= q);
            assert!(rat_to_f64(&r) - (k as f64).sqrt() < 1e-5);
        }
    }

    #[test]
    fn vector_json_round_trip() {
        let v = Vector(vec![ratio(1, 2), rat(-3), ratio(5, 7)]);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"["1/2","-3","5/7"]"#);
        let back: Vector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
