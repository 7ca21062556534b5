//! Midpoint-radius ball arithmetic.
//!
//! A [`Ball`] is `mid · 2^exp ± rad` with an arbitrary-precision dyadic
//! midpoint and a small upward-rounded radius. Every operation returns a
//! ball containing the exact result for all inputs in the operand balls, so
//! the radius is a certified error bound.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::rat::Rat;

/// Working precision in bits for ball midpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Prec(pub u32);

impl Prec {
    /// Extra bits carried internally on top of the requested precision.
    pub const GUARD: u32 = 64;

    pub fn bits(self) -> u32 {
        self.0 + Self::GUARD
    }
}

impl Default for Prec {
    fn default() -> Self {
        Prec(128)
    }
}

/// Upper bound `m · 2^e` with a 32-bit mantissa.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mag {
    m: u64,
    e: i64,
}

const MAG_BITS: u32 = 32;

impl Mag {
    pub const ZERO: Mag = Mag { m: 0, e: 0 };

    fn normalized(mut m: u128, mut e: i64) -> Mag {
        if m == 0 {
            return Mag::ZERO;
        }
        let bits = 128 - m.leading_zeros();
        if bits > MAG_BITS {
            let sh = bits - MAG_BITS;
            let lost = m & ((1u128 << sh) - 1);
            m >>= sh;
            if lost != 0 {
                m += 1;
            }
            e += sh as i64;
        }
        Mag { m: m as u64, e }
    }

    /// Upper bound for `|x| · 2^e`.
    pub fn from_biguint(x: &BigUint, e: i64) -> Mag {
        let bits = x.bits();
        if bits <= 64 {
            return Mag::normalized(x.to_u64().unwrap() as u128, e);
        }
        let sh = bits - 64;
        let top = (x >> sh).to_u64().unwrap() as u128 + 1;
        Mag::normalized(top, e + sh as i64)
    }

    pub fn pow2(e: i64) -> Mag {
        Mag { m: 1, e }
    }

    pub fn is_zero(self) -> bool {
        self.m == 0
    }

    pub fn add(self, o: Mag) -> Mag {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let (big, small) = if self.e >= o.e { (self, o) } else { (o, self) };
        let d = big.e - small.e;
        if d > 80 {
            // The small term is below one unit of `big`'s mantissa.
            return Mag::normalized(big.m as u128 + 1, big.e);
        }
        Mag::normalized(((big.m as u128) << d) + small.m as u128, small.e)
    }

    pub fn mul(self, o: Mag) -> Mag {
        if self.is_zero() || o.is_zero() {
            return Mag::ZERO;
        }
        Mag::normalized(self.m as u128 * o.m as u128, self.e + o.e)
    }

    /// Upper bound for `self / k`.
    pub fn div_u64(self, k: u64) -> Mag {
        if self.is_zero() {
            return self;
        }
        let num = (self.m as u128) << 64;
        let q = num.div_ceil(k as u128);
        Mag::normalized(q, self.e - 64)
    }

    /// Upper bound as f64 (saturating to infinity).
    pub fn to_f64(self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let v = self.m as f64 * pow2_f64(self.e);
        // m has at most 32 bits so the product is exact unless it under- or
        // overflows; nudge up to stay an upper bound.
        if v == 0.0 {
            f64::MIN_POSITIVE
        } else {
            v
        }
    }

    /// Exact rational value.
    pub fn to_rat(self) -> Rat {
        dyadic_to_rat(&BigInt::from(self.m), self.e)
    }

    pub fn cmp_value(self, o: Mag) -> Ordering {
        self.to_rat().cmp(&o.to_rat())
    }

    pub fn max(self, o: Mag) -> Mag {
        if self.cmp_value(o) == Ordering::Less {
            o
        } else {
            self
        }
    }
}

fn pow2_f64(e: i64) -> f64 {
    if e > 1023 {
        f64::INFINITY
    } else if e < -1074 {
        0.0
    } else if e < -1022 {
        2f64.powi(-1022) * 2f64.powi((e + 1022) as i32)
    } else {
        2f64.powi(e as i32)
    }
}

fn dyadic_to_rat(m: &BigInt, e: i64) -> Rat {
    if e >= 0 {
        Rat::from_integer(m << e as usize)
    } else {
        Rat::new(m.clone(), BigInt::one() << (-e) as usize)
    }
}

/// Certified enclosure `mid · 2^exp ± rad`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    mid: BigInt,
    exp: i64,
    rad: Mag,
}

impl Ball {
    pub fn zero() -> Ball {
        Ball {
            mid: BigInt::zero(),
            exp: 0,
            rad: Mag::ZERO,
        }
    }

    pub fn one() -> Ball {
        Ball::from_i64(1)
    }

    pub fn from_i64(k: i64) -> Ball {
        Ball {
            mid: BigInt::from(k),
            exp: 0,
            rad: Mag::ZERO,
        }
    }

    /// Enclosure of an exact rational.
    pub fn from_rat(q: &Rat, prec: Prec) -> Ball {
        if q.denom().is_one() {
            return Ball {
                mid: q.numer().clone(),
                exp: 0,
                rad: Mag::ZERO,
            }
            .rounded(prec);
        }
        let bits = prec.bits() as i64;
        // shift so the quotient carries about `bits` significant bits
        let sh = bits - (q.numer().bits() as i64 - q.denom().bits() as i64) + 2;
        let (num, den) = if sh >= 0 {
            (q.numer() << sh as usize, q.denom().clone())
        } else {
            (q.numer().clone(), q.denom() << (-sh) as usize)
        };
        let (quot, rem) = num.div_rem(&den);
        let rad = if rem.is_zero() { Mag::ZERO } else { Mag::pow2(-sh) };
        Ball {
            mid: quot,
            exp: -sh,
            rad,
        }
        .rounded(prec)
    }

    /// Ball `0 ± r`.
    pub fn error(r: Mag) -> Ball {
        Ball {
            mid: BigInt::zero(),
            exp: 0,
            rad: r,
        }
    }

    pub fn rad(&self) -> Mag {
        self.rad
    }

    pub fn mid_rat(&self) -> Rat {
        dyadic_to_rat(&self.mid, self.exp)
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Rounds the midpoint to `prec` bits, moving the error into the radius.
    fn rounded(mut self, prec: Prec) -> Ball {
        let bits = self.mid.bits();
        let p = prec.bits() as u64;
        if bits > p {
            let sh = bits - p;
            let neg = self.mid.is_negative();
            let mag = self.mid.magnitude() >> sh;
            self.mid = BigInt::from_biguint(if neg { Sign::Minus } else { Sign::Plus }, mag);
            self.exp += sh as i64;
            self.rad = self.rad.add(Mag::pow2(self.exp));
        }
        if self.mid.is_zero() {
            self.exp = 0;
        }
        self
    }

    fn mid_mag(&self) -> Mag {
        Mag::from_biguint(self.mid.magnitude(), self.exp)
    }

    /// Upper bound on `|x|` over the ball.
    pub fn abs_upper(&self) -> Mag {
        self.mid_mag().add(self.rad)
    }

    /// Lower bound on `|x|` over the ball (zero when the ball straddles 0).
    pub fn abs_lower(&self) -> f64 {
        let m = self.mid_f64().abs();
        let r = self.rad.to_f64();
        // f64 rounding of m is relative 2^-53; subtract a hair more.
        (m * (1.0 - 1e-15) - r).max(0.0)
    }

    pub fn add(&self, o: &Ball, prec: Prec) -> Ball {
        let (mid, exp) = if self.mid.is_zero() {
            (o.mid.clone(), o.exp)
        } else if o.mid.is_zero() {
            (self.mid.clone(), self.exp)
        } else {
            let e = self.exp.min(o.exp);
            let a = &self.mid << (self.exp - e) as usize;
            let b = &o.mid << (o.exp - e) as usize;
            (a + b, e)
        };
        Ball {
            mid,
            exp,
            rad: self.rad.add(o.rad),
        }
        .rounded(prec)
    }

    pub fn neg(&self) -> Ball {
        Ball {
            mid: -self.mid.clone(),
            exp: self.exp,
            rad: self.rad,
        }
    }

    pub fn sub(&self, o: &Ball, prec: Prec) -> Ball {
        self.add(&o.neg(), prec)
    }

    pub fn mul(&self, o: &Ball, prec: Prec) -> Ball {
        let rad = self
            .mid_mag()
            .mul(o.rad)
            .add(o.mid_mag().mul(self.rad))
            .add(self.rad.mul(o.rad));
        Ball {
            mid: &self.mid * &o.mid,
            exp: self.exp + o.exp,
            rad,
        }
        .rounded(prec)
    }

    pub fn mul_rat(&self, q: &Rat, prec: Prec) -> Ball {
        self.mul(&Ball::from_rat(q, prec), prec)
    }

    /// Multiplication by `2^k`, exact.
    pub fn mul_pow2(&self, k: i64) -> Ball {
        Ball {
            mid: self.mid.clone(),
            exp: if self.mid.is_zero() { 0 } else { self.exp + k },
            rad: Mag {
                m: self.rad.m,
                e: self.rad.e + k,
            },
        }
    }

    pub fn div_u64(&self, k: u64, prec: Prec) -> Ball {
        let bits = prec.bits() as i64;
        let sh = (bits - self.mid.bits() as i64 + 70).max(0);
        let num = &self.mid << sh as usize;
        let (q, r) = num.div_rem(&BigInt::from(k));
        let mut rad = self.rad.div_u64(k);
        if !r.is_zero() {
            rad = rad.add(Mag::pow2(self.exp - sh));
        }
        Ball {
            mid: q,
            exp: self.exp - sh,
            rad,
        }
        .rounded(prec)
    }

    /// `1/x`; `None` if the ball contains zero.
    pub fn recip(&self, prec: Prec) -> Option<Ball> {
        let lo = self.mid_rat().abs() - self.rad.to_rat();
        if !lo.is_positive() {
            return None;
        }
        let m = self.mid_rat();
        let mut out = Ball::from_rat(&m.recip(), prec);
        // |1/x - 1/m| <= r / (|m| (|m| - r))
        let extra = self.rad.to_rat() / (m.abs() * &lo);
        out.rad = out.rad.add(Mag::from_rat_upper(&extra));
        Some(out)
    }

    pub fn div(&self, o: &Ball, prec: Prec) -> Option<Ball> {
        Some(self.mul(&o.recip(prec)?, prec))
    }

    /// e^x with a rigorous Taylor remainder after argument halving.
    pub fn exp(&self, prec: Prec) -> Ball {
        let p = Prec(prec.0 + 16);
        // halve until |x| <= 1/2
        let bound = self.abs_upper().to_f64();
        let mut s: i64 = 0;
        if bound > 0.5 {
            s = (bound / 0.5).log2().ceil() as i64 + 1;
        }
        let x = self.mul_pow2(-s);
        let target = -(p.bits() as f64) - 2.0;
        let mut sum = Ball::one();
        let mut term = Ball::one();
        let mut k = 1u64;
        // |x| <= 1/2 so the tail after term k is at most 2 |x|^{k+1}/(k+1)!.
        let xr = x.abs_upper().to_f64().max(1e-300);
        let mut log_tail = xr.log2();
        loop {
            term = term.mul(&x, p).div_u64(k, p);
            sum = sum.add(&term, p);
            k += 1;
            log_tail += xr.log2() - (k as f64).log2();
            if log_tail + 1.0 < target || k > 4000 {
                break;
            }
        }
        let tail = tail_bound(xr, k);
        sum.rad = sum.rad.add(tail);
        for _ in 0..s {
            sum = sum.mul(&sum, p);
        }
        sum.rounded(prec)
    }

    pub fn mid_f64(&self) -> f64 {
        let bits = self.mid.bits();
        if bits <= 60 {
            return self.mid.to_f64().unwrap() * pow2_f64(self.exp);
        }
        let sh = bits - 60;
        let top = (&self.mid >> sh as usize).to_f64().unwrap();
        top * pow2_f64(self.exp + sh as i64)
    }

    pub fn to_f64(&self) -> f64 {
        self.mid_f64()
    }

    /// Certified `self <= o` (false when undecided).
    pub fn certainly_le(&self, o: &Ball) -> bool {
        let d = o.sub(self, Prec(256));
        d.mid_rat() >= d.rad.to_rat()
    }

    pub fn certainly_lt(&self, o: &Ball) -> bool {
        let d = o.sub(self, Prec(256));
        d.mid_rat() > d.rad.to_rat()
    }

    /// Largest certified lower bound on `|a - b|` (0 if they may coincide).
    pub fn separation(a: &Ball, b: &Ball) -> f64 {
        a.sub(b, Prec(256)).abs_lower()
    }

    /// 40 significant decimal digits of the midpoint.
    pub fn to_decimal(&self, digits: usize) -> String {
        format_decimal(&self.mid_rat(), digits)
    }

    /// Radius plus the decimal truncation error of [`Ball::to_decimal`].
    pub fn err_bound_decimal(&self, digits: usize) -> String {
        let m = self.mid_f64().abs();
        let trunc = m * 10f64.powi(1 - digits as i32);
        let r = self.rad.to_f64() + trunc;
        format!("{:.3e}", r * (1.0 + 1e-12))
    }
}

impl Mag {
    /// Upper bound for a nonnegative rational.
    pub fn from_rat_upper(q: &Rat) -> Mag {
        if !q.is_positive() {
            return Mag::ZERO;
        }
        let sh = 64 - (q.numer().bits() as i64 - q.denom().bits() as i64);
        let (num, den) = if sh >= 0 {
            (q.numer() << sh as usize, q.denom().clone())
        } else {
            (q.numer().clone(), q.denom() << (-sh) as usize)
        };
        let quot = num.div_ceil(&den);
        Mag::from_biguint(quot.magnitude(), -sh)
    }
}

/// Upper bound on `2 x^k / k!` for `x <= 1/2`, as a `Mag`.
fn tail_bound(x: f64, k: u64) -> Mag {
    let mut lg = 1.0 + k as f64 * x.log2();
    for j in 2..=k {
        lg -= (j as f64).log2();
    }
    // generous slack for f64 rounding in the logarithms
    Mag::pow2((lg + 2.0).ceil() as i64)
}

fn format_decimal(q: &Rat, digits: usize) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let neg = q.is_negative();
    let a = q.abs();
    let ten = BigInt::from(10);
    let est = crate::rat::rat_to_f64(&a).log10();
    let mut d = if est.is_finite() { est.floor() as i64 } else { 0 };
    let scaled = |d: i64| -> BigInt {
        let sh = digits as i64 - 1 - d;
        let v = if sh >= 0 {
            &a * Rat::from_integer(ten.pow(sh as u32))
        } else {
            &a / Rat::from_integer(ten.pow((-sh) as u32))
        };
        (v + Rat::new(1.into(), 2.into())).floor().to_integer()
    };
    let mut s = scaled(d);
    let lo = ten.pow(digits as u32 - 1);
    let hi = ten.pow(digits as u32);
    while s >= hi {
        d += 1;
        s = scaled(d);
    }
    while s < lo {
        d -= 1;
        s = scaled(d);
    }
    let ds = s.to_string();
    format!("{}{}.{}e{}", if neg { "-" } else { "" }, &ds[..1], &ds[1..], d)
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:.3e}", self.to_decimal(20), self.rad.to_f64())
    }
}

/// Serialized transcendental result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealJson {
    pub value: String,
    pub err_bound: String,
}

impl From<&Ball> for RealJson {
    fn from(b: &Ball) -> Self {
        RealJson {
            value: b.to_decimal(40),
            err_bound: b.err_bound_decimal(40),
        }
    }
}

/// e^q for rational q.
pub fn exp_rat(q: &Rat, prec: Prec) -> Ball {
    Ball::from_rat(q, prec).exp(prec)
}

/// Relative residual `max(0, |a-b| - rad) / max(|a|, |b|, tiny)`.
pub fn relative_residual(a: &Ball, b: &Ball) -> f64 {
    let sep = Ball::separation(a, b);
    if sep == 0.0 {
        return 0.0;
    }
    let scale = a.mid_f64().abs().max(b.mid_f64().abs()).max(f64::MIN_POSITIVE);
    sep / scale
}

/// Relative spread `rad / |mid|` of a ball.
pub fn relative_radius(b: &Ball) -> f64 {
    let m = b.mid_f64().abs();
    if m == 0.0 {
        return if b.rad.is_zero() { 0.0 } else { f64::INFINITY };
    }
    b.rad.to_f64() / m
}
