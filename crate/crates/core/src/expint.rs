//! Exponential integrals: divided differences of exp, exact sums of
//! exponentials, and closed-form integrals of polynomial × exponential
//! densities against piecewise polynomials.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::geom::profile::{poly_mul, shift_poly};
use crate::geom::PiecewisePoly;
use crate::rat::{format_rat, rat, Rat};
use crate::real::{exp_rat, relative_radius, Ball, Mag, Prec};

/// Largest precision the adaptive evaluators will escalate to.
pub const MAX_PREC_BITS: u32 = 4096;

/// Finite sum `Σ c_q e^q` with exact rational exponents and coefficients.
///
/// Exponentials at distinct rational exponents are linearly independent over
/// the rationals, so two sums are equal as real numbers exactly when their
/// term maps coincide.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExpSum {
    terms: BTreeMap<Rat, Rat>,
}

impl ExpSum {
    pub fn zero() -> Self {
        ExpSum::default()
    }

    pub fn rational(c: Rat) -> Self {
        ExpSum::term(c, Rat::zero())
    }

    /// `c · e^q`
    pub fn term(c: Rat, q: Rat) -> Self {
        let mut s = ExpSum::zero();
        s.add_term(c, q);
        s
    }

    pub fn add_term(&mut self, c: Rat, q: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(q.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&q);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rat, &Rat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value when it is rational (all weight on `e^0`).
    pub fn as_rational(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&Rat::zero()).cloned(),
            _ => None,
        }
    }

    pub fn add(&self, o: &ExpSum) -> ExpSum {
        let mut out = self.clone();
        for (q, c) in &o.terms {
            out.add_term(c.clone(), q.clone());
        }
        out
    }

    pub fn sub(&self, o: &ExpSum) -> ExpSum {
        self.add(&o.scale(&-Rat::one()))
    }

    pub fn scale(&self, k: &Rat) -> ExpSum {
        let mut out = ExpSum::zero();
        for (q, c) in &self.terms {
            out.add_term(c * k, q.clone());
        }
        out
    }

    /// Multiplication by `e^s`.
    pub fn shift(&self, s: &Rat) -> ExpSum {
        ExpSum {
            terms: self.terms.iter().map(|(q, c)| (q + s, c.clone())).collect(),
        }
    }

    pub fn mul(&self, o: &ExpSum) -> ExpSum {
        let mut out = ExpSum::zero();
        for (q1, c1) in &self.terms {
            for (q2, c2) in &o.terms {
                out.add_term(c1 * c2, q1 + q2);
            }
        }
        out
    }

    /// Enclosure at a fixed precision.
    pub fn eval_at(&self, prec: Prec) -> Ball {
        self.terms.iter().fold(Ball::zero(), |acc, (q, c)| {
            let term = if q.is_zero() {
                Ball::from_rat(c, prec)
            } else {
                exp_rat(q, prec).mul_rat(c, prec)
            };
            acc.add(&term, prec)
        })
    }

    /// Enclosure whose relative radius is at most `2^-prec` where possible,
    /// doubling the working precision to beat cancellation.
    pub fn eval(&self, prec: Prec) -> Ball {
        adaptive(prec, |p| self.eval_at(p))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(q, c)| serde_json::json!({"coeff": format_rat(c), "exponent": format_rat(q)}))
                .collect(),
        )
    }
}

/// Reruns `f` at doubled precision until the relative radius is small.
pub fn adaptive(prec: Prec, f: impl Fn(Prec) -> Ball) -> Ball {
    let target = 2f64.powi(-(prec.0 as i32 - 16).clamp(8, 1000));
    let mut p = prec;
    loop {
        let b = f(p);
        if relative_radius(&b) <= target || p.0 >= MAX_PREC_BITS || (b.mid_f64() == 0.0 && b.is_exact()) {
            return b;
        }
        p = Prec(p.0 * 2);
    }
}

/// Product of ball matrices, upper-triangular shape assumed.
fn upper_mul(a: &[Vec<Ball>], b: &[Vec<Ball>], prec: Prec) -> Vec<Vec<Ball>> {
    let n = a.len();
    let mut out = vec![vec![Ball::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let mut s = Ball::zero();
            for k in i..=j {
                s = s.add(&a[i][k].mul(&b[k][j], prec), prec);
            }
            out[i][j] = s;
        }
    }
    out
}

/// Divided difference `DD[exp; z_0, …, z_k]`, confluent nodes allowed.
///
/// Evaluated as the top-right entry of `exp(Z)` for the bidiagonal matrix
/// with the nodes on the diagonal and ones above it. Nodes are recentered at
/// an integer `c` first, using `DD[exp; z] = e^c DD[exp; z - c]`.
pub fn divided_diff_exp(nodes: &[Rat], prec: Prec) -> Ball {
    assert!(!nodes.is_empty(), "divided difference needs at least one node");
    adaptive(prec, |p| divided_diff_exp_at(nodes, p))
}

fn divided_diff_exp_at(nodes: &[Rat], prec: Prec) -> Ball {
    let lo = nodes.iter().min().unwrap();
    let hi = nodes.iter().max().unwrap();
    let c = ((lo + hi) / rat(2)).round();
    let wp = Prec(prec.0 + 32);
    let k = nodes.len();
    let shifted: Vec<Rat> = nodes.iter().map(|z| z - &c).collect();
    let norm = shifted.iter().map(|z| z.abs()).max().unwrap() + Rat::one();
    let norm_f = crate::rat::rat_to_f64(&norm);
    let s: i64 = if norm_f <= 0.5 { 0 } else { (norm_f / 0.5).log2().ceil() as i64 + 1 };

    // B = Z / 2^s, ‖B‖∞ <= 1/2
    let scale = Rat::one() / Rat::from_integer(num_bigint::BigInt::one() << s as usize);
    let mut b = vec![vec![Ball::zero(); k]; k];
    for i in 0..k {
        b[i][i] = Ball::from_rat(&(&shifted[i] * &scale), wp);
        if i + 1 < k {
            b[i][i + 1] = Ball::from_rat(&scale, wp);
        }
    }
    let bnorm = crate::rat::rat_to_f64(&(&norm * &scale)) * (1.0 + 1e-12);

    let mut sum: Vec<Vec<Ball>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { Ball::one() } else { Ball::zero() }).collect())
        .collect();
    let mut term = sum.clone();
    let target = -(wp.bits() as f64) - 4.0;
    let mut j = 1u64;
    let mut log_next = bnorm.max(1e-300).log2(); // log2(‖B‖^j / j!) for the next j
    loop {
        term = upper_mul(&term, &b, wp);
        for row in term.iter_mut() {
            for e in row.iter_mut() {
                *e = e.div_u64(j, wp);
            }
        }
        for r in 0..k {
            for cc in r..k {
                sum[r][cc] = sum[r][cc].add(&term[r][cc], wp);
            }
        }
        j += 1;
        log_next += bnorm.max(1e-300).log2() - (j as f64).log2();
        if log_next + 1.0 < target || j > 4000 {
            break;
        }
    }
    // Entrywise tail bound 2 ‖B‖^j / j! (geometric series with ratio <= 1/2).
    let tail = Mag::pow2((log_next + 3.0).ceil() as i64);
    for r in 0..k {
        for cc in r..k {
            sum[r][cc] = sum[r][cc].add(&Ball::error(tail), wp);
        }
    }
    for _ in 0..s {
        sum = upper_mul(&sum, &sum, wp);
    }
    let dd = sum[0][k - 1].clone();
    if c.is_zero() {
        dd
    } else {
        dd.mul(&exp_rat(&c, wp), wp)
    }
}

/// Density `Σ c t^m e^{λ t}` on the real line.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpPolyDensity {
    pub terms: Vec<DensityTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityTerm {
    #[serde(with = "crate::rat::rat_str")]
    pub c: Rat,
    pub m: u32,
    #[serde(with = "crate::rat::rat_str")]
    pub lambda: Rat,
}

impl ExpPolyDensity {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(c, 0, Rat::zero())
    }

    pub fn monomial(c: Rat, m: u32, lambda: Rat) -> Self {
        ExpPolyDensity {
            terms: vec![DensityTerm { c, m, lambda }],
        }
    }

    /// `c₀ + c₁ t`
    pub fn linear(c0: Rat, c1: Rat) -> Self {
        ExpPolyDensity {
            terms: vec![
                DensityTerm { c: c0, m: 0, lambda: Rat::zero() },
                DensityTerm { c: c1, m: 1, lambda: Rat::zero() },
            ],
        }
    }

    /// `c e^{σ t}`
    pub fn exponential(c: Rat, sigma: Rat) -> Self {
        Self::monomial(c, 0, sigma)
    }

    pub fn plus(mut self, o: ExpPolyDensity) -> Self {
        self.terms.extend(o.terms);
        self
    }

    /// Exact value at a rational point.
    pub fn eval(&self, t: &Rat) -> ExpSum {
        let mut out = ExpSum::zero();
        for term in &self.terms {
            let c = &term.c * pow(t, term.m);
            out.add_term(c, &term.lambda * t);
        }
        out
    }
}

fn pow(t: &Rat, m: u32) -> Rat {
    (0..m).fold(Rat::one(), |acc, _| acc * t)
}

/// `∫_0^h q(s) e^{λ s} ds` expressed exactly as an [`ExpSum`].
pub fn poly_exp_integral(q: &[Rat], lambda: &Rat, h: &Rat) -> ExpSum {
    if lambda.is_zero() {
        let mut total = Rat::zero();
        let mut hp = h.clone();
        for (k, c) in q.iter().enumerate() {
            total += c * &hp / rat(k as i64 + 1);
            hp *= h;
        }
        return ExpSum::rational(total);
    }
    // antiderivative e^{λs} R(s), R = Σ_j (-1)^j q^{(j)} / λ^{j+1}
    let r_at = |s: &Rat| -> Rat {
        let mut deriv: Vec<Rat> = q.to_vec();
        let mut total = Rat::zero();
        let mut lam_pow = lambda.clone();
        let mut sign = Rat::one();
        while !deriv.is_empty() {
            let v = deriv.iter().rev().fold(Rat::zero(), |acc, c| acc * s + c);
            total += &sign * v / &lam_pow;
            deriv = deriv
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat(k as i64))
                .collect();
            lam_pow *= lambda;
            sign = -sign;
        }
        total
    };
    let mut out = ExpSum::term(r_at(h), lambda * h);
    out.add_term(-r_at(&Rat::zero()), Rat::zero());
    out
}

/// `∫ A(t) η(t) dt` as an exact exponential sum.
pub fn exp_poly_integral_exact(profile: &PiecewisePoly, density: &ExpPolyDensity) -> ExpSum {
    let mut out = ExpSum::zero();
    for (i, piece) in profile.pieces.iter().enumerate() {
        let a = &profile.breakpoints[i];
        let h = &profile.breakpoints[i + 1] - a;
        for term in &density.terms {
            // t^m with t = s + a
            let mut mono = vec![Rat::zero(); term.m as usize + 1];
            mono[term.m as usize] = term.c.clone();
            let q = poly_mul(&shift_poly(&mono, a), piece);
            out = out.add(&poly_exp_integral(&q, &term.lambda, &h).shift(&(&term.lambda * a)));
        }
    }
    out
}

/// `∫ A(t) η(t) dt` enclosed in a ball.
pub fn exp_poly_integral(profile: &PiecewisePoly, density: &ExpPolyDensity, prec: Prec) -> Ball {
    exp_poly_integral_exact(profile, density).eval(prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;
    use crate::real::relative_residual;

    fn p() -> Prec {
        Prec::default()
    }

    #[test]
    fn dd_trivial_cases() {
        assert_eq!(relative_residual(&divided_diff_exp(&[rat(0)], p()), &Ball::one()), 0.0);
        let half = Ball::from_rat(&ratio(1, 2), p());
        assert_eq!(relative_residual(&divided_diff_exp(&vec![rat(0); 3], p()), &half), 0.0);
        let e_minus_1 = exp_rat(&rat(1), p()).sub(&Ball::one(), p());
        let dd = divided_diff_exp(&[rat(1), rat(0)], p());
        assert_eq!(relative_residual(&dd, &e_minus_1), 0.0);
        assert!(relative_radius(&dd) < 1e-35);
    }

    #[test]
    fn dd_matches_recurrence_far_from_zero() {
        // DD[a,b,c] = (DD[a,b] - DD[b,c]) / (a - c)
        let (a, b, c) = (rat(-7), ratio(3, 2), rat(9));
        let ab = exp_rat(&a, p()).sub(&exp_rat(&b, p()), p()).mul_rat(&(&a - &b).recip(), p());
        let bc = exp_rat(&b, p()).sub(&exp_rat(&c, p()), p()).mul_rat(&(&b - &c).recip(), p());
        let abc = ab.sub(&bc, p()).mul_rat(&(&a - &c).recip(), p());
        let dd = divided_diff_exp(&[a, b, c], p());
        assert!(relative_residual(&dd, &abc) < 1e-30);
    }

    #[test]
    fn exp_sum_cancels_exactly() {
        let mut s = ExpSum::term(rat(2), rat(1));
        s.add_term(rat(-2), rat(1));
        assert!(s.is_zero());
        let e = ExpSum::term(rat(1), rat(1)).mul(&ExpSum::term(rat(1), rat(-1)));
        assert_eq!(e.as_rational(), Some(rat(1)));
    }

    #[test]
    fn poly_exp_integral_closed_form() {
        // ∫_0^1 s e^s ds = 1
        let v = poly_exp_integral(&[rat(0), rat(1)], &rat(1), &rat(1));
        assert_eq!(v.as_rational(), Some(rat(1)));
    }
}
