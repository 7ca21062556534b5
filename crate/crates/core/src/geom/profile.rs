use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::polytope::Polytope;
use crate::error::{Error, Result};
use crate::linalg::solve;
use crate::rat::{rat, Rat, Vector};

/// Piecewise polynomial on `[breakpoints[0], breakpoints[last]]`, zero
/// outside. Piece `i` is stored in the shifted variable `s = t - breakpoints[i]`
/// with ascending coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiecewisePoly {
    #[serde(with = "crate::rat::rats_str")]
    pub breakpoints: Vec<Rat>,
    #[serde(with = "nested_rats")]
    pub pieces: Vec<Vec<Rat>>,
}

mod nested_rats {
    use super::*;
    use crate::rat::Vector;

    pub fn serialize<S: serde::Serializer>(p: &[Vec<Rat>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Vector> = p.iter().map(|c| Vector(c.clone())).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Rat>>, D::Error> {
        Ok(Vec::<Vector>::deserialize(d)?.into_iter().map(|v| v.0).collect())
    }
}

pub fn poly_eval(coeffs: &[Rat], s: &Rat) -> Rat {
    coeffs.iter().rev().fold(Rat::zero(), |acc, c| acc * s + c)
}

fn poly_derivative(coeffs: &[Rat]) -> Vec<Rat> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * rat(k as i64))
        .collect()
}

/// Coefficients of the unique polynomial of degree < samples.len() through
/// the given (s, value) pairs.
fn interpolate(samples: &[(Rat, Rat)]) -> Vec<Rat> {
    let m: Vec<Vec<Rat>> = samples
        .iter()
        .map(|(s, _)| {
            let mut row = Vec::with_capacity(samples.len());
            let mut p = Rat::one();
            for _ in 0..samples.len() {
                row.push(p.clone());
                p *= s;
            }
            row
        })
        .collect();
    let b: Vec<Rat> = samples.iter().map(|(_, v)| v.clone()).collect();
    solve(&m, &b).expect("distinct interpolation nodes").0
}

impl PiecewisePoly {
    pub fn zero() -> Self {
        PiecewisePoly {
            breakpoints: Vec::new(),
            pieces: Vec::new(),
        }
    }

    pub fn eval(&self, t: &Rat) -> Rat {
        let bp = &self.breakpoints;
        if bp.len() < 2 || t < &bp[0] || t > &bp[bp.len() - 1] {
            return Rat::zero();
        }
        let i = bp.partition_point(|b| b <= t).saturating_sub(1).min(self.pieces.len() - 1);
        poly_eval(&self.pieces[i], &(t - &bp[i]))
    }

    /// `∫ p(t) A(t) dt` for a polynomial `p` in `t` (ascending coefficients).
    pub fn integrate_poly(&self, p: &[Rat]) -> Rat {
        let mut total = Rat::zero();
        for (i, piece) in self.pieces.iter().enumerate() {
            let a = &self.breakpoints[i];
            let h = &self.breakpoints[i + 1] - a;
            let shifted = shift_poly(p, a);
            let prod = poly_mul(&shifted, piece);
            // ∫_0^h s^k ds = h^{k+1}/(k+1)
            let mut hp = h.clone();
            for (k, c) in prod.iter().enumerate() {
                total += c * &hp / rat(k as i64 + 1);
                hp *= &h;
            }
        }
        total
    }

    pub fn integral(&self) -> Rat {
        self.integrate_poly(&[Rat::one()])
    }

    pub fn first_moment(&self) -> Rat {
        self.integrate_poly(&[Rat::zero(), Rat::one()])
    }
}

pub(crate) fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients of `p(s + a)` in `s`.
pub(crate) fn shift_poly(p: &[Rat], a: &Rat) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); p.len()];
    // Horner in polynomial arithmetic: out = (...(c_d)(s+a) + c_{d-1})...
    for c in p.iter().rev() {
        let mut next = vec![Rat::zero(); p.len()];
        for (k, o) in out.iter().enumerate() {
            if o.is_zero() {
                continue;
            }
            next[k] += o * a;
            if k + 1 < p.len() {
                next[k + 1] += o;
            }
        }
        next[0] += c;
        out = next;
    }
    out
}

/// The shadow `A_{P,x}(t) = d/dt V_n(P ∩ {x·y <= t})`.
///
/// On every interval between consecutive vertex heights the clipped volume
/// is a polynomial of degree <= n; it is interpolated through n+1 exact
/// samples and differentiated.
pub fn shadow_profile(p: &Polytope, x: &Vector) -> Result<PiecewisePoly> {
    x.check_dim(p.ambient_dim())?;
    if x.is_zero() {
        return Err(Error::Input("shadow profile needs a nonzero direction".into()));
    }
    if !p.is_full_dim() {
        return Ok(PiecewisePoly::zero());
    }
    let n = p.ambient_dim();
    let mut heights: Vec<Rat> = p.vertices().iter().map(|v| x.dot(v)).collect();
    heights.sort();
    heights.dedup();
    let mut pieces = Vec::with_capacity(heights.len() - 1);
    for w in heights.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let h = b - a;
        let samples: Vec<(Rat, Rat)> = (0..=n)
            .map(|j| {
                let s = &h * rat(j as i64) / rat(n as i64);
                let vol = p.clip(x, &(a + &s)).volume();
                (s, vol)
            })
            .collect();
        let mut d = poly_derivative(&interpolate(&samples));
        d.resize(n, Rat::zero());
        pieces.push(d);
    }
    Ok(PiecewisePoly {
        breakpoints: heights,
        pieces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;

    #[test]
    fn cube_profiles() {
        let c = Polytope::cube(3, rat(0), rat(1));
        let p = shadow_profile(&c, &Vector::basis(3, 0)).unwrap();
        assert_eq!(p.breakpoints, vec![rat(0), rat(1)]);
        assert_eq!(p.eval(&ratio(1, 3)), rat(1));

        let q = shadow_profile(&c, &Vector::from_i64(&[1, 1, 0])).unwrap();
        assert_eq!(q.breakpoints, vec![rat(0), rat(1), rat(2)]);
        assert_eq!(q.eval(&ratio(1, 2)), ratio(1, 2));
        assert_eq!(q.eval(&ratio(3, 2)), ratio(1, 2));
        assert_eq!(q.eval(&ratio(1, 4)), ratio(1, 4));
        assert_eq!(q.integral(), rat(1));
    }

    #[test]
    fn shift_is_composition() {
        let p = vec![rat(1), rat(-2), rat(3)];
        let a = ratio(3, 2);
        let q = shift_poly(&p, &a);
        for s in [rat(0), rat(1), ratio(-5, 7)] {
            assert_eq!(poly_eval(&q, &s), poly_eval(&p, &(&s + &a)));
        }
    }

    #[test]
    fn zero_direction_rejected() {
        let c = Polytope::cube(2, rat(0), rat(1));
        assert!(shadow_profile(&c, &Vector::zeros(2)).is_err());
    }
}
