use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expint::{exp_poly_integral_exact, poly_exp_integral, ExpPolyDensity, ExpSum};
use crate::function::PLConvexS;
use crate::geom::{shadow_profile, Polytope};
use crate::rat::{rat, Rat, Vector};

/// `Ẑu(x) = ∫_0^∞ h({e^{-u} >= t}, x) dt`, defined for `x != 0`.
///
/// With `t = e^{-s}` this is `∫_{min u}^∞ h(S_s, x) e^{-s} ds` for the
/// sublevel sets `S_s = {u <= s}`. The map `s ↦ h(S_s, x)` is affine between
/// consecutive graph values and constant `h_{dom u}(x)` above the largest, so
/// every piece integrates in closed form.
pub fn weird_valuation(u: &PLConvexS, x: &Vector) -> Result<ExpSum> {
    x.check_dim(u.dim())?;
    if x.is_zero() {
        return Err(Error::Domain("Ẑu is only evaluated at x != 0".into()));
    }
    let n = u.dim();
    let (epi, _) = u.epigraph();
    let dir = x.lift(Rat::zero());
    let up = Vector::basis(n + 1, n);
    let mut levels: Vec<Rat> = u.points().iter().map(|p| p.t.clone()).collect();
    levels.sort();
    levels.dedup();
    let g = |s: &Rat| -> Rat { epi.clip(&up, s).support(&dir).expect("sublevel set is nonempty") };
    let values: Vec<Rat> = levels.iter().map(&g).collect();
    let mut out = ExpSum::zero();
    for j in 0..levels.len() - 1 {
        let h = &levels[j + 1] - &levels[j];
        let slope = (&values[j + 1] - &values[j]) / &h;
        let piece = poly_exp_integral(&[values[j].clone(), slope], &rat(-1), &h);
        out = out.add(&piece.shift(&-levels[j].clone()));
    }
    let top = levels.last().unwrap();
    out.add_term(u.domain().support(x)?, -top.clone());
    Ok(out)
}

/// `η₀(min u) + ∫_{dom u} η₁(u(w)) dw`.
///
/// On a cell where `u = a·w + b` the integral is `∫ A(t) η₁(t + b) dt` for
/// the shadow profile `A` of the cell in direction `a`; shifting the profile
/// by `b` keeps everything exact.
pub fn mussnig_form(u: &PLConvexS, eta0: &ExpPolyDensity, eta1: &ExpPolyDensity) -> Result<ExpSum> {
    let mut out = eta0.eval(&u.min_value());
    for cell in u.affine_cells() {
        if cell.slope.is_zero() {
            out = out.add(&eta1.eval(&cell.intercept).scale(&cell.cell.volume()));
            continue;
        }
        let mut profile = shadow_profile(&cell.cell, &cell.slope)?;
        for b in profile.breakpoints.iter_mut() {
            *b += &cell.intercept;
        }
        out = out.add(&exp_poly_integral_exact(&profile, eta1));
    }
    Ok(out)
}

/// The two classified shapes of the boundary function `ζ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZetaSpec {
    /// `ζ(s) = c_pos·s + d` for `s >= 0`, `-c_neg·s + d` for `s < 0`.
    Linear {
        #[serde(with = "crate::rat::rat_str")]
        c_pos: Rat,
        #[serde(with = "crate::rat::rat_str")]
        c_neg: Rat,
        #[serde(with = "crate::rat::rat_str")]
        d: Rat,
    },
    /// `ζ(s) = c_pos e^{σs} + d_pos` for `s >= 0`, `c_neg e^{σs} + d_neg`
    /// for `s < 0`; continuity at 0 is required.
    Exponential {
        #[serde(with = "crate::rat::rat_str")]
        c_pos: Rat,
        #[serde(with = "crate::rat::rat_str")]
        c_neg: Rat,
        #[serde(with = "crate::rat::rat_str")]
        sigma: Rat,
        #[serde(with = "crate::rat::rat_str")]
        d_pos: Rat,
        #[serde(with = "crate::rat::rat_str")]
        d_neg: Rat,
    },
}

impl ZetaSpec {
    /// The boundary function reproducing `c₁h_P + c₂h_{-P} + c₃V₀`.
    pub fn linear(c1: Rat, c2: Rat, c3: Rat) -> Self {
        ZetaSpec::Linear { c_pos: c1, c_neg: c2, d: c3 / rat(2) }
    }

    /// The boundary function reproducing `c₁e^{σh_P} + c₂e^{-σh_{-P}}`.
    pub fn exponential(c1: Rat, c2: Rat, sigma: Rat) -> Self {
        let d_pos = (&c2 - &c1) / rat(2);
        let d_neg = -d_pos.clone();
        ZetaSpec::Exponential { c_pos: c1, c_neg: c2, sigma, d_pos, d_neg }
    }

    pub fn validate(&self) -> Result<()> {
        if let ZetaSpec::Exponential { c_pos, c_neg, sigma, d_pos, d_neg } = self {
            if sigma.is_zero() {
                return Err(Error::Input("exponential ζ needs σ != 0".into()));
            }
            if c_pos + d_pos != c_neg + d_neg {
                return Err(Error::Input("ζ must be continuous at 0".into()));
            }
        }
        Ok(())
    }

    pub fn eval(&self, s: &Rat) -> ExpSum {
        match self {
            ZetaSpec::Linear { c_pos, c_neg, d } => {
                let lin = if s.is_negative() { -(c_neg * s) } else { c_pos * s };
                ExpSum::rational(lin + d)
            }
            ZetaSpec::Exponential { c_pos, c_neg, sigma, d_pos, d_neg } => {
                let (c, d) = if s.is_negative() { (c_neg, d_neg) } else { (c_pos, d_pos) };
                let mut out = ExpSum::term(c.clone(), sigma * s);
                out.add_term(d.clone(), Rat::zero());
                out
            }
        }
    }
}

/// `ζ(h_P(x)) + ζ(-h_{-P}(x)) + ∫ A_{P,x}(t) η(t) dt`, for `x != 0`.
pub fn integral_representation(zeta: &ZetaSpec, eta: &ExpPolyDensity, p: &Polytope, x: &Vector) -> Result<ExpSum> {
    zeta.validate()?;
    x.check_dim(p.ambient_dim())?;
    if x.is_zero() {
        return Err(Error::Domain("representation is evaluated at x != 0".into()));
    }
    if p.is_empty() {
        return Ok(ExpSum::zero());
    }
    let hp = p.support(x)?;
    let hm = p.reflect().support(x)?;
    let mut out = zeta.eval(&hp).add(&zeta.eval(&-hm));
    if p.is_full_dim() {
        out = out.add(&exp_poly_integral_exact(&shadow_profile(p, x)?, eta));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;

    #[test]
    fn weird_on_constant_cone() {
        let c = Polytope::cube(3, rat(0), rat(1));
        let u = PLConvexS::cone(&c, &Vector::zeros(3), &rat(2)).unwrap();
        let x = Vector::from_i64(&[1, -1, 2]);
        assert_eq!(weird_valuation(&u, &x).unwrap(), ExpSum::term(rat(3), rat(-2)));
    }

    #[test]
    fn weird_by_numeric_quadrature() {
        // u(y) = |y| on [-1,1]: S_s = [-s, s] for 0 <= s <= 1, so at x = 1
        // Ẑu(1) = ∫_0^1 s e^{-s} ds + e^{-1} = 1 - e^{-1}.
        let pts = vec![
            crate::function::GraphPoint { x: Vector::from_i64(&[-1]), t: rat(1) },
            crate::function::GraphPoint { x: Vector::from_i64(&[0]), t: rat(0) },
            crate::function::GraphPoint { x: Vector::from_i64(&[1]), t: rat(1) },
        ];
        let u = PLConvexS::from_points(pts).unwrap();
        let mut want = ExpSum::rational(rat(1));
        want.add_term(rat(-1), rat(-1));
        assert_eq!(weird_valuation(&u, &Vector::from_i64(&[1])).unwrap(), want);
    }

    #[test]
    fn mussnig_on_constant_function() {
        let c = Polytope::cube(2, rat(0), rat(2));
        let u = PLConvexS::cone(&c, &Vector::zeros(2), &rat(1)).unwrap();
        let eta0 = ExpPolyDensity::linear(rat(1), rat(3));
        let eta1 = ExpPolyDensity::exponential(rat(1), rat(1));
        let got = mussnig_form(&u, &eta0, &eta1).unwrap();
        let mut want = ExpSum::rational(rat(4));
        want.add_term(rat(4), rat(1));
        assert_eq!(got, want);
    }

    #[test]
    fn mussnig_on_sloped_function() {
        // u(w) = w on [0,1], η₁(t) = t: ∫_0^1 w dw = 1/2.
        let seg = Polytope::hull(&[Vector::from_i64(&[0]), Vector::from_i64(&[1])]).unwrap();
        let u = PLConvexS::cone(&seg, &Vector::from_i64(&[1]), &rat(0)).unwrap();
        let got = mussnig_form(&u, &ExpPolyDensity::zero(), &ExpPolyDensity::linear(rat(0), rat(1))).unwrap();
        assert_eq!(got, ExpSum::rational(ratio(1, 2)));
    }

    #[test]
    fn identity_zeta_gives_width() {
        let p = Polytope::cube(3, rat(-1), rat(2));
        let x = Vector::from_i64(&[1, 1, -1]);
        let zeta = ZetaSpec::Linear { c_pos: rat(1), c_neg: rat(-1), d: rat(0) };
        let got = integral_representation(&zeta, &ExpPolyDensity::zero(), &p, &x).unwrap();
        let want = p.support(&x).unwrap() - p.reflect().support(&x).unwrap();
        assert_eq!(got, ExpSum::rational(want));
    }

    #[test]
    fn discontinuous_zeta_rejected() {
        let z = ZetaSpec::Exponential { c_pos: rat(1), c_neg: rat(0), sigma: rat(1), d_pos: rat(0), d_neg: rat(0) };
        assert!(z.validate().is_err());
        assert!(ZetaSpec::exponential(rat(1), rat(3), rat(2)).validate().is_ok());
    }
}
