use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::expint::{divided_diff_exp, exp_poly_integral_exact, ExpPolyDensity, ExpSum};
use crate::function::{LogConcaveFn, PLConvexS};
use crate::geom::{factorial, shadow_profile, Polytope};
use crate::rat::{rat, ratio, Rat, Vector};
use crate::real::{exp_rat, Ball, Prec};

/// `ℒP(x) = ∫_P e^{x·y} dy`, summed over the triangulation with
/// `∫_Δ e^{x·y} dy = n! vol(Δ) DD[exp; x·v_0, …, x·v_n]`.
pub fn laplace_polytope(p: &Polytope, x: &Vector, prec: Prec) -> Result<Ball> {
    x.check_dim(p.ambient_dim())?;
    if !p.is_full_dim() {
        return Ok(Ball::zero());
    }
    let nf = factorial(p.ambient_dim());
    let mut total = Ball::zero();
    for (simplex, vol) in p.simplex_volumes() {
        let nodes: Vec<Rat> = simplex.iter().map(|&i| x.dot(&p.vertices()[i])).collect();
        let dd = divided_diff_exp(&nodes, prec);
        total = total.add(&dd.mul_rat(&(&nf * &vol), prec), prec);
    }
    Ok(total)
}

/// `ℒP(x)` through the slice identity `∫ A_{P,x}(t) e^t dt`, exact.
pub fn laplace_polytope_profile(p: &Polytope, x: &Vector) -> Result<ExpSum> {
    x.check_dim(p.ambient_dim())?;
    if x.is_zero() {
        return Ok(ExpSum::rational(p.volume()));
    }
    let profile = shadow_profile(p, x)?;
    Ok(exp_poly_integral_exact(&profile, &ExpPolyDensity::exponential(Rat::one(), Rat::one())))
}

/// `∫ exp(z·y - k·u(y)) dy` over `dom u`, cell by cell: on a cell where
/// `u = a·y + b` the integrand is `e^{-kb} e^{(z - k a)·y}`.
pub fn laplace_scaled(u: &PLConvexS, k: &Rat, z: &Vector, prec: Prec) -> Result<Ball> {
    z.check_dim(u.dim())?;
    let mut total = Ball::zero();
    for cell in u.affine_cells() {
        let dir = z - &cell.slope.scale(k);
        let inner = laplace_polytope(&cell.cell, &dir, prec)?;
        let w = -(k * &cell.intercept);
        let term = if w.is_zero() { inner } else { inner.mul(&exp_rat(&w, prec), prec) };
        total = total.add(&term, prec);
    }
    Ok(total)
}

/// `ℒf(x) = ∫ e^{x·y} f(y) dy` for compactly supported `f`.
pub fn laplace_logconcave(f: &LogConcaveFn, x: &Vector, prec: Prec) -> Result<Ball> {
    let u = f
        .as_s()
        .ok_or_else(|| Error::Unsupported("Laplace transform of a function without compact support".into()))?;
    let v = laplace_scaled(u, &Rat::one(), x, prec)?;
    Ok(if f.scale().is_one() { v } else { v.mul_rat(f.scale(), prec) })
}

/// Rational lower bound for the volume of the unit ball, from `π > 333/106`.
pub fn omega_lower(n: usize) -> Result<Rat> {
    let pi = ratio(333, 106);
    match n {
        1 => Ok(rat(2)),
        2 => Ok(pi),
        3 => Ok(ratio(4, 3) * pi),
        4 => Ok(&pi * &pi / rat(2)),
        _ => Err(Error::Input(format!("dimension {n} outside 1..=4"))),
    }
}

/// Lower enclosure of `n! a^{-n} ω_n e^{-b}`; a certified `ℒf(x)` below it
/// is below the true bound.
pub fn finiteness_bound_lower(n: usize, a: &Rat, b: &Rat, prec: Prec) -> Result<Ball> {
    if !a.is_positive() {
        return Err(Error::Parameter("finiteness bound needs a > 0".into()));
    }
    let mut an = Rat::one();
    for _ in 0..n {
        an *= a;
    }
    let c = factorial(n) * omega_lower(n)? / an;
    Ok(exp_rat(&-b.clone(), prec).mul_rat(&c, prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::relative_residual;

    fn p() -> Prec {
        Prec::default()
    }

    #[test]
    fn cube_laplace_is_product() {
        let c = Polytope::cube(3, rat(0), rat(1));
        let v = laplace_polytope(&c, &Vector::from_i64(&[1, 1, 1]), p()).unwrap();
        let e1 = exp_rat(&rat(1), p()).sub(&Ball::one(), p());
        let want = e1.mul(&e1, p()).mul(&e1, p());
        assert!(relative_residual(&v, &want) < 1e-30);
    }

    #[test]
    fn zero_direction_gives_volume() {
        let s = Polytope::standard_simplex(3);
        let v = laplace_polytope(&s, &Vector::zeros(3), p()).unwrap();
        assert!(relative_residual(&v, &Ball::from_rat(&ratio(1, 6), p())) < 1e-30);
        assert_eq!(laplace_polytope_profile(&s, &Vector::zeros(3)).unwrap(), ExpSum::rational(ratio(1, 6)));
    }

    #[test]
    fn two_routes_agree() {
        let s = Polytope::standard_simplex(3);
        let x = Vector(vec![ratio(1, 2), rat(-1), rat(2)]);
        let a = laplace_polytope(&s, &x, p()).unwrap();
        let b = laplace_polytope_profile(&s, &x).unwrap().eval(p());
        assert!(relative_residual(&a, &b) < 1e-30);
    }

    #[test]
    fn cone_function_laplace_is_shifted() {
        let c = Polytope::cube(2, rat(0), rat(1));
        let y = Vector::from_i64(&[1, -1]);
        let t = rat(2);
        let f = LogConcaveFn::from_s(PLConvexS::cone(&c, &y, &t).unwrap());
        let x = Vector(vec![ratio(1, 3), rat(1)]);
        let lhs = laplace_logconcave(&f, &x, p()).unwrap();
        let rhs = laplace_polytope(&c, &(&x - &y), p()).unwrap().mul(&exp_rat(&-t, p()), p());
        assert!(relative_residual(&lhs, &rhs) < 1e-30);
    }

    #[test]
    fn class_f_is_rejected() {
        let f = LogConcaveFn::from_f(crate::function::PLConvexF::linear(&Vector::from_i64(&[1])));
        assert!(laplace_logconcave(&f, &Vector::from_i64(&[0]), p()).is_err());
    }
}
