//! Deterministic fixture generators.
//!
//! Every generator draws from a ChaCha8 stream, so a `(seed, index)` pair
//! always reproduces the same fixture.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GraphPoint, PLConvexF, PLConvexS, Piece};
use crate::error::{Error, Result};
use crate::geom::Polytope;
use crate::rat::{rat, Rat, Vector};

pub type FixtureRng = ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0xC0FFEE;

/// Independent sub-stream for fixture number `index` of a run.
pub fn fixture_rng(seed: u64, index: u64) -> FixtureRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

/// Uniform rational `k/den` with `lo <= k/den <= hi`.
pub fn random_rat(rng: &mut FixtureRng, lo: i64, hi: i64, den: i64) -> Rat {
    let k = rng.gen_range(lo * den..=hi * den);
    Rat::new(BigInt::from(k), BigInt::from(den))
}

pub fn random_vector(rng: &mut FixtureRng, n: usize, lo: i64, hi: i64, den: i64) -> Vector {
    Vector((0..n).map(|_| random_rat(rng, lo, hi, den)).collect())
}

pub fn random_nonzero_vector(rng: &mut FixtureRng, n: usize, lo: i64, hi: i64, den: i64) -> Vector {
    loop {
        let v = random_vector(rng, n, lo, hi, den);
        if !v.is_zero() {
            return v;
        }
    }
}

/// Full-dimensional polytope spanned by `n+1..=n+4` points of `[-2,2]^n`
/// with coordinates in `½ℤ`.
pub fn random_polytope(rng: &mut FixtureRng, n: usize) -> Polytope {
    loop {
        let k = rng.gen_range(n + 1..=n + 4);
        let pts: Vec<Vector> = (0..k).map(|_| random_vector(rng, n, -2, 2, 2)).collect();
        let p = Polytope::hull_unchecked(n, &pts);
        if p.is_full_dim() {
            return p;
        }
    }
}

/// Full-dimensional polytope with the origin in its interior.
pub fn random_polytope_about_origin(rng: &mut FixtureRng, n: usize) -> Polytope {
    loop {
        let p = random_polytope(rng, n);
        let c = p.centroid_of_vertices().expect("nonempty");
        // integer-ish shift keeps denominators small; fall back to the centroid
        let shift = Vector(c.iter().map(|q| -q.round()).collect());
        let q = p.translate(&shift).expect("same dimension");
        if interior_contains_origin(&q) {
            return q;
        }
        let q = p.translate(&-&c).expect("same dimension");
        if interior_contains_origin(&q) {
            return q;
        }
    }
}

fn interior_contains_origin(p: &Polytope) -> bool {
    p.is_full_dim() && p.facets().iter().all(|f| f.offset > Rat::zero())
}

/// Class-S function with full-dimensional domain: `n+2..=n+6` random graph
/// points over `[-2,2]^n`, heights in `[-2,2]`.
pub fn random_s(rng: &mut FixtureRng, n: usize) -> PLConvexS {
    loop {
        let k = rng.gen_range(n + 2..=n + 6);
        let pts: Vec<GraphPoint> = (0..k)
            .map(|_| GraphPoint {
                x: random_vector(rng, n, -2, 2, 2),
                t: random_rat(rng, -2, 2, 2),
            })
            .collect();
        let u = PLConvexS::from_points(pts).expect("valid points");
        if u.domain().is_full_dim() {
            return u;
        }
    }
}

/// Finite max-affine function with `2..=n+5` pieces.
pub fn random_f(rng: &mut FixtureRng, n: usize) -> PLConvexF {
    let k = rng.gen_range(2..=n + 5);
    let pieces: Vec<Piece> = (0..k)
        .map(|_| Piece {
            a: random_vector(rng, n, -2, 2, 2),
            b: random_rat(rng, -2, 2, 2),
        })
        .collect();
    PLConvexF::from_pieces(pieces).expect("valid pieces")
}

/// Cone function `ι_P + ℓ_y + t` with its data.
#[derive(Clone, Debug)]
pub struct Cone {
    pub polytope: Polytope,
    pub y: Vector,
    pub t: Rat,
    pub u: PLConvexS,
}

pub fn cone(p: &Polytope, y: &Vector, t: &Rat) -> Result<PLConvexS> {
    PLConvexS::cone(p, y, t)
}

pub fn random_cone(rng: &mut FixtureRng, n: usize) -> Cone {
    let polytope = random_polytope(rng, n);
    let y = random_vector(rng, n, -2, 2, 2);
    let t = random_rat(rng, -2, 2, 2);
    let u = PLConvexS::cone(&polytope, &y, &t).expect("nonempty polytope");
    Cone { polytope, y, t, u }
}

/// The pair `(w + ι_{a·x <= c}, w + ι_{a·x >= c})`.
pub fn split(w: &PLConvexS, a: &Vector, c: &Rat) -> Result<(PLConvexS, PLConvexS)> {
    if a.is_zero() {
        return Err(Error::Input("split direction must be nonzero".into()));
    }
    a.check_dim(w.dim())?;
    let lo = w.restrict(a, c);
    let hi = w.restrict(&-a, &-c);
    match (lo, hi) {
        (Some(u), Some(v)) => Ok((u, v)),
        _ => Err(Error::Input("split hyperplane misses the domain".into())),
    }
}

/// A split of `w` by a random hyperplane strictly crossing its domain.
///
/// The cut height is drawn from the open range of `a·x` over the domain, so
/// both halves are full-dimensional whenever the domain is.
pub fn random_split(rng: &mut FixtureRng, w: &PLConvexS) -> (Vector, Rat, PLConvexS, PLConvexS) {
    let n = w.dim();
    loop {
        let a = random_nonzero_vector(rng, n, -2, 2, 1);
        let heights: Vec<Rat> = w.domain().vertices().iter().map(|v| a.dot(v)).collect();
        let lo = heights.iter().min().unwrap().clone();
        let hi = heights.iter().max().unwrap().clone();
        if lo == hi {
            continue;
        }
        let k = rng.gen_range(1..8);
        let c = &lo + (&hi - &lo) * rat(k) / rat(8);
        if let Ok((u, v)) = split(w, &a, &c) {
            return (a, c, u, v);
        }
    }
}

/// Staircase sequence: steps `u_i = ι_{[i-1,i]×[0,1]^{n-1}} + ℓ_{i e_1} - (i²-i)/2`,
/// consecutive joins `u_i ∨ u_{i+1}`, and the running meet `v_m`.
#[derive(Clone, Debug)]
pub struct Staircase {
    pub steps: Vec<PLConvexS>,
    pub joins: Vec<PLConvexS>,
    pub meet: PLConvexS,
}

pub fn staircase_step(n: usize, i: i64) -> PLConvexS {
    let mut bounds = vec![(rat(i - 1), rat(i))];
    bounds.extend((1..n).map(|_| (Rat::zero(), Rat::one())));
    let p = Polytope::boxed(&bounds);
    let y = Vector::basis(n, 0).scale(&rat(i));
    let t = -Rat::new(BigInt::from(i * i - i), BigInt::from(2));
    PLConvexS::cone(&p, &y, &t).expect("nonempty box")
}

pub fn staircase(n: usize, m: usize) -> Result<Staircase> {
    if m == 0 || n == 0 {
        return Err(Error::Input("staircase needs m >= 1 and n >= 1".into()));
    }
    let steps: Vec<PLConvexS> = (1..=m as i64).map(|i| staircase_step(n, i)).collect();
    let mut joins = Vec::with_capacity(m.saturating_sub(1));
    for w in steps.windows(2) {
        joins.push(w[0].join(&w[1])?.expect("consecutive steps share a face"));
    }
    let mut meet = steps[0].clone();
    for s in &steps[1..] {
        meet = meet.meet(s)?;
    }
    Ok(Staircase { steps, joins, meet })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Ext;
    use crate::rat::ratio;

    #[test]
    fn generators_are_deterministic() {
        let a = random_s(&mut fixture_rng(7, 3), 3);
        let b = random_s(&mut fixture_rng(7, 3), 3);
        assert_eq!(a, b);
        let c = random_s(&mut fixture_rng(7, 4), 3);
        assert_ne!(a, c);
    }

    #[test]
    fn staircase_joins_match_closed_form() {
        let s = staircase(3, 3).unwrap();
        let x = Vector(vec![rat(1), ratio(1, 2), ratio(1, 2)]);
        assert_eq!(s.joins[0].eval(&x), Ext::Finite(rat(1)));
        for (k, j) in s.joins.iter().enumerate() {
            let i = k as i64 + 1;
            let face = Polytope::boxed(&[(rat(i), rat(i)), (rat(0), rat(1)), (rat(0), rat(1))]);
            let want = PLConvexS::cone(&face, &Vector::zeros(3), &rat((i * i + i) / 2)).unwrap();
            assert_eq!(j, &want);
        }
    }

    #[test]
    fn cone_at_zero_is_indicator() {
        let c = Polytope::cube(3, rat(0), rat(1));
        assert_eq!(cone(&c, &Vector::zeros(3), &rat(0)).unwrap(), PLConvexS::indicator(&c).unwrap());
    }

    #[test]
    fn split_of_cube_is_convex_pair() {
        let w = PLConvexS::indicator(&Polytope::cube(3, rat(0), rat(1))).unwrap();
        let (u, v) = split(&w, &Vector::basis(3, 0), &ratio(1, 2)).unwrap();
        assert!(u.is_min_convex(&v).unwrap());
        let j = u.join(&v).unwrap().unwrap();
        assert!(j.domain().vertices().iter().all(|p| p[0] == ratio(1, 2)));
    }

    #[test]
    fn origin_polytopes_contain_origin() {
        let mut r = fixture_rng(1, 0);
        for _ in 0..10 {
            let p = random_polytope_about_origin(&mut r, 3);
            assert!(interior_contains_origin(&p));
        }
    }
}
