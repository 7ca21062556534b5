use num_traits::One;

use crate::error::{Error, Result};
use crate::function::{ConvexFn, LogConcaveFn, PLConvexF, PLConvexS};

/// `u*` for a class-S function: the max-affine function with one piece
/// `(x_j, -t_j)` per graph point.
pub fn legendre_s(u: &PLConvexS) -> PLConvexF {
    PLConvexF::from_dual(u)
}

/// `u*` for a max-affine function: lower hull of the points `(a_i, -b_i)`.
pub fn legendre_f(u: &PLConvexF) -> PLConvexS {
    u.dual()
}

pub fn legendre(u: &ConvexFn) -> ConvexFn {
    match u {
        ConvexFn::S(u) => ConvexFn::F(legendre_s(u)),
        ConvexFn::F(u) => ConvexFn::S(legendre_f(u)),
    }
}

/// `f° = e^{-u*}`. Only defined for unit factor, since `λe^{-u}` has no
/// rational exponent shift.
pub fn polar(f: &LogConcaveFn) -> Result<LogConcaveFn> {
    if !f.scale().is_one() {
        return Err(Error::Domain("polar needs a function of the form e^{-u}".into()));
    }
    Ok(match f.base() {
        ConvexFn::S(u) => LogConcaveFn::from_f(legendre_s(u)),
        ConvexFn::F(u) => LogConcaveFn::from_s(legendre_f(u)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{Ext, Piece};
    use crate::geom::Polytope;
    use crate::rat::{rat, Vector};

    #[test]
    fn indicator_and_support_function_are_dual() {
        let k = Polytope::cube(3, rat(0), rat(1));
        let h = legendre_s(&PLConvexS::indicator(&k).unwrap());
        let x = Vector::from_i64(&[1, -2, 3]);
        assert_eq!(h.eval(&x), k.support(&x).unwrap());
        assert_eq!(legendre_f(&h), PLConvexS::indicator(&k).unwrap());
    }

    #[test]
    fn point_mass_gives_constant() {
        let u = PLConvexS::indicator(&Polytope::point(Vector::zeros(2))).unwrap().add_const(&rat(5));
        let v = legendre_s(&u);
        assert_eq!(v, PLConvexF::constant(2, rat(-5)));
    }

    #[test]
    fn abs_value_conjugate_is_interval_indicator() {
        let u = PLConvexF::from_pieces(vec![
            Piece { a: Vector::from_i64(&[1]), b: rat(0) },
            Piece { a: Vector::from_i64(&[-1]), b: rat(0) },
        ])
        .unwrap();
        let s = legendre_f(&u);
        assert_eq!(s.eval(&Vector::from_i64(&[1])), Ext::Finite(rat(0)));
        assert_eq!(s.eval(&Vector::from_i64(&[2])), Ext::Inf);
        assert_eq!(s.domain().vertices().len(), 2);
    }

    #[test]
    fn polar_of_cube_indicator() {
        let f = LogConcaveFn::from_s(PLConvexS::indicator(&Polytope::cube(3, rat(-1), rat(1))).unwrap());
        let g = polar(&f).unwrap();
        let v = g.eval(&Vector::basis(3, 0));
        assert_eq!(v, crate::expint::ExpSum::term(rat(1), rat(-1)));
        assert_eq!(polar(&g).unwrap(), f);
    }
}
