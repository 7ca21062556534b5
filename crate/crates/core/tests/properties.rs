//! Invariants as properties over seeded fixtures.

use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;

use convexval::function::fixtures::{fixture_rng, random_f, random_polytope, random_s, random_split, random_vector};
use convexval::function::{Ext, GraphPoint, PLConvexS};
use convexval::geom::{random_unimodular, shadow_profile, Polytope};
use convexval::harness::report::{LawReport, ValuationReport};
use convexval::rat::{rat, Rat, Vector};
use convexval::transforms::{legendre_f, legendre_s};

fn cfg() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

fn fixture(seed: u64, n: usize) -> (Polytope, Vector, Vector) {
    let mut rng = fixture_rng(seed, n as u64);
    let p = random_polytope(&mut rng, n);
    let y = random_vector(&mut rng, n, -3, 3, 4);
    let x = random_vector(&mut rng, n, -3, 3, 4);
    (p, y, x)
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn hull_is_idempotent(seed in any::<u64>(), n in 1usize..=4) {
        let (p, _, _) = fixture(seed, n);
        let q = Polytope::hull(p.vertices()).unwrap();
        prop_assert_eq!(q.vertices(), p.vertices());
        prop_assert_eq!(q.facets(), p.facets());
    }

    #[test]
    fn hull_facets_are_valid_on_lattice_points(seed in any::<u64>(), n in 2usize..=4) {
        // small integer boxes are full of coplanar points
        let mut rng = fixture_rng(seed, 99);
        let pts: Vec<Vector> = (0..12).map(|_| random_vector(&mut rng, n, -1, 1, 1)).collect();
        let p = Polytope::hull(&pts).unwrap();
        for x in &pts {
            for h in p.facets() {
                prop_assert!(h.slack(x) >= Rat::zero());
            }
        }
        for (h, inc) in p.facets().iter().zip(p.facet_incidence()) {
            prop_assert!(inc.len() as isize >= p.dim());
            for &i in inc {
                prop_assert!(h.slack(&p.vertices()[i]).is_zero());
            }
        }
        for v in p.vertices() {
            let on = p.facets().iter().filter(|h| h.slack(v).is_zero()).count();
            prop_assert!(on as isize >= p.dim());
        }
    }

    #[test]
    fn volume_is_sl_invariant(seed in any::<u64>(), n in 1usize..=3) {
        let (p, _, _) = fixture(seed, n);
        let phi = random_unimodular(n, seed, 2).unwrap();
        prop_assert_eq!(p.apply_map(&phi).unwrap().volume(), p.volume());
    }

    #[test]
    fn support_and_moment_translate(seed in any::<u64>(), n in 1usize..=3) {
        let (p, y, x) = fixture(seed, n);
        let q = p.translate(&y).unwrap();
        prop_assert_eq!(q.support(&x).unwrap(), p.support(&x).unwrap() + x.dot(&y));
        let (mp, mq) = (p.measures(), q.measures());
        prop_assert_eq!(mq.moment, &mp.moment + &y.scale(&mp.vn));
    }

    #[test]
    fn profile_integrates_to_volume_and_moment(seed in any::<u64>(), n in 1usize..=3) {
        let (p, _, x) = fixture(seed, n);
        prop_assume!(!x.is_zero());
        let prof = shadow_profile(&p, &x).unwrap();
        let m = p.measures();
        prop_assert_eq!(prof.integral(), m.vn.clone());
        prop_assert_eq!(prof.first_moment(), x.dot(&m.moment));
        let tri: Rat = p.simplex_volumes().into_iter().map(|(_, v)| v).sum();
        prop_assert_eq!(tri, m.vn);
    }

    #[test]
    fn graph_points_are_irredundant(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = fixture_rng(seed, 7);
        let u = random_s(&mut rng, n);
        let again = PLConvexS::from_points(u.points().to_vec()).unwrap();
        prop_assert_eq!(&again, &u);
        // dropping any point changes the function
        for i in 0..u.points().len() {
            let mut pts: Vec<GraphPoint> = u.points().to_vec();
            pts.remove(i);
            if pts.is_empty() {
                continue;
            }
            prop_assert_ne!(PLConvexS::from_points(pts).unwrap(), u.clone());
        }
    }

    #[test]
    fn join_is_pointwise_max_and_meet_below_min(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = fixture_rng(seed, 8);
        let u = random_s(&mut rng, n);
        let (_, _, v, _) = random_split(&mut rng, &u);
        let w = random_s(&mut rng, n);
        let meet = u.meet(&w).unwrap();
        let convex_min = u.is_min_convex(&v).unwrap();
        let join = u.join(&v).unwrap();
        for _ in 0..8 {
            let x = random_vector(&mut rng, n, -3, 3, 4);
            let (a, b) = (u.eval(&x), w.eval(&x));
            prop_assert!(meet.eval(&x) <= a.clone().min(b));
            if let Some(j) = &join {
                prop_assert_eq!(j.eval(&x), u.eval(&x).max(v.eval(&x)));
            }
            if convex_min {
                prop_assert_eq!(u.meet(&v).unwrap().eval(&x), u.eval(&x).min(v.eval(&x)));
            }
        }
        // hull of the union: meet graph points come from u or w
        for g in meet.points() {
            prop_assert!(u.points().contains(g) || w.points().contains(g));
        }
    }

    #[test]
    fn translation_and_linear_shift_commute(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = fixture_rng(seed, 9);
        let u = random_s(&mut rng, n);
        let y = random_vector(&mut rng, n, -2, 2, 2);
        let z = random_vector(&mut rng, n, -2, 2, 2);
        let a = u.translate(&y).unwrap().dual_translate(&z).unwrap();
        let b = u.dual_translate(&z).unwrap().translate(&y).unwrap();
        for _ in 0..6 {
            let x = random_vector(&mut rng, n, -3, 3, 2);
            prop_assert_eq!(a.eval(&x), b.eval(&x).add_rat(&y.dot(&z)));
        }
    }

    #[test]
    fn legendre_is_an_sl_contravariant_involution(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = fixture_rng(seed, 10);
        let u = random_s(&mut rng, n);
        let w = random_f(&mut rng, n);
        prop_assert_eq!(legendre_f(&legendre_s(&u)), u.clone());
        prop_assert_eq!(legendre_s(&legendre_f(&w)), w);
        let phi = random_unimodular(n, seed, 2).unwrap();
        let lhs = legendre_s(&u.compose_inverse(&phi).unwrap());
        let rhs = legendre_s(&u);
        let x = random_vector(&mut rng, n, -3, 3, 4);
        prop_assert_eq!(lhs.eval(&x), rhs.eval(&phi.apply_transpose(&x)));
    }

    #[test]
    fn report_merge_is_associative_and_commutative(seed in any::<u64>()) {
        let mut rng = fixture_rng(seed, 11);
        let mk = |name: &str, rng: &mut convexval::function::fixtures::FixtureRng| {
            let mut r = ValuationReport::new(name, 5);
            for k in 0..3 {
                let res = rng.gen_range(0..5) as f64 * 1e-10;
                r.push(LawReport {
                    name: format!("law{k}"),
                    fixture_class: "S".into(),
                    max_residual: res,
                    tolerance: 1e-9,
                    pass: res <= 1e-9,
                    checks: rng.gen_range(1..10),
                    expected_failure: false,
                    witness: None,
                });
            }
            r.fixtures = rng.gen_range(1..50);
            r
        };
        let (a, b, c) = (mk("a", &mut rng), mk("b", &mut rng), mk("a", &mut rng));
        prop_assert_eq!(a.merge(&b).merge(&c), a.merge(&b.merge(&c)));
        prop_assert_eq!(a.merge(&b), b.merge(&a));
    }
}

#[test]
fn extended_values_order_infinity_last() {
    assert!(Ext::Finite(rat(1000)) < Ext::Inf);
    assert!(Ext::Finite(rat(-1)) < Ext::Finite(rat(0)));
}
