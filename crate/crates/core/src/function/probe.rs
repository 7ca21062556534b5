//! Pointwise comparison on deterministic probe sets.

use num_traits::Zero;
use rand::Rng;

use super::fixtures::{fixture_rng, random_rat};
use super::{ConvexFn, Ext};
use crate::rat::{abs, rat, Rat, Vector};

/// Lattice `step·ℤ^n ∩ [-radius, radius]^n` plus `random` seeded points of
/// the same box with denominators up to 16.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub step: Rat,
    pub radius: i64,
    pub random: usize,
    pub seed: u64,
}

impl GridSpec {
    /// Step 1/4 on `[-3,3]^n` and 64 random points.
    pub fn standard(seed: u64) -> Self {
        GridSpec { step: Rat::new(1.into(), 4.into()), radius: 3, random: 64, seed }
    }

    /// Coarse grid for inner loops: step 1 on `[-2,2]^n` and 16 random points.
    pub fn light(seed: u64) -> Self {
        GridSpec { step: rat(1), radius: 2, random: 16, seed }
    }

    pub fn points(&self, n: usize) -> Vec<Vector> {
        let r = rat(self.radius);
        let mut axis = Vec::new();
        let mut t = -r.clone();
        while t <= r {
            axis.push(t.clone());
            t += &self.step;
        }
        let mut out: Vec<Vector> = vec![Vector(Vec::new())];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |a| {
                        let mut q = p.0.clone();
                        q.push(a.clone());
                        Vector(q)
                    })
                })
                .collect();
        }
        let mut rng = fixture_rng(self.seed, u64::MAX);
        for _ in 0..self.random {
            let den = rng.gen_range(1..=16);
            out.push(Vector((0..n).map(|_| random_rat(&mut rng, -self.radius, self.radius, den)).collect()));
        }
        out
    }
}

/// Outcome of a grid comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridDiff {
    /// `max |u - v|` over probes where both are finite.
    pub max_abs: Rat,
    /// Some probe is finite for one function and infinite for the other.
    pub domain_mismatch: bool,
    /// Probe attaining the maximum (or the first mismatch).
    pub witness: Option<Vector>,
    pub probes: usize,
}

impl GridDiff {
    pub fn is_zero(&self) -> bool {
        self.max_abs.is_zero() && !self.domain_mismatch
    }
}

pub fn compare_on_grid(u: &ConvexFn, v: &ConvexFn, spec: &GridSpec) -> GridDiff {
    compare_points(u, v, &spec.points(u.dim()))
}

pub fn compare_points(u: &ConvexFn, v: &ConvexFn, probes: &[Vector]) -> GridDiff {
    let mut out = GridDiff { max_abs: Rat::zero(), domain_mismatch: false, witness: None, probes: probes.len() };
    for x in probes {
        match (u.eval(x), v.eval(x)) {
            (Ext::Finite(a), Ext::Finite(b)) => {
                let d = abs(&(a - b));
                if d > out.max_abs {
                    out.max_abs = d;
                    if !out.domain_mismatch {
                        out.witness = Some(x.clone());
                    }
                }
            }
            (Ext::Inf, Ext::Inf) => {}
            _ => {
                if !out.domain_mismatch {
                    out.witness = Some(x.clone());
                }
                out.domain_mismatch = true;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::PLConvexS;
    use crate::geom::Polytope;

    #[test]
    fn grid_sizes() {
        assert_eq!(GridSpec::standard(1).points(1).len(), 25 + 64);
        assert_eq!(GridSpec::light(1).points(2).len(), 25 + 16);
        assert_eq!(GridSpec::light(1).points(2), GridSpec::light(1).points(2));
    }

    #[test]
    fn self_comparison_is_zero_and_translation_is_not() {
        let u = PLConvexS::cone(&Polytope::cube(2, rat(0), rat(1)), &Vector::from_i64(&[1, 2]), &rat(0)).unwrap();
        let cu = ConvexFn::S(u.clone());
        assert!(compare_on_grid(&cu, &cu, &GridSpec::light(3)).is_zero());
        let moved = ConvexFn::S(u.translate(&Vector::from_i64(&[1, 0])).unwrap());
        let d = compare_on_grid(&cu, &moved, &GridSpec::light(3));
        assert!(!d.is_zero());
        assert!(d.witness.is_some());
    }
}
