use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::Ext;
use crate::error::{Error, Result};
use crate::geom::{Polytope, UnimodularMap};
use crate::rat::{Rat, Vector};

/// Graph point `(x, t)` of a polyhedral function.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GraphPoint {
    pub x: Vector,
    #[serde(with = "crate::rat::rat_str")]
    pub t: Rat,
}

/// Polyhedral super-coercive convex function: the convex envelope of finitely
/// many graph points, `+∞` off their convex hull.
///
/// Only lower-hull vertices are stored, sorted, so equality is structural.
/// The truncated epigraph `conv(points ∪ points lifted to the cap)` is built
/// on demand.
#[derive(Clone)]
pub struct PLConvexS {
    n: usize,
    points: Vec<GraphPoint>,
    domain: OnceLock<Polytope>,
    epi: OnceLock<(Polytope, Rat)>,
}

impl PartialEq for PLConvexS {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.points == other.points
    }
}

impl Eq for PLConvexS {}

impl fmt::Debug for PLConvexS {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PLConvexS[")?;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}↦{}", p.x, crate::rat::format_rat(&p.t))?;
        }
        write!(f, "]")
    }
}

fn lift_all(points: &[GraphPoint], cap: Option<&Rat>) -> Vec<Vector> {
    let mut out: Vec<Vector> = points.iter().map(|p| p.x.lift(p.t.clone())).collect();
    if let Some(cap) = cap {
        out.extend(points.iter().map(|p| p.x.lift(cap.clone())));
    }
    out
}

fn default_cap(points: &[GraphPoint]) -> Rat {
    points.iter().map(|p| &p.t).max().cloned().unwrap_or_default() + Rat::one()
}

/// Lower-hull vertices of a truncated epigraph with cap `cap`.
fn graph_of_epi(epi: &Polytope, cap: &Rat) -> Vec<GraphPoint> {
    let mut pts: Vec<GraphPoint> = epi
        .vertices()
        .iter()
        .filter_map(|v| {
            let (x, t) = v.split_last();
            (t < *cap).then_some(GraphPoint { x, t })
        })
        .collect();
    pts.sort();
    pts
}

impl PLConvexS {
    /// Convex envelope of arbitrary graph points; redundant points dropped.
    pub fn from_points(points: Vec<GraphPoint>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::Input("function needs at least one graph point".into()))?;
        let n = first.x.dim();
        if n == 0 {
            return Err(Error::Input("graph points need at least one coordinate".into()));
        }
        for p in &points {
            p.x.check_dim(n)?;
        }
        let cap = default_cap(&points);
        let epi = Polytope::hull_unchecked(n + 1, &lift_all(&points, Some(&cap)));
        let canon = graph_of_epi(&epi, &cap);
        let out = PLConvexS::from_canonical(n, canon);
        let _ = out.epi.set((epi, cap));
        Ok(out)
    }

    /// Wraps points already known to be exactly the lower-hull vertices.
    pub(crate) fn from_canonical(n: usize, mut points: Vec<GraphPoint>) -> Self {
        points.sort();
        PLConvexS {
            n,
            points,
            domain: OnceLock::new(),
            epi: OnceLock::new(),
        }
    }

    /// `ι_P + ℓ_y + t`
    pub fn cone(p: &Polytope, y: &Vector, t: &Rat) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::Input("cone function over the empty polytope".into()));
        }
        y.check_dim(p.ambient_dim())?;
        let pts = p
            .vertices()
            .iter()
            .map(|v| GraphPoint {
                x: v.clone(),
                t: v.dot(y) + t,
            })
            .collect();
        Ok(Self::from_canonical(p.ambient_dim(), pts))
    }

    /// `ι_P`
    pub fn indicator(p: &Polytope) -> Result<Self> {
        Self::cone(p, &Vector::zeros(p.ambient_dim()), &Rat::zero())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[GraphPoint] {
        &self.points
    }

    pub fn domain(&self) -> &Polytope {
        self.domain.get_or_init(|| {
            let xs: Vec<Vector> = self.points.iter().map(|p| p.x.clone()).collect();
            Polytope::hull_unchecked(self.n, &xs)
        })
    }

    /// Truncated epigraph and its cap height.
    pub fn epigraph(&self) -> (&Polytope, &Rat) {
        let (p, c) = self.epi.get_or_init(|| {
            let cap = default_cap(&self.points);
            (Polytope::hull_unchecked(self.n + 1, &lift_all(&self.points, Some(&cap))), cap)
        });
        (p, c)
    }

    /// Truncated epigraph at a caller-chosen cap above every graph value.
    pub fn epigraph_capped(&self, cap: &Rat) -> Polytope {
        let (e, c) = self.epigraph();
        if c == cap {
            return e.clone();
        }
        Polytope::hull_unchecked(self.n + 1, &lift_all(&self.points, Some(cap)))
    }

    pub fn max_value(&self) -> Rat {
        self.points.iter().map(|p| &p.t).max().cloned().unwrap()
    }

    pub fn min_value(&self) -> Rat {
        self.points.iter().map(|p| &p.t).min().cloned().unwrap()
    }

    pub fn eval(&self, x: &Vector) -> Ext {
        if x.dim() != self.n || !self.domain().contains(x) {
            return Ext::Inf;
        }
        let (epi, _) = self.epigraph();
        let best = epi
            .facets()
            .iter()
            .filter(|f| f.normal[self.n].is_negative())
            .map(|f| {
                let (a, at) = f.normal.split_last();
                (a.dot(x) - &f.offset) / -at
            })
            .max();
        // A point domain has the single lower facet -t <= -t0.
        Ext::Finite(best.expect("proper function has a lower facet"))
    }

    fn map_points(&self, f: impl Fn(&GraphPoint) -> GraphPoint) -> Self {
        Self::from_canonical(self.n, self.points.iter().map(f).collect())
    }

    /// `τ_y u = u(· - y)`
    pub fn translate(&self, y: &Vector) -> Result<Self> {
        y.check_dim(self.n)?;
        Ok(self.map_points(|p| GraphPoint { x: &p.x + y, t: p.t.clone() }))
    }

    /// `u + ℓ_y`
    pub fn dual_translate(&self, y: &Vector) -> Result<Self> {
        y.check_dim(self.n)?;
        Ok(self.map_points(|p| GraphPoint { x: p.x.clone(), t: &p.t + p.x.dot(y) }))
    }

    /// `u + c`
    pub fn add_const(&self, c: &Rat) -> Self {
        self.map_points(|p| GraphPoint { x: p.x.clone(), t: &p.t + c })
    }

    /// `u ∘ λ`, i.e. `x ↦ u(λx)`.
    pub fn scale_arg(&self, lambda: &Rat) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::Input("argument scale must be nonzero".into()));
        }
        let inv = lambda.recip();
        Ok(self.map_points(|p| GraphPoint { x: p.x.scale(&inv), t: p.t.clone() }))
    }

    /// `λ u` for `λ > 0`.
    pub fn scale_val(&self, lambda: &Rat) -> Result<Self> {
        if !lambda.is_positive() {
            return Err(Error::Input("value scale must be positive".into()));
        }
        Ok(self.map_points(|p| GraphPoint { x: p.x.clone(), t: &p.t * lambda }))
    }

    /// `u ∘ φ^{-1}`
    pub fn compose_inverse(&self, phi: &UnimodularMap) -> Result<Self> {
        if phi.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: phi.dim() });
        }
        Ok(self.map_points(|p| GraphPoint { x: phi.apply(&p.x), t: p.t.clone() }))
    }

    /// `u + ι_{a·x <= c}`; `None` when the restriction is nowhere finite.
    pub fn restrict(&self, a: &Vector, c: &Rat) -> Option<Self> {
        let (epi, cap) = self.epigraph();
        let clipped = epi.clip(&a.lift(Rat::zero()), c);
        if clipped.is_empty() {
            return None;
        }
        Some(Self::from_canonical(self.n, graph_of_epi(&clipped, cap)))
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        Ok(())
    }

    fn common_cap(&self, other: &Self) -> Rat {
        self.max_value().max(other.max_value()) + Rat::one()
    }

    /// `u ∨ v` via epigraph intersection; `None` when nowhere finite.
    pub fn join(&self, other: &Self) -> Result<Option<Self>> {
        self.check_same_dim(other)?;
        let cap = self.common_cap(other);
        let e = self.epigraph_capped(&cap).intersect(&other.epigraph_capped(&cap));
        if e.is_empty() {
            return Ok(None);
        }
        Ok(Some(Self::from_canonical(self.n, graph_of_epi(&e, &cap))))
    }

    /// `u ∧̃ v`: convex envelope of the union of the graphs.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut pts = self.points.clone();
        pts.extend(other.points.iter().cloned());
        Self::from_points(pts)
    }

    /// Whether `min(u, v)` is convex, i.e. `u ∧̃ v = u ∧ v`.
    ///
    /// Decided exactly as the epigraph inclusion `E_w ⊆ E_u ∪ E_v` for
    /// `w = u ∧̃ v`: every part of `E_w` outside a constraint of `E_u` must
    /// lie in `E_v`.
    pub fn is_min_convex(&self, other: &Self) -> Result<bool> {
        self.check_same_dim(other)?;
        let w = self.meet(other)?;
        let cap = self.common_cap(other);
        let ew = w.epigraph_capped(&cap);
        let eu = self.epigraph_capped(&cap);
        let ev = other.epigraph_capped(&cap);
        let mut constraints: Vec<(Vector, Rat)> = eu
            .facets()
            .iter()
            .map(|f| (f.normal.clone(), f.offset.clone()))
            .collect();
        for e in eu.equalities() {
            constraints.push((e.normal.clone(), e.offset.clone()));
            constraints.push((-&e.normal, -e.offset.clone()));
        }
        for (a, b) in constraints {
            if ew.vertices().iter().all(|z| a.dot(z) <= b) {
                continue;
            }
            let outside = ew.clip(&-&a, &-b);
            if !outside.vertices().iter().all(|z| ev.contains(z)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `u □ v`: lower hull of pairwise graph sums.
    pub fn inf_conv(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut pts = Vec::with_capacity(self.points.len() * other.points.len());
        for p in &self.points {
            for q in &other.points {
                pts.push(GraphPoint { x: &p.x + &q.x, t: &p.t + &q.t });
            }
        }
        Self::from_points(pts)
    }

    /// Exact `∫_{dom u} η(u(w)) dw`-style decomposition: simplices of the
    /// lower hull with the affine data `u(y) = a·y + b` on each.
    pub fn affine_cells(&self) -> Vec<AffineCell> {
        let (epi, cap) = self.epigraph();
        let n = self.n;
        let mut cells = Vec::new();
        if !self.domain().is_full_dim() {
            return cells;
        }
        for (f, verts) in epi.facets().iter().zip(epi.facet_incidence()) {
            if !f.normal[n].is_negative() {
                continue;
            }
            // facet a·x + a_t t <= b  ⇒  t = (b - a·x)/a_t on the facet
            let (a, at) = f.normal.split_last();
            let slope = a.scale(&-(at.recip()));
            let intercept = &f.offset / &at;
            let xs: Vec<Vector> = verts
                .iter()
                .map(|&i| epi.vertices()[i].split_last())
                .filter(|(_, t)| t < cap)
                .map(|(x, _)| x)
                .collect();
            let cell = Polytope::hull_unchecked(n, &xs);
            if cell.is_full_dim() {
                cells.push(AffineCell { cell, slope, intercept });
            }
        }
        cells
    }
}

/// Region where a polyhedral function is affine: `u(y) = slope·y + intercept`.
#[derive(Clone, Debug)]
pub struct AffineCell {
    pub cell: Polytope,
    pub slope: Vector,
    pub intercept: Rat,
}

#[derive(Serialize, Deserialize)]
struct SJson {
    points: Vec<GraphPoint>,
}

impl Serialize for PLConvexS {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SJson { points: self.points.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PLConvexS {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SJson::deserialize(d)?;
        PLConvexS::from_points(raw.points).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, ratio};

    fn cube3() -> Polytope {
        Polytope::cube(3, rat(0), rat(1))
    }

    #[test]
    fn indicator_eval() {
        let u = PLConvexS::indicator(&cube3()).unwrap();
        assert_eq!(u.eval(&Vector::from_i64(&[2, 0, 0])), Ext::Inf);
        assert_eq!(u.eval(&Vector(vec![ratio(1, 2); 3])), Ext::Finite(rat(0)));
    }

    #[test]
    fn envelope_drops_interior_points() {
        let pts = vec![
            GraphPoint { x: Vector::from_i64(&[-1]), t: rat(1) },
            GraphPoint { x: Vector::from_i64(&[0]), t: rat(1) },
            GraphPoint { x: Vector::from_i64(&[1]), t: rat(1) },
            GraphPoint { x: Vector::from_i64(&[0]), t: rat(3) },
        ];
        let u = PLConvexS::from_points(pts).unwrap();
        assert_eq!(u.points().len(), 2);
        assert_eq!(u.eval(&Vector::from_i64(&[0])), Ext::Finite(rat(1)));
    }

    #[test]
    fn abs_value_on_interval() {
        let pts = vec![
            GraphPoint { x: Vector::from_i64(&[-2]), t: rat(2) },
            GraphPoint { x: Vector::from_i64(&[0]), t: rat(0) },
            GraphPoint { x: Vector::from_i64(&[2]), t: rat(2) },
        ];
        let u = PLConvexS::from_points(pts).unwrap();
        assert_eq!(u.eval(&Vector(vec![ratio(-3, 2)])), Ext::Finite(ratio(3, 2)));
        assert_eq!(u.affine_cells().len(), 2);
    }

    #[test]
    fn split_reassembles() {
        let w = PLConvexS::indicator(&cube3()).unwrap();
        let e1 = Vector::basis(3, 0);
        let u = w.restrict(&e1, &ratio(1, 2)).unwrap();
        let v = w.restrict(&-&e1, &ratio(-1, 2)).unwrap();
        assert_eq!(u.meet(&v).unwrap(), w);
        assert!(u.is_min_convex(&v).unwrap());
        let j = u.join(&v).unwrap().unwrap();
        assert_eq!(j.domain().dim(), 2);
    }

    #[test]
    fn disconnected_min_is_not_convex() {
        let seg = |a: i64, b: i64| {
            PLConvexS::indicator(&Polytope::hull(&[Vector::from_i64(&[a]), Vector::from_i64(&[b])]).unwrap())
                .unwrap()
        };
        let (u, v) = (seg(0, 1), seg(2, 3));
        assert!(!u.is_min_convex(&v).unwrap());
        assert!(u.join(&v).unwrap().is_none());
    }

    #[test]
    fn infconv_of_indicators_is_minkowski() {
        let p = PLConvexS::indicator(&cube3()).unwrap();
        let s = p.inf_conv(&p).unwrap();
        assert_eq!(s, PLConvexS::indicator(&Polytope::cube(3, rat(0), rat(2))).unwrap());
        let zero = PLConvexS::indicator(&Polytope::point(Vector::zeros(3))).unwrap();
        assert_eq!(p.inf_conv(&zero).unwrap(), p);
    }
}
