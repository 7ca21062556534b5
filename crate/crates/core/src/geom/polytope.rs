use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::hull::{convex_hull, Halfspace, HullData};
use super::unimodular::UnimodularMap;
use crate::error::{Error, Result};
use crate::linalg::{det, rank};
use crate::rat::{rat, Rat, Vector};

/// Convex polytope given by its irredundant vertices, with the hull data
/// (facets, affine equations, fan triangulation) computed at construction.
#[derive(Clone)]
pub struct Polytope {
    ambient: usize,
    hull: HullData,
    edges: OnceLock<Vec<(usize, usize)>>,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.hull.vertices == other.hull.vertices
    }
}

impl Eq for Polytope {}

impl fmt::Debug for Polytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Polytope")
            .field("dim", &self.hull.dim)
            .field("vertices", &self.hull.vertices)
            .finish()
    }
}

impl Polytope {
    pub fn empty(ambient: usize) -> Self {
        Polytope {
            ambient,
            hull: HullData::empty(),
            edges: OnceLock::new(),
        }
    }

    /// Convex hull of a nonempty list of points of equal length.
    pub fn hull(points: &[Vector]) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::Input("hull of an empty point list".into()))?;
        let n = first.dim();
        if n == 0 {
            return Err(Error::Input("points must have at least one coordinate".into()));
        }
        for p in points {
            p.check_dim(n)?;
        }
        Ok(Self::hull_unchecked(n, points))
    }

    /// Hull of a possibly empty point list of known ambient dimension.
    pub(crate) fn hull_unchecked(ambient: usize, points: &[Vector]) -> Self {
        Polytope {
            ambient,
            hull: convex_hull(points),
            edges: OnceLock::new(),
        }
    }

    /// The box `[lo, hi]^n`.
    pub fn cube(n: usize, lo: Rat, hi: Rat) -> Self {
        let pts: Vec<Vector> = (0..1usize << n)
            .map(|mask| {
                Vector(
                    (0..n)
                        .map(|i| if mask >> i & 1 == 1 { hi.clone() } else { lo.clone() })
                        .collect(),
                )
            })
            .collect();
        Self::hull_unchecked(n, &pts)
    }

    /// Axis box with per-coordinate bounds.
    pub fn boxed(bounds: &[(Rat, Rat)]) -> Self {
        let n = bounds.len();
        let pts: Vec<Vector> = (0..1usize << n)
            .map(|mask| {
                Vector(
                    (0..n)
                        .map(|i| {
                            let (lo, hi) = &bounds[i];
                            if mask >> i & 1 == 1 { hi.clone() } else { lo.clone() }
                        })
                        .collect(),
                )
            })
            .collect();
        Self::hull_unchecked(n, &pts)
    }

    /// conv{0, e_1, ..., e_n}.
    pub fn standard_simplex(n: usize) -> Self {
        let mut pts = vec![Vector::zeros(n)];
        pts.extend((0..n).map(|i| Vector::basis(n, i)));
        Self::hull_unchecked(n, &pts)
    }

    pub fn point(x: Vector) -> Self {
        let n = x.dim();
        Self::hull_unchecked(n, &[x])
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Affine dimension, -1 when empty.
    pub fn dim(&self) -> isize {
        self.hull.dim
    }

    pub fn is_empty(&self) -> bool {
        self.hull.dim < 0
    }

    pub fn is_full_dim(&self) -> bool {
        self.hull.dim == self.ambient as isize
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.hull.vertices
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.hull.facets
    }

    pub fn facet_incidence(&self) -> &[Vec<usize>] {
        &self.hull.incidence
    }

    pub fn equalities(&self) -> &[Halfspace] {
        &self.hull.equalities
    }

    pub fn triangulation(&self) -> &[Vec<usize>] {
        &self.hull.simplices
    }

    pub fn contains(&self, x: &Vector) -> bool {
        !self.is_empty()
            && self.hull.equalities.iter().all(|e| e.normal.dot(x) == e.offset)
            && self.hull.facets.iter().all(|f| f.normal.dot(x) <= f.offset)
    }

    /// Vertex pairs spanning an edge.
    pub fn edges(&self) -> &[(usize, usize)] {
        self.edges.get_or_init(|| {
            let nv = self.hull.vertices.len();
            let k = self.hull.dim;
            if k < 1 {
                return Vec::new();
            }
            if k == 1 {
                return vec![(0, 1)];
            }
            let mut on: Vec<Vec<usize>> = vec![Vec::new(); nv];
            for (fi, verts) in self.hull.incidence.iter().enumerate() {
                for &v in verts {
                    on[v].push(fi);
                }
            }
            let need = (k - 1) as usize;
            let mut out = Vec::new();
            for a in 0..nv {
                for b in a + 1..nv {
                    let common: Vec<Vec<Rat>> = on[a]
                        .iter()
                        .filter(|f| on[b].contains(f))
                        .map(|&f| self.hull.facets[f].normal.0.clone())
                        .collect();
                    if common.len() >= need && rank(&common) == need {
                        out.push((a, b));
                    }
                }
            }
            out
        })
    }

    /// `P ∩ {y : a·y <= t}`; never fails, may be empty.
    pub fn clip(&self, a: &Vector, t: &Rat) -> Polytope {
        if self.is_empty() {
            return self.clone();
        }
        let s: Vec<Rat> = self.hull.vertices.iter().map(|v| a.dot(v) - t).collect();
        if s.iter().all(|x| !x.is_positive()) {
            return self.clone();
        }
        if s.iter().all(|x| x.is_positive()) {
            return Polytope::empty(self.ambient);
        }
        let verts = &self.hull.vertices;
        let mut pts: Vec<Vector> = verts
            .iter()
            .zip(&s)
            .filter(|(_, x)| !x.is_positive())
            .map(|(v, _)| v.clone())
            .collect();
        for &(i, j) in self.edges() {
            let (si, sj) = (&s[i], &s[j]);
            if (si.is_negative() && sj.is_positive()) || (si.is_positive() && sj.is_negative()) {
                let lam = si / (si - sj);
                pts.push(&verts[i] + &(&verts[j] - &verts[i]).scale(&lam));
            }
        }
        Polytope::hull_unchecked(self.ambient, &pts)
    }

    /// `P ∩ {y : a·y = t}`.
    pub fn section(&self, a: &Vector, t: &Rat) -> Polytope {
        self.clip(a, t).clip(&-a, &-t.clone())
    }

    /// Intersection with another polytope by clipping against its H-data.
    pub fn intersect(&self, other: &Polytope) -> Polytope {
        if other.is_empty() {
            return Polytope::empty(self.ambient);
        }
        let mut p = self.clone();
        for e in other.equalities() {
            p = p.section(&e.normal, &e.offset);
        }
        for f in other.facets() {
            p = p.clip(&f.normal, &f.offset);
        }
        p
    }

    /// Support function `h_P(x) = max_{v} x·v`.
    pub fn support(&self, x: &Vector) -> Result<Rat> {
        self.hull
            .vertices
            .iter()
            .map(|v| x.dot(v))
            .max()
            .ok_or_else(|| Error::Domain("support function of the empty polytope".into()))
    }

    pub fn reflect(&self) -> Polytope {
        let pts: Vec<Vector> = self.hull.vertices.iter().map(|v| -v).collect();
        Polytope::hull_unchecked(self.ambient, &pts)
    }

    pub fn translate(&self, y: &Vector) -> Result<Polytope> {
        y.check_dim(self.ambient)?;
        let pts: Vec<Vector> = self.hull.vertices.iter().map(|v| v + y).collect();
        Ok(Polytope::hull_unchecked(self.ambient, &pts))
    }

    pub fn scale(&self, k: &Rat) -> Polytope {
        let pts: Vec<Vector> = self.hull.vertices.iter().map(|v| v.scale(k)).collect();
        Polytope::hull_unchecked(self.ambient, &pts)
    }

    pub fn minkowski(&self, other: &Polytope) -> Result<Polytope> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                got: other.ambient,
            });
        }
        let mut pts = Vec::new();
        for a in &self.hull.vertices {
            for b in &other.hull.vertices {
                pts.push(a + b);
            }
        }
        Ok(Polytope::hull_unchecked(self.ambient, &pts))
    }

    pub fn apply_map(&self, phi: &UnimodularMap) -> Result<Polytope> {
        if phi.dim() != self.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                got: phi.dim(),
            });
        }
        let pts: Vec<Vector> = self.hull.vertices.iter().map(|v| phi.apply(v)).collect();
        Ok(Polytope::hull_unchecked(self.ambient, &pts))
    }

    /// Signed-free volume of one triangulation simplex (0 when degenerate).
    fn simplex_volume(&self, s: &[usize]) -> Rat {
        let v = &self.hull.vertices;
        let rows: Vec<Vec<Rat>> = s[1..].iter().map(|&i| (&v[i] - &v[s[0]]).0).collect();
        det(&rows).abs() / factorial(self.ambient)
    }

    /// Full-dimensional simplices with their volumes.
    pub fn simplex_volumes(&self) -> Vec<(Vec<usize>, Rat)> {
        if !self.is_full_dim() {
            return Vec::new();
        }
        self.hull
            .simplices
            .iter()
            .map(|s| (s.clone(), self.simplex_volume(s)))
            .collect()
    }

    pub fn volume(&self) -> Rat {
        self.simplex_volumes().into_iter().map(|(_, v)| v).sum()
    }

    /// Euler characteristic, volume and moment vector.
    pub fn measures(&self) -> Measures {
        let n = self.ambient;
        let mut vn = Rat::zero();
        let mut m = Vector::zeros(n);
        let w = rat(n as i64 + 1).recip();
        for (s, vol) in self.simplex_volumes() {
            let mut c = Vector::zeros(n);
            for &i in &s {
                c = &c + &self.hull.vertices[i];
            }
            m = &m + &c.scale(&(&vol * &w));
            vn += vol;
        }
        Measures {
            v0: if self.is_empty() { Rat::zero() } else { Rat::one() },
            vn,
            moment: m,
        }
    }

    /// A strictly interior point (relative interior): the vertex average.
    pub fn centroid_of_vertices(&self) -> Option<Vector> {
        let v = &self.hull.vertices;
        if v.is_empty() {
            return None;
        }
        let mut c = Vector::zeros(self.ambient);
        for p in v {
            c = &c + p;
        }
        Some(c.scale(&rat(v.len() as i64).recip()))
    }
}

/// `V_0`, `V_n` and the moment vector `m(P) = ∫_P y dy`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measures {
    pub v0: Rat,
    pub vn: Rat,
    pub moment: Vector,
}

pub fn factorial(n: usize) -> Rat {
    (1..=n as i64).map(rat).fold(Rat::one(), |a, b| a * b)
}

#[derive(Serialize, Deserialize)]
struct PolytopeJson {
    dim: usize,
    vertices: Vec<Vector>,
}

impl Serialize for Polytope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolytopeJson {
            dim: self.ambient,
            vertices: self.hull.vertices.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polytope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PolytopeJson::deserialize(d)?;
        for v in &raw.vertices {
            if v.dim() != raw.dim {
                return Err(serde::de::Error::custom(format!(
                    "vertex {v} has {} coordinates, expected {}",
                    v.dim(),
                    raw.dim
                )));
            }
        }
        Ok(Polytope::hull_unchecked(raw.dim, &raw.vertices))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;

    #[test]
    fn cube_measures() {
        let c = Polytope::cube(3, rat(0), rat(1));
        let m = c.measures();
        assert_eq!(m.v0, rat(1));
        assert_eq!(m.vn, rat(1));
        assert_eq!(m.moment, Vector(vec![ratio(1, 2); 3]));
    }

    #[test]
    fn simplex_measures() {
        let s = Polytope::standard_simplex(3);
        let m = s.measures();
        assert_eq!(m.vn, ratio(1, 6));
        assert_eq!(m.moment, Vector(vec![ratio(1, 24); 3]));
    }

    #[test]
    fn segment_measures_vanish() {
        let s = Polytope::hull(&[Vector::zeros(3), Vector::basis(3, 0)]).unwrap();
        let m = s.measures();
        assert_eq!((m.v0, m.vn, m.moment), (rat(1), rat(0), Vector::zeros(3)));
    }

    #[test]
    fn clip_cube() {
        let c = Polytope::cube(3, rat(0), rat(1));
        let e1 = Vector::basis(3, 0);
        let half = c.clip(&e1, &ratio(1, 2));
        assert_eq!(half, Polytope::boxed(&[(rat(0), ratio(1, 2)), (rat(0), rat(1)), (rat(0), rat(1))]));
        assert_eq!(c.clip(&e1, &rat(2)), c);
        assert!(c.clip(&e1, &rat(-1)).is_empty());
        let face = c.section(&e1, &rat(1));
        assert_eq!(face.dim(), 2);
        assert_eq!(face.vertices().len(), 4);
    }

    #[test]
    fn corner_cut_volume() {
        let s = Polytope::standard_simplex(3);
        let cut = s.clip(&Vector::from_i64(&[1, 1, 1]), &ratio(1, 2));
        assert_eq!(cut.volume(), ratio(1, 48));
    }

    #[test]
    fn support_and_ops() {
        let c = Polytope::cube(3, rat(0), rat(1));
        assert_eq!(c.support(&Vector::from_i64(&[1, -2, 3])).unwrap(), rat(4));
        assert_eq!(c.support(&Vector::zeros(3)).unwrap(), rat(0));
        assert_eq!(c.reflect(), Polytope::cube(3, rat(-1), rat(0)));
        assert_eq!(c.minkowski(&c).unwrap(), Polytope::cube(3, rat(0), rat(2)));
        assert!(Polytope::empty(3).support(&Vector::zeros(3)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = Polytope::standard_simplex(2);
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"dim":2,"vertices":[["0","0"],["0","1"],["1","0"]]}"#);
        let back: Polytope = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
