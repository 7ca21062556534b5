//! Incremental beneath-beyond convex hull with exact predicates.
//!
//! Points are first reduced to their affine hull: with `p0` the lex-smallest
//! point and `S` a set of pivot coordinates, the projection `x -> x_S` is an
//! affine bijection from the affine hull onto R^k, so all orientation tests
//! run full-dimensionally in R^k and facet normals lift back by padding with
//! zeros outside `S`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::linalg::{nullspace, rank, rref};
use crate::rat::{rat_to_f64, Rat, Vector};

/// Halfspace `normal · x <= offset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Halfspace {
    pub normal: Vector,
    pub offset: Rat,
}

impl Halfspace {
    pub fn slack(&self, x: &Vector) -> Rat {
        &self.offset - self.normal.dot(x)
    }
}

/// Everything the hull computation learns about a point set.
#[derive(Clone, Debug)]
pub struct HullData {
    /// Affine dimension; -1 for the empty set.
    pub dim: isize,
    /// Irredundant vertices, sorted lexicographically.
    pub vertices: Vec<Vector>,
    /// Facets relative to the affine hull, lifted to ambient coordinates.
    pub facets: Vec<Halfspace>,
    /// Vertex indices on each facet.
    pub incidence: Vec<Vec<usize>>,
    /// `a · x = b` equations cutting out the affine hull.
    pub equalities: Vec<Halfspace>,
    /// Fan triangulation from vertex 0; each simplex has `dim + 1` indices.
    pub simplices: Vec<Vec<usize>>,
}

impl HullData {
    pub fn empty() -> Self {
        HullData {
            dim: -1,
            vertices: Vec::new(),
            facets: Vec::new(),
            incidence: Vec::new(),
            equalities: Vec::new(),
            simplices: Vec::new(),
        }
    }
}

/// Scales so the first nonzero coordinate has absolute value one.
fn normalize(normal: Vector, offset: Rat) -> (Vector, Rat) {
    let lead = normal
        .iter()
        .find(|c| !c.is_zero())
        .expect("zero normal")
        .abs();
    let inv = lead.recip();
    (normal.scale(&inv), offset * inv)
}

fn project(x: &Vector, coords: &[usize]) -> Vector {
    Vector(coords.iter().map(|&c| x[c].clone()).collect())
}

/// Lex-greedy affinely independent subset; returns indices into `pts`.
fn greedy_simplex(pts: &[Vector]) -> Vec<usize> {
    let mut chosen = vec![0];
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    let dim = pts[0].dim();
    for (i, p) in pts.iter().enumerate().skip(1) {
        if rows.len() == dim {
            break;
        }
        let mut trial = rows.clone();
        trial.push((p - &pts[0]).0);
        if rank(&trial) > rows.len() {
            rows = trial;
            chosen.push(i);
        }
    }
    chosen
}

struct SFacet {
    verts: Vec<usize>,
    normal: Vector,
    offset: Rat,
}

/// Facet over integer coordinates, with a floating-point shadow for fast
/// visibility tests.
struct IFacet {
    verts: Vec<usize>,
    normal: Vec<BigInt>,
    offset: BigInt,
    approx: Vec<f64>,
    approx_offset: f64,
}

fn big_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn dot_int(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl IFacet {
    /// `normal · p > offset`, decided in floating point when the margin is
    /// clear and exactly otherwise.
    fn sees(&self, p: &[BigInt], pf: &[f64]) -> bool {
        let mut s = -self.approx_offset;
        let mut mag = self.approx_offset.abs();
        for (a, x) in self.approx.iter().zip(pf) {
            s += a * x;
            mag += (a * x).abs();
        }
        let slack = 1e-9 * mag + 1e-300;
        if s.is_finite() && mag.is_finite() {
            if s > slack {
                return true;
            }
            if s < -slack {
                return false;
            }
        }
        dot_int(&self.normal, p) > self.offset
    }
}

fn det(m: &[Vec<BigInt>]) -> BigInt {
    match m.len() {
        0 => BigInt::one(),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        k => {
            let mut acc = BigInt::zero();
            for j in 0..k {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<BigInt>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let t = &m[0][j] * det(&minor);
                if j % 2 == 0 {
                    acc += t;
                } else {
                    acc -= t;
                }
            }
            acc
        }
    }
}

/// Hyperplane through `verts` with `interior_sum` (the sum of `scale`
/// points) strictly below. The normal is the vector of signed maximal
/// minors of the difference rows, divided by its content.
fn plane_through(pts: &[Vec<BigInt>], verts: &[usize], interior_sum: &[BigInt], scale: &BigInt) -> IFacet {
    let base = &pts[verts[0]];
    let k = base.len();
    let rows: Vec<Vec<BigInt>> = verts[1..]
        .iter()
        .map(|&v| pts[v].iter().zip(base).map(|(x, y)| x - y).collect())
        .collect();
    let mut normal: Vec<BigInt> = (0..k)
        .map(|i| {
            let minor: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != i).map(|(_, x)| x.clone()).collect())
                .collect();
            let d = det(&minor);
            if i % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect();
    let g = normal.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    debug_assert!(!g.is_zero(), "degenerate facet");
    if !g.is_one() {
        for x in &mut normal {
            *x /= &g;
        }
    }
    let mut offset = dot_int(&normal, base);
    if dot_int(&normal, interior_sum) > scale * &offset {
        for x in &mut normal {
            *x = -&*x;
        }
        offset = -offset;
    }
    IFacet {
        verts: verts.to_vec(),
        approx: normal.iter().map(big_f64).collect(),
        approx_offset: big_f64(&offset),
        normal,
        offset,
    }
}

/// Simplicial boundary of conv(pts) in R^k, k >= 2, pts full-dimensional.
fn simplicial_boundary(pts: &[Vector]) -> Vec<SFacet> {
    let k = pts[0].dim();
    // common denominator: the whole incremental loop runs over integers
    let den = pts
        .iter()
        .flat_map(|p| p.iter())
        .fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    let ipts: Vec<Vec<BigInt>> = pts
        .iter()
        .map(|p| p.iter().map(|q| q.numer() * (&den / q.denom())).collect())
        .collect();
    let approx: Vec<Vec<f64>> = ipts.iter().map(|p| p.iter().map(big_f64).collect()).collect();

    let init = greedy_simplex(pts);
    debug_assert_eq!(init.len(), k + 1);
    let mut interior = vec![BigInt::zero(); k];
    for &i in &init {
        for (acc, x) in interior.iter_mut().zip(&ipts[i]) {
            *acc += x;
        }
    }
    let scale = BigInt::from(k + 1);

    let mut facets: Vec<IFacet> = Vec::new();
    for skip in 0..init.len() {
        let mut verts: Vec<usize> = init
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != skip)
            .map(|(_, &v)| v)
            .collect();
        verts.sort_unstable();
        facets.push(plane_through(&ipts, &verts, &interior, &scale));
    }

    for idx in 0..pts.len() {
        if init.contains(&idx) {
            continue;
        }
        let (visible, kept): (Vec<IFacet>, Vec<IFacet>) =
            facets.into_iter().partition(|f| f.sees(&ipts[idx], &approx[idx]));
        facets = kept;
        if visible.is_empty() {
            continue;
        }
        let mut ridges: HashMap<Vec<usize>, usize> = HashMap::new();
        for f in &visible {
            for skip in 0..f.verts.len() {
                let mut r = f.verts.clone();
                r.remove(skip);
                *ridges.entry(r).or_default() += 1;
            }
        }
        let mut horizon: Vec<Vec<usize>> =
            ridges.into_iter().filter(|(_, c)| *c == 1).map(|(r, _)| r).collect();
        horizon.sort();
        for mut verts in horizon {
            verts.push(idx);
            verts.sort_unstable();
            facets.push(plane_through(&ipts, &verts, &interior, &scale));
        }
    }
    let den = Rat::from_integer(den);
    facets
        .into_iter()
        .map(|f| {
            let normal = Vector(f.normal.into_iter().map(Rat::from_integer).collect());
            let (normal, offset) = normalize(normal, Rat::from_integer(f.offset) / &den);
            SFacet { verts: f.verts, normal, offset }
        })
        .collect()
}

/// Indices of points that are genuine vertices of the simplicial boundary.
fn extreme_points(pts: &[Vector], facets: &[SFacet]) -> Vec<usize> {
    let k = pts[0].dim();
    let mut normals: HashMap<usize, Vec<Vec<Rat>>> = HashMap::new();
    for f in facets {
        for &v in &f.verts {
            let entry = normals.entry(v).or_default();
            if !entry.contains(&f.normal.0) {
                entry.push(f.normal.0.clone());
            }
        }
    }
    let mut out: Vec<usize> = normals
        .into_iter()
        .filter(|(_, ns)| ns.len() >= k && rank(ns) == k)
        .map(|(v, _)| v)
        .collect();
    out.sort_unstable();
    out
}

/// Convex hull of a nonempty point set of common dimension.
pub fn convex_hull(points: &[Vector]) -> HullData {
    if points.is_empty() {
        return HullData::empty();
    }
    let d = points[0].dim();
    let mut pts: Vec<Vector> = points.to_vec();
    pts.sort();
    pts.dedup();

    let p0 = pts[0].clone();
    let diffs: Vec<Vec<Rat>> = pts.iter().skip(1).map(|p| (p - &p0).0).collect();
    let (_, coords) = if diffs.is_empty() {
        (Vec::new(), Vec::new())
    } else if greedy_simplex(&pts).len() == d + 1 {
        (Vec::new(), (0..d).collect())
    } else {
        rref(&diffs)
    };
    let k = coords.len();

    let equalities: Vec<Halfspace> = if k == 0 {
        (0..d)
            .map(|i| {
                let normal = Vector::basis(d, i);
                Halfspace { offset: p0[i].clone(), normal }
            })
            .collect()
    } else {
        nullspace(&diffs, d)
            .into_iter()
            .map(|a| {
                let b = a.dot(&p0);
                let (normal, offset) = normalize(a, b);
                Halfspace { normal, offset }
            })
            .collect()
    };

    if k == 0 {
        return HullData {
            dim: 0,
            vertices: vec![p0],
            facets: Vec::new(),
            incidence: Vec::new(),
            equalities,
            simplices: vec![vec![0]],
        };
    }

    let lift = |alpha: &Vector, beta: &Rat| -> Halfspace {
        let mut a = Vector::zeros(d);
        for (j, &c) in coords.iter().enumerate() {
            a[c] = alpha[j].clone();
        }
        let (normal, offset) = normalize(a, beta.clone());
        Halfspace { normal, offset }
    };

    if k == 1 {
        let c = coords[0];
        let lo = pts.iter().min_by(|a, b| a[c].cmp(&b[c])).unwrap().clone();
        let hi = pts.iter().max_by(|a, b| a[c].cmp(&b[c])).unwrap().clone();
        let mut vertices = vec![lo, hi];
        vertices.sort();
        let (v0, v1) = (&vertices[0][c], &vertices[1][c]);
        let (neg, pos) = if v0 < v1 { (0, 1) } else { (1, 0) };
        let facets = vec![
            lift(&Vector(vec![Rat::from_integer((-1).into())]), &-vertices[neg][c].clone()),
            lift(&Vector(vec![Rat::from_integer(1.into())]), &vertices[pos][c]),
        ];
        return HullData {
            dim: 1,
            vertices,
            facets,
            incidence: vec![vec![neg], vec![pos]],
            equalities,
            simplices: vec![vec![0, 1]],
        };
    }

    let local: Vec<Vector> = pts.iter().map(|p| project(p, &coords)).collect();
    let first = simplicial_boundary(&local);
    let keep = extreme_points(&local, &first);
    let vertices: Vec<Vector> = keep.iter().map(|&i| pts[i].clone()).collect();
    let local: Vec<Vector> = keep.iter().map(|&i| local[i].clone()).collect();
    let boundary = if keep.len() == pts.len() { first } else { simplicial_boundary(&local) };

    let mut planes: Vec<(Vector, Rat)> = Vec::new();
    for f in &boundary {
        let key = (f.normal.clone(), f.offset.clone());
        if !planes.contains(&key) {
            planes.push(key);
        }
    }
    planes.sort();
    let mut facets = Vec::with_capacity(planes.len());
    let mut incidence = Vec::with_capacity(planes.len());
    let approx: Vec<Vec<f64>> = local.iter().map(|p| p.iter().map(rat_to_f64).collect()).collect();
    for (alpha, beta) in &planes {
        let af: Vec<f64> = alpha.iter().map(rat_to_f64).collect();
        let bf = rat_to_f64(beta);
        incidence.push(
            (0..local.len())
                .filter(|&i| {
                    // cheap rejection of points clearly off the plane
                    let (mut s, mut mag) = (-bf, bf.abs());
                    for (a, x) in af.iter().zip(&approx[i]) {
                        s += a * x;
                        mag += (a * x).abs();
                    }
                    if s.is_finite() && mag.is_finite() && s.abs() > 1e-9 * mag + 1e-300 {
                        return false;
                    }
                    alpha.dot(&local[i]) == *beta
                })
                .collect(),
        );
        facets.push(lift(alpha, beta));
    }

    let apex = &local[0];
    let mut simplices: Vec<Vec<usize>> = boundary
        .iter()
        .filter(|f| f.normal.dot(apex) < f.offset)
        .map(|f| {
            let mut s = vec![0];
            s.extend(f.verts.iter().copied());
            s
        })
        .collect();
    simplices.sort();

    HullData {
        dim: k as isize,
        vertices,
        facets,
        incidence,
        equalities,
        simplices,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;

    fn v(xs: &[i64]) -> Vector {
        Vector::from_i64(xs)
    }

    #[test]
    fn cube_hull_has_six_facets() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(v(&[i & 1, (i >> 1) & 1, (i >> 2) & 1]));
        }
        pts.push(Vector(vec![ratio(1, 2), ratio(1, 3), ratio(1, 5)]));
        pts.push(Vector(vec![ratio(1, 2), ratio(0, 1), ratio(0, 1)]));
        let h = convex_hull(&pts);
        assert_eq!(h.dim, 3);
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.facets.len(), 6);
        assert!(h.incidence.iter().all(|f| f.len() == 4));
        // Fan from the origin skips the three facets through it.
        assert_eq!(h.simplices.len(), 6);
    }

    #[test]
    fn collinear_points_in_space() {
        let pts = vec![v(&[0, 0, 0]), v(&[2, 2, 2]), v(&[1, 1, 1]), v(&[3, 3, 3])];
        let h = convex_hull(&pts);
        assert_eq!(h.dim, 1);
        assert_eq!(h.vertices, vec![v(&[0, 0, 0]), v(&[3, 3, 3])]);
        assert_eq!(h.equalities.len(), 2);
    }

    #[test]
    fn planar_square_in_space() {
        let pts = vec![
            v(&[0, 0, 1]),
            v(&[1, 0, 1]),
            v(&[0, 1, 1]),
            v(&[1, 1, 1]),
            Vector(vec![ratio(1, 2), ratio(0, 1), ratio(1, 1)]),
        ];
        let h = convex_hull(&pts);
        assert_eq!(h.dim, 2);
        assert_eq!(h.vertices.len(), 4);
        assert_eq!(h.facets.len(), 4);
        assert_eq!(h.simplices.len(), 2);
    }

    #[test]
    fn single_point() {
        let h = convex_hull(&[v(&[1, 2])]);
        assert_eq!(h.dim, 0);
        assert_eq!(h.equalities.len(), 2);
    }
}
