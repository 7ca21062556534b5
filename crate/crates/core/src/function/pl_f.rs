use std::fmt;
use std::sync::OnceLock;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::pl_s::{GraphPoint, PLConvexS};
use crate::error::{Error, Result};
use crate::geom::UnimodularMap;
use crate::rat::{Rat, Vector};

/// Affine piece `x ↦ a·x + b`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Piece {
    pub a: Vector,
    #[serde(with = "crate::rat::rat_str")]
    pub b: Rat,
}

impl Piece {
    pub fn eval(&self, x: &Vector) -> Rat {
        self.a.dot(x) + &self.b
    }
}

/// Finite max-affine convex function `max_i (a_i·x + b_i)`, stored with
/// redundant pieces removed and pieces sorted.
///
/// A piece is kept iff its dual point `(a_i, -b_i)` is a vertex of the lower
/// hull of all dual points, which is the same as being the unique maximum
/// somewhere.
#[derive(Clone)]
pub struct PLConvexF {
    n: usize,
    pieces: Vec<Piece>,
    witnesses: OnceLock<Vec<Vector>>,
}

impl PartialEq for PLConvexF {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.pieces == other.pieces
    }
}

impl Eq for PLConvexF {}

impl fmt::Debug for PLConvexF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "max[")?;
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}·x{:+}", p.a, crate::rat::rat_to_f64(&p.b))?;
        }
        write!(f, "]")
    }
}

impl PLConvexF {
    /// Canonicalizes an arbitrary nonempty list of pieces.
    pub fn from_pieces(pieces: Vec<Piece>) -> Result<Self> {
        let first = pieces
            .first()
            .ok_or_else(|| Error::Input("max-affine function needs at least one piece".into()))?;
        let n = first.a.dim();
        if n == 0 {
            return Err(Error::Input("pieces need at least one coordinate".into()));
        }
        for p in &pieces {
            p.a.check_dim(n)?;
        }
        let dual = PLConvexS::from_points(
            pieces
                .iter()
                .map(|p| GraphPoint { x: p.a.clone(), t: -p.b.clone() })
                .collect(),
        )?;
        Ok(Self::from_dual(&dual))
    }

    /// Conjugate of a class-S function: pieces `(x_j, -t_j)`.
    pub(crate) fn from_dual(dual: &PLConvexS) -> Self {
        let mut pieces: Vec<Piece> = dual
            .points()
            .iter()
            .map(|p| Piece { a: p.x.clone(), b: -p.t.clone() })
            .collect();
        pieces.sort();
        PLConvexF {
            n: dual.dim(),
            pieces,
            witnesses: OnceLock::new(),
        }
    }

    pub(crate) fn from_canonical(n: usize, mut pieces: Vec<Piece>) -> Self {
        pieces.sort();
        PLConvexF {
            n,
            pieces,
            witnesses: OnceLock::new(),
        }
    }

    /// `ℓ_y`
    pub fn linear(y: &Vector) -> Self {
        Self::from_canonical(y.dim(), vec![Piece { a: y.clone(), b: Rat::zero() }])
    }

    pub fn constant(n: usize, c: Rat) -> Self {
        Self::from_canonical(n, vec![Piece { a: Vector::zeros(n), b: c }])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn eval(&self, x: &Vector) -> Rat {
        self.pieces.iter().map(|p| p.eval(x)).max().expect("nonempty")
    }

    /// The dual point set as a class-S function (the conjugate).
    pub fn dual(&self) -> PLConvexS {
        PLConvexS::from_canonical(
            self.n,
            self.pieces
                .iter()
                .map(|p| GraphPoint { x: p.a.clone(), t: -p.b.clone() })
                .collect(),
        )
    }

    /// For each piece, a point where it is the strict unique maximum.
    ///
    /// Taken as the sum of outward facet normals of the dual epigraph at the
    /// piece's dual vertex, rescaled to have last coordinate -1.
    pub fn witnesses(&self) -> &[Vector] {
        self.witnesses.get_or_init(|| {
            let dual = self.dual();
            let (epi, _) = dual.epigraph();
            let n = self.n;
            self.pieces
                .iter()
                .map(|p| {
                    let z = p.a.lift(-p.b.clone());
                    let idx = epi.vertices().iter().position(|v| *v == z).expect("dual vertex");
                    let mut sum = Vector::zeros(n + 1);
                    for (f, inc) in epi.facets().iter().zip(epi.facet_incidence()) {
                        if inc.contains(&idx) {
                            sum = &sum + &f.normal;
                        }
                    }
                    let (nx, nt) = sum.split_last();
                    debug_assert!(nt.is_negative());
                    nx.scale(&(-nt).recip())
                })
                .collect()
        })
    }

    fn map_pieces(&self, f: impl Fn(&Piece) -> Piece) -> Self {
        Self::from_canonical(self.n, self.pieces.iter().map(f).collect())
    }

    /// `τ_y u = u(· - y)`
    pub fn translate(&self, y: &Vector) -> Result<Self> {
        y.check_dim(self.n)?;
        Ok(self.map_pieces(|p| Piece { a: p.a.clone(), b: &p.b - p.a.dot(y) }))
    }

    /// `u + ℓ_y`
    pub fn dual_translate(&self, y: &Vector) -> Result<Self> {
        y.check_dim(self.n)?;
        Ok(self.map_pieces(|p| Piece { a: &p.a + y, b: p.b.clone() }))
    }

    pub fn add_const(&self, c: &Rat) -> Self {
        self.map_pieces(|p| Piece { a: p.a.clone(), b: &p.b + c })
    }

    /// `u ∘ λ`
    pub fn scale_arg(&self, lambda: &Rat) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::Input("argument scale must be nonzero".into()));
        }
        Ok(self.map_pieces(|p| Piece { a: p.a.scale(lambda), b: p.b.clone() }))
    }

    /// `λ u` for `λ > 0`.
    pub fn scale_val(&self, lambda: &Rat) -> Result<Self> {
        if !lambda.is_positive() {
            return Err(Error::Input("value scale must be positive".into()));
        }
        Ok(self.map_pieces(|p| Piece { a: p.a.scale(lambda), b: &p.b * lambda }))
    }

    /// `u ∘ φ^{-1}`: slopes map by `φ^{-t}`.
    pub fn compose_inverse(&self, phi: &UnimodularMap) -> Result<Self> {
        if phi.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: phi.dim() });
        }
        Ok(self.map_pieces(|p| Piece { a: phi.apply_inverse_transpose(&p.a), b: p.b.clone() }))
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        Ok(())
    }

    /// `u ∨ v`: all pieces together.
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        Self::from_pieces(pieces)
    }

    /// `u + v`: all pairwise piece sums.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut pieces = Vec::with_capacity(self.pieces.len() * other.pieces.len());
        for p in &self.pieces {
            for q in &other.pieces {
                pieces.push(Piece { a: &p.a + &q.a, b: &p.b + &q.b });
            }
        }
        Self::from_pieces(pieces)
    }

    /// `u ∧̃ v = (u* ∨ v*)*`; `None` when it is identically `-∞`.
    pub fn meet(&self, other: &Self) -> Result<Option<Self>> {
        self.check_same_dim(other)?;
        Ok(self.dual().join(&other.dual())?.map(|d| Self::from_dual(&d)))
    }

    /// Whether `min(u, v)` is convex; equivalent to the same question for the
    /// conjugates.
    pub fn is_min_convex(&self, other: &Self) -> Result<bool> {
        self.check_same_dim(other)?;
        self.dual().is_min_convex(&other.dual())
    }
}

#[derive(Serialize, Deserialize)]
struct FJson {
    pieces: Vec<Piece>,
}

impl Serialize for PLConvexF {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FJson { pieces: self.pieces.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PLConvexF {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = FJson::deserialize(d)?;
        PLConvexF::from_pieces(raw.pieces).map_err(serde::de::Error::custom)
    }
}
