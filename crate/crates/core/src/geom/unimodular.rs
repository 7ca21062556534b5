use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{det, identity, inverse, mat_mul, mat_vec, transpose, Matrix};
use crate::rat::{rat, Rat, Vector};

/// Element of SL(n) with exact entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnimodularMap {
    matrix: Matrix,
    inverse: Matrix,
    det: Rat,
}

impl UnimodularMap {
    /// Accepts only square matrices of determinant exactly one.
    pub fn new(matrix: Matrix) -> Result<Self> {
        let n = matrix.len();
        if n == 0 || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Input("unimodular map must be a nonempty square matrix".into()));
        }
        let d = det(&matrix);
        if d != rat(1) {
            return Err(Error::Input(format!("determinant is {d}, expected 1")));
        }
        let inverse = inverse(&matrix).expect("det 1 matrix is invertible");
        Ok(UnimodularMap { matrix, inverse, det: d })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(identity(n)).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn det(&self) -> &Rat {
        &self.det
    }

    /// φx
    pub fn apply(&self, x: &Vector) -> Vector {
        mat_vec(&self.matrix, x)
    }

    /// φ^{-1}x
    pub fn apply_inverse(&self, x: &Vector) -> Vector {
        mat_vec(&self.inverse, x)
    }

    /// φ^t x
    pub fn apply_transpose(&self, x: &Vector) -> Vector {
        mat_vec(&transpose(&self.matrix), x)
    }

    /// φ^{-t} x
    pub fn apply_inverse_transpose(&self, x: &Vector) -> Vector {
        mat_vec(&transpose(&self.inverse), x)
    }

    pub fn inverse_map(&self) -> UnimodularMap {
        UnimodularMap {
            matrix: self.inverse.clone(),
            inverse: self.matrix.clone(),
            det: self.det.clone(),
        }
    }

    pub fn transpose_map(&self) -> UnimodularMap {
        UnimodularMap {
            matrix: transpose(&self.matrix),
            inverse: transpose(&self.inverse),
            det: self.det.clone(),
        }
    }

    pub fn compose(&self, other: &UnimodularMap) -> UnimodularMap {
        UnimodularMap {
            matrix: mat_mul(&self.matrix, &other.matrix),
            inverse: mat_mul(&other.inverse, &self.inverse),
            det: self.det.clone(),
        }
    }

    pub fn max_abs_entry(&self) -> Rat {
        use num_traits::Signed;
        self.matrix
            .iter()
            .flatten()
            .map(|x| x.abs())
            .max()
            .unwrap_or_default()
    }
}

/// Deterministic SL(n) element: a product of one to six elementary shears
/// `I + c E_ij` with integer `c ∈ [-bound, bound] \ {0}`.
///
/// Trailing shears are dropped while the product has an entry larger than
/// `bound^6 · n`, so that bound holds for every seed.
pub fn random_unimodular(n: usize, seed: u64, bound: u32) -> Result<UnimodularMap> {
    if bound == 0 {
        return Err(Error::Parameter("shear bound must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::Parameter("dimension must be at least 1".into()));
    }
    if n == 1 {
        return Ok(UnimodularMap::identity(1));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.gen_range(1..=6);
    let b = bound as i64;
    let cap = rat(b.pow(6) * n as i64);
    let mut prefixes = vec![identity(n)];
    for _ in 0..count {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let mut c = rng.gen_range(-b..b);
        if c >= 0 {
            c += 1;
        }
        let mut shear = identity(n);
        shear[i][j] = rat(c);
        let next = mat_mul(prefixes.last().unwrap(), &shear);
        prefixes.push(next);
    }
    let within = |m: &Matrix| {
        use num_traits::Signed;
        m.iter().flatten().all(|x| x.abs() <= cap)
    };
    let chosen = prefixes.into_iter().rev().find(within).expect("identity is within bound");
    UnimodularMap::new(chosen)
}

impl Serialize for UnimodularMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vector> = self.matrix.iter().map(|r| Vector(r.clone())).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnimodularMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vector>::deserialize(d)?;
        UnimodularMap::new(rows.into_iter().map(|r| r.0).collect()).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_unimodular() {
        for seed in 0..50 {
            let a = random_unimodular(3, seed, 2).unwrap();
            let b = random_unimodular(3, seed, 2).unwrap();
            assert_eq!(a, b);
            assert_eq!(det(a.matrix()), rat(1));
            let x = Vector::from_i64(&[1, -2, 5]);
            assert_eq!(a.apply_inverse(&a.apply(&x)), x);
        }
    }

    #[test]
    fn rejects_non_unimodular() {
        assert!(UnimodularMap::new(vec![vec![rat(2), rat(0)], vec![rat(0), rat(1)]]).is_err());
    }
}
