//! Points and vectors in R^n.

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

/// A point or vector in R^n. Stored inline for n <= 4.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AmbientVector(SmallVec<[f64; 4]>);

impl AmbientVector {
    pub fn new(coords: &[f64]) -> Self {
        AmbientVector(SmallVec::from_slice(coords))
    }

    pub fn zeros(n: usize) -> Self {
        AmbientVector(SmallVec::from_elem(0.0, n))
    }

    /// The i-th standard basis vector of R^n.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        AmbientVector(self.0.iter().map(|a| a * s).collect())
    }

    /// `self + s * other`
    pub fn add_scaled(&self, s: f64, other: &Self) -> Self {
        AmbientVector(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + s * b).collect())
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self.scaled(1.0 / n))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Affine combination `sum_i w_i p_i`.
    pub fn combination(weights: &[f64], points: &[&AmbientVector]) -> Self {
        let mut out = Self::zeros(points[0].dim());
        for (w, p) in weights.iter().zip(points) {
            for (o, c) in out.0.iter_mut().zip(p.0.iter()) {
                *o += w * c;
            }
        }
        out
    }
}

/// Area of the parallelogram spanned by `a` and `b`, valid in any dimension.
pub fn wedge_norm(a: &AmbientVector, b: &AmbientVector) -> f64 {
    let aa = a.norm_sq();
    let bb = b.norm_sq();
    let ab = a.dot(b);
    (aa * bb - ab * ab).max(0.0).sqrt()
}

impl From<Vec<f64>> for AmbientVector {
    fn from(v: Vec<f64>) -> Self {
        AmbientVector(SmallVec::from_vec(v))
    }
}

impl<const N: usize> From<[f64; N]> for AmbientVector {
    fn from(v: [f64; N]) -> Self {
        AmbientVector::new(&v)
    }
}

impl Index<usize> for AmbientVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for AmbientVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add<&AmbientVector> for &AmbientVector {
    type Output = AmbientVector;
    fn add(self, rhs: &AmbientVector) -> AmbientVector {
        AmbientVector(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&AmbientVector> for &AmbientVector {
    type Output = AmbientVector;
    fn sub(self, rhs: &AmbientVector) -> AmbientVector {
        AmbientVector(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a - b).collect())
    }
}

impl Add for AmbientVector {
    type Output = AmbientVector;
    fn add(self, rhs: AmbientVector) -> AmbientVector {
        &self + &rhs
    }
}

impl Sub for AmbientVector {
    type Output = AmbientVector;
    fn sub(self, rhs: AmbientVector) -> AmbientVector {
        &self - &rhs
    }
}

impl AddAssign<&AmbientVector> for AmbientVector {
    fn add_assign(&mut self, rhs: &AmbientVector) {
        for (a, b) in self.0.iter_mut().zip(rhs.0.iter()) {
            *a += b;
        }
    }
}

impl SubAssign<&AmbientVector> for AmbientVector {
    fn sub_assign(&mut self, rhs: &AmbientVector) {
        for (a, b) in self.0.iter_mut().zip(rhs.0.iter()) {
            *a -= b;
        }
    }
}

impl Mul<f64> for &AmbientVector {
    type Output = AmbientVector;
    fn mul(self, s: f64) -> AmbientVector {
        self.scaled(s)
    }
}

impl Neg for &AmbientVector {
    type Output = AmbientVector;
    fn neg(self) -> AmbientVector {
        self.scaled(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_of_orthogonal_unit_vectors_is_one() {
        let a = AmbientVector::from([1.0, 0.0, 0.0, 0.0]);
        let b = AmbientVector::from([0.0, 0.0, 0.0, 2.0]);
        assert!((wedge_norm(&a, &b) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn serializes_as_plain_array() {
        let v = AmbientVector::from([1.0, 2.5, -3.0]);
        assert_eq!(serde_json::to_string(&v).unwrap(), "[1.0,2.5,-3.0]");
    }
}
