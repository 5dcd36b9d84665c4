use crate::error::{Error, Result};
use crate::vector::AmbientVector;

/// Orthonormality tolerance for frames handed to public operations.
pub const FRAME_TOLERANCE: f64 = 1e-10;

/// An orthonormal basis of a tangent space, stored as ambient vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentFrame {
    basis: Vec<AmbientVector>,
}

impl TangentFrame {
    /// Wraps `basis`, rejecting it unless pairwise dot products are
    /// within [`FRAME_TOLERANCE`] of the identity.
    pub fn new(basis: Vec<AmbientVector>) -> Result<Self> {
        let frame = TangentFrame { basis };
        let deviation = frame.orthonormality_defect();
        if deviation > FRAME_TOLERANCE {
            return Err(Error::InvalidFrame { deviation });
        }
        Ok(frame)
    }

    /// Wraps `basis` without checking it.
    pub fn new_unchecked(basis: Vec<AmbientVector>) -> Self {
        TangentFrame { basis }
    }

    /// Gram-Schmidt on spanning vectors; `None` if they are dependent.
    pub fn from_spanning(vectors: &[AmbientVector]) -> Option<Self> {
        let mut basis: Vec<AmbientVector> = Vec::with_capacity(vectors.len());
        for v in vectors {
            let mut w = v.clone();
            // two passes keep the result orthonormal to rounding
            for _ in 0..2 {
                for b in &basis {
                    let c = w.dot(b);
                    w = w.add_scaled(-c, b);
                }
            }
            let n = w.norm();
            if !(n > 1e-14 * v.norm()) {
                return None;
            }
            basis.push(w.scaled(1.0 / n));
        }
        Some(TangentFrame { basis })
    }

    pub fn basis(&self) -> &[AmbientVector] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.dot(b) - target).abs());
            }
        }
        worst
    }

    /// Orthogonal projection of `v` onto the span of the frame.
    pub fn project(&self, v: &AmbientVector) -> AmbientVector {
        let mut out = AmbientVector::zeros(v.dim());
        for b in &self.basis {
            out = out.add_scaled(v.dot(b), b);
        }
        out
    }

    /// Squared norm of the tangential part of `v`.
    pub fn tangential_norm_sq(&self, v: &AmbientVector) -> f64 {
        self.basis.iter().map(|b| v.dot(b).powi(2)).sum()
    }
}

/// Splits `x_a = point - a` into its tangential and normal parts with
/// respect to `frame`.
pub fn decompose_radial(
    point: &AmbientVector,
    frame: &TangentFrame,
    a: &AmbientVector,
) -> Result<(AmbientVector, AmbientVector)> {
    let deviation = frame.orthonormality_defect();
    if deviation > FRAME_TOLERANCE {
        return Err(Error::InvalidFrame { deviation });
    }
    if point.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: point.dim(), got: a.dim() });
    }
    let xa = point - a;
    let tangential = frame.project(&xa);
    let normal = &xa - &tangential;
    Ok((tangential, normal))
}

/// Tangential and normal squared lengths of `x - a`; the normal part is
/// computed as the residual so the pair always sums to `|x - a|^2`.
pub(crate) fn radial_split_sq(point: &AmbientVector, frame: &TangentFrame, a: &AmbientVector) -> (f64, f64, f64) {
    let xa = point - a;
    let r2 = xa.norm_sq();
    let t2 = frame.tangential_norm_sq(&xa).min(r2);
    let n2 = {
        let tangential = frame.project(&xa);
        (&xa - &tangential).norm_sq()
    };
    (r2, t2, n2)
}
