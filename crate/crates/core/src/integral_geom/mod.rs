//! Radial projection, Grassmannian sampling, plane counting, and the
//! Crofton-Federer checks.

mod bounds;
mod counting;
mod crofton;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::frame::{decompose_radial, TangentFrame};
use crate::vector::AmbientVector;

pub use bounds::{
    check_corollary3, check_lemma2, corollary3_constant, corollary4_check, projected_measure, Corollary3Check,
    Corollary4Report, Lemma2Check,
};
pub use counting::{counting_average, counting_sweep, plane_mesh_intersections, CountingEstimate, CountingIndex, Intersections};
pub use crofton::{crofton_verify, spherical_area, spherical_set, CroftonResult, SphericalSet};

/// Orthonormality tolerance of a plane frame.
pub const PLANE_FRAME_TOLERANCE: f64 = 1e-12;

/// `|x_a^perp| / |x_a|^{p+1}`: the area Jacobian of `x -> (x - a)/|x - a|`
/// restricted to the surface.
pub fn radial_jacobian(point: &AmbientVector, frame: &TangentFrame, a: &AmbientVector) -> Result<f64> {
    let (_, normal) = decompose_radial(point, frame, a)?;
    let r = point.distance(a);
    if r == 0.0 {
        return Err(Error::Precondition("radial Jacobian is undefined at the base point".into()));
    }
    Ok(normal.norm() / r.powi(frame.dim() as i32 + 1))
}

/// An affine plane `base + span(frame)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlaneThrough {
    pub base: AmbientVector,
    pub frame: Vec<AmbientVector>,
}

fn orthonormalize(vectors: &mut [AmbientVector]) -> bool {
    for i in 0..vectors.len() {
        for _ in 0..2 {
            for j in 0..i {
                let c = vectors[i].dot(&vectors[j]);
                vectors[i] = vectors[i].add_scaled(-c, &vectors[j]);
            }
        }
        let n = vectors[i].norm();
        if !(n > 1e-12) {
            return false;
        }
        vectors[i] = vectors[i].scaled(1.0 / n);
    }
    true
}

impl PlaneThrough {
    pub fn new(base: AmbientVector, frame: Vec<AmbientVector>) -> Result<Self> {
        let n = base.dim();
        if frame.is_empty() || frame.len() >= n {
            return Err(Error::InvalidArgument(format!("plane dimension {} must lie in 1..{n}", frame.len())));
        }
        for v in &frame {
            if v.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.dim() });
            }
        }
        let mut deviation = 0.0f64;
        for (i, u) in frame.iter().enumerate() {
            for (j, v) in frame.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                deviation = deviation.max((u.dot(v) - target).abs());
            }
        }
        if deviation > PLANE_FRAME_TOLERANCE {
            return Err(Error::InvalidFrame { deviation });
        }
        Ok(PlaneThrough { base, frame })
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.dim()
    }

    /// Orthonormal basis of the orthogonal complement of the direction.
    pub fn complement(&self) -> Vec<AmbientVector> {
        let n = self.ambient_dim();
        let mut out: Vec<AmbientVector> = Vec::with_capacity(n - self.frame.len());
        // add standard basis vectors in order of how far they stick out
        let mut candidates: Vec<(f64, usize)> = (0..n)
            .map(|i| {
                let e = AmbientVector::basis(n, i);
                let along: f64 = self.frame.iter().map(|f| f.dot(&e).powi(2)).sum();
                (along, i)
            })
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (_, i) in candidates {
            if out.len() + self.frame.len() == n {
                break;
            }
            let mut v = AmbientVector::basis(n, i);
            for _ in 0..2 {
                for f in self.frame.iter().chain(out.iter()) {
                    v = v.add_scaled(-v.dot(f), f);
                }
            }
            let norm = v.norm();
            if norm > 1e-6 {
                out.push(v.scaled(1.0 / norm));
            }
        }
        out
    }

    /// The plane with its direction frame nudged by `scale` Gaussian noise
    /// and re-orthonormalized; the base point is kept.
    pub fn jittered<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> PlaneThrough {
        loop {
            let mut frame: Vec<AmbientVector> = self
                .frame
                .iter()
                .map(|f| {
                    let noise: Vec<f64> = (0..f.dim()).map(|_| rng.sample::<f64, _>(StandardNormal) * scale).collect();
                    f + &AmbientVector::from(noise)
                })
                .collect();
            if orthonormalize(&mut frame) {
                return PlaneThrough { base: self.base.clone(), frame };
            }
        }
    }
}

/// Haar-random `(n - p)`-plane through `b`: orthonormalized columns of a
/// standard Gaussian `n x (n - p)` matrix.
pub fn sample_grassmann<R: Rng + ?Sized>(n: usize, p: usize, b: &AmbientVector, rng: &mut R) -> Result<PlaneThrough> {
    if p == 0 || p >= n {
        return Err(Error::InvalidArgument(format!("need 1 <= n - p <= n - 1, got n = {n}, p = {p}")));
    }
    if b.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.dim() });
    }
    loop {
        let mut frame: Vec<AmbientVector> = (0..n - p)
            .map(|_| AmbientVector::from((0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect::<Vec<_>>()))
            .collect();
        // rank deficiency has probability zero; resample if it happens
        if orthonormalize(&mut frame) {
            return Ok(PlaneThrough { base: b.clone(), frame });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sphere_jacobian_is_inverse_square() {
        let r = 2.5;
        let p = AmbientVector::from([0.0, 0.0, r]);
        let frame = TangentFrame::new(vec![[1.0, 0.0, 0.0].into(), [0.0, 1.0, 0.0].into()]).unwrap();
        let j = radial_jacobian(&p, &frame, &AmbientVector::zeros(3)).unwrap();
        assert!((j - 1.0 / (r * r)).abs() < 1e-15);
    }

    #[test]
    fn plane_jacobian_vanishes() {
        let frame = TangentFrame::new(vec![[1.0, 0.0, 0.0].into(), [0.0, 1.0, 0.0].into()]).unwrap();
        let j = radial_jacobian(&AmbientVector::from([3.0, -1.0, 0.0]), &frame, &AmbientVector::zeros(3)).unwrap();
        assert_eq!(j, 0.0);
    }

    #[test]
    fn four_dimensional_frames_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let plane = sample_grassmann(4, 2, &AmbientVector::zeros(4), &mut rng).unwrap();
            assert!(PlaneThrough::new(plane.base.clone(), plane.frame.clone()).is_ok());
            let comp = plane.complement();
            assert_eq!(comp.len(), 2);
            for c in &comp {
                for f in &plane.frame {
                    assert!(c.dot(f).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_full_dimensional_planes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_grassmann(3, 0, &AmbientVector::zeros(3), &mut rng).is_err());
        assert!(sample_grassmann(3, 3, &AmbientVector::zeros(3), &mut rng).is_err());
    }
}
