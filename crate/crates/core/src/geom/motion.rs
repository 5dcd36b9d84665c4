use crate::vector::AmbientVector;

/// `x -> scale * R x + translation` with `R` orthogonal.
#[derive(Clone, Debug, PartialEq)]
pub struct RigidMotion {
    pub rotation: Vec<Vec<f64>>,
    pub translation: AmbientVector,
    pub scale: f64,
}

impl RigidMotion {
    pub fn identity(n: usize) -> Self {
        let rotation = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        RigidMotion { rotation, translation: AmbientVector::zeros(n), scale: 1.0 }
    }

    pub fn homothety(n: usize, scale: f64) -> Self {
        RigidMotion { scale, ..Self::identity(n) }
    }

    /// Rotation by `angle` in the coordinate plane `(i, j)` followed by a translation.
    pub fn plane_rotation(n: usize, i: usize, j: usize, angle: f64, translation: AmbientVector) -> Self {
        let mut m = Self::identity(n);
        let (s, c) = angle.sin_cos();
        m.rotation[i][i] = c;
        m.rotation[i][j] = -s;
        m.rotation[j][i] = s;
        m.rotation[j][j] = c;
        m.translation = translation;
        m
    }

    /// `other` applied after `self`.
    pub fn then(&self, other: &RigidMotion) -> RigidMotion {
        let n = self.rotation.len();
        let rotation = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| other.rotation[i][k] * self.rotation[k][j]).sum()).collect())
            .collect();
        RigidMotion {
            rotation,
            translation: other.apply_point(&self.translation),
            scale: self.scale * other.scale,
        }
    }

    pub fn apply_vector(&self, v: &AmbientVector) -> AmbientVector {
        let n = v.dim();
        let mut out = AmbientVector::zeros(n);
        for i in 0..n {
            out[i] = self.scale * (0..n).map(|k| self.rotation[i][k] * v[k]).sum::<f64>();
        }
        out
    }

    pub fn apply_point(&self, p: &AmbientVector) -> AmbientVector {
        &self.apply_vector(p) + &self.translation
    }
}
