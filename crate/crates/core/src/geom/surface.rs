use crate::error::{Error, Result};
use crate::geom::chart::ImmersionChart;
use crate::geom::frame::TangentFrame;
use crate::geom::mesh::SimplicialSurface;
use crate::vector::{wedge_norm, AmbientVector};

/// Evaluation view over a mesh. Triangles carrying chart coordinates are
/// evaluated through the chart; the rest are flat.
#[derive(Clone, Copy, Debug)]
pub struct Surface<'a> {
    pub mesh: &'a SimplicialSurface,
    pub chart: Option<&'a ImmersionChart>,
}

/// A point on a triangle together with the derivatives of the position
/// with respect to the barycentric coordinates `(l1, l2)`.
#[derive(Clone, Debug)]
pub struct SurfacePoint {
    pub position: AmbientVector,
    pub d1: AmbientVector,
    pub d2: AmbientVector,
}

impl SurfacePoint {
    /// Area element relative to the reference triangle in `(l1, l2)`.
    pub fn area_density(&self) -> f64 {
        wedge_norm(&self.d1, &self.d2)
    }

    pub fn frame(&self) -> TangentFrame {
        TangentFrame::from_spanning(&[self.d1.clone(), self.d2.clone()])
            .expect("nondegenerate surface point")
    }

    /// Tangent vector for a barycentric velocity `(dl1, dl2)`.
    pub fn velocity(&self, dl1: f64, dl2: f64) -> AmbientVector {
        self.d1.scaled(dl1).add_scaled(dl2, &self.d2)
    }
}

impl<'a> Surface<'a> {
    pub fn flat(mesh: &'a SimplicialSurface) -> Self {
        Surface { mesh, chart: None }
    }

    pub fn curved(mesh: &'a SimplicialSurface, chart: &'a ImmersionChart) -> Result<Self> {
        if chart.ambient_dim != mesh.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: mesh.ambient_dim(), got: chart.ambient_dim });
        }
        Ok(Surface { mesh, chart: Some(chart) })
    }

    pub fn ambient_dim(&self) -> usize {
        self.mesh.ambient_dim()
    }

    pub fn triangle_count(&self) -> usize {
        self.mesh.triangles().len()
    }

    pub fn sample(&self, t: usize, bary: [f64; 3]) -> SurfacePoint {
        if let (Some(chart), Some(p)) = (self.chart, self.mesh.corner_params(t)) {
            let u = bary[0] * p[0][0] + bary[1] * p[1][0] + bary[2] * p[2][0];
            let v = bary[0] * p[0][1] + bary[1] * p[1][1] + bary[2] * p[2][1];
            let position = chart.eval(u, v);
            let (xu, xv) = chart.deriv(u, v);
            let d1 = xu.scaled(p[1][0] - p[0][0]).add_scaled(p[1][1] - p[0][1], &xv);
            let d2 = xu.scaled(p[2][0] - p[0][0]).add_scaled(p[2][1] - p[0][1], &xv);
            SurfacePoint { position, d1, d2 }
        } else {
            let [a, b, c] = self.mesh.triangles()[t];
            let vs = self.mesh.vertices();
            let position = AmbientVector::combination(&bary, &[&vs[a], &vs[b], &vs[c]]);
            SurfacePoint { position, d1: &vs[b] - &vs[a], d2: &vs[c] - &vs[a] }
        }
    }

    /// Position only; cheaper than [`Surface::sample`] for flat triangles.
    pub fn position(&self, t: usize, bary: [f64; 3]) -> AmbientVector {
        if let (Some(chart), Some(p)) = (self.chart, self.mesh.corner_params(t)) {
            let u = bary[0] * p[0][0] + bary[1] * p[1][0] + bary[2] * p[2][0];
            let v = bary[0] * p[0][1] + bary[1] * p[1][1] + bary[2] * p[2][1];
            chart.eval(u, v)
        } else {
            let [a, b, c] = self.mesh.triangles()[t];
            let vs = self.mesh.vertices();
            AmbientVector::combination(&bary, &[&vs[a], &vs[b], &vs[c]])
        }
    }

    /// Distance from `a` to the nearest sampled surface point (vertices and
    /// quadrature nodes).
    pub fn sampled_distance(&self, a: &AmbientVector) -> f64 {
        let mut best = self.mesh.vertices().iter().map(|v| v.distance(a)).fold(f64::INFINITY, f64::min);
        for t in 0..self.triangle_count() {
            for (l, _) in crate::numeric::TRIANGLE_RULE.iter() {
                best = best.min(self.position(t, *l).distance(a));
            }
        }
        best
    }
}
