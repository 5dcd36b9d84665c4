use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::chart::ImmersionChart;
use crate::geom::motion::RigidMotion;
use crate::vector::{wedge_norm, AmbientVector};

/// Smallest admissible flat triangle area.
pub const MIN_TRIANGLE_AREA: f64 = 1e-14;

/// Parameter coordinates of the three corners of a chart-backed triangle.
pub type CornerParams = [[f64; 2]; 3];

/// Undirected edge key with sorted endpoints.
pub fn edge_key(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

/// A triangulated 2-surface immersed in R^n.
///
/// Local edge `k` of a triangle joins corners `k` and `(k + 1) % 3`.
#[derive(Clone, Debug)]
pub struct SimplicialSurface {
    ambient_dim: usize,
    vertices: Vec<AmbientVector>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<[usize; 2]>,
    truncation_radius: Option<f64>,
    corner_params: Vec<Option<CornerParams>>,
    neighbors: Vec<[Option<usize>; 3]>,
}

/// On-disk mesh exchange record. Field order is the serialized order.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MeshFile {
    pub ambient_dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<[usize; 2]>,
    pub truncation_radius: Option<f64>,
}

impl SimplicialSurface {
    pub fn new(
        ambient_dim: usize,
        vertices: Vec<AmbientVector>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<[usize; 2]>,
        truncation_radius: Option<f64>,
    ) -> Result<Self> {
        Self::with_params(ambient_dim, vertices, triangles, boundary_edges, truncation_radius, Vec::new())
    }

    /// Like [`SimplicialSurface::new`] but with per-triangle chart
    /// coordinates; `corner_params` is empty or has one entry per triangle.
    pub fn with_params(
        ambient_dim: usize,
        vertices: Vec<AmbientVector>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<[usize; 2]>,
        truncation_radius: Option<f64>,
        corner_params: Vec<Option<CornerParams>>,
    ) -> Result<Self> {
        if ambient_dim < 2 {
            return Err(Error::InvalidMesh(format!("ambient dimension {ambient_dim} < 2")));
        }
        if !corner_params.is_empty() && corner_params.len() != triangles.len() {
            return Err(Error::InvalidMesh("corner_params length differs from triangle count".into()));
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.dim() != ambient_dim {
                return Err(Error::DimensionMismatch { expected: ambient_dim, got: v.dim() });
            }
            if !v.is_finite() {
                return Err(Error::InvalidMesh(format!("vertex {i} has non-finite coordinates")));
            }
        }
        if let Some(r) = truncation_radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidMesh(format!("truncation radius {r} must be positive")));
            }
        }
        let mut edge_owners: HashMap<[usize; 2], Vec<(usize, usize)>> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= vertices.len()) {
                return Err(Error::InvalidMesh(format!("triangle {t} references a missing vertex")));
            }
            let area = 0.5
                * wedge_norm(&(&vertices[tri[1]] - &vertices[tri[0]]), &(&vertices[tri[2]] - &vertices[tri[0]]));
            if !(area > MIN_TRIANGLE_AREA) {
                return Err(Error::InvalidMesh(format!("triangle {t} is degenerate (area {area:e})")));
            }
            for k in 0..3 {
                edge_owners.entry(edge_key(tri[k], tri[(k + 1) % 3])).or_default().push((t, k));
            }
        }
        let mut boundary_set = std::collections::HashSet::new();
        for e in &boundary_edges {
            let key = edge_key(e[0], e[1]);
            match edge_owners.get(&key).map(Vec::len) {
                Some(1) => {}
                _ => return Err(Error::UnorientedBoundary(e[0], e[1])),
            }
            boundary_set.insert(key);
        }
        let mut neighbors = vec![[None; 3]; triangles.len()];
        for (key, owners) in &edge_owners {
            match owners.as_slice() {
                [(t0, k0), (t1, k1)] => {
                    neighbors[*t0][*k0] = Some(*t1);
                    neighbors[*t1][*k1] = Some(*t0);
                }
                [_] if boundary_set.contains(key) => {}
                [_] => {
                    return Err(Error::InvalidMesh(format!(
                        "edge ({}, {}) has one triangle but is not marked as boundary",
                        key[0], key[1]
                    )))
                }
                _ => {
                    return Err(Error::InvalidMesh(format!(
                        "edge ({}, {}) is shared by {} triangles",
                        key[0],
                        key[1],
                        owners.len()
                    )))
                }
            }
        }
        Ok(SimplicialSurface {
            ambient_dim,
            vertices,
            triangles,
            boundary_edges,
            truncation_radius,
            corner_params,
            neighbors,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn intrinsic_dim(&self) -> usize {
        2
    }

    pub fn vertices(&self) -> &[AmbientVector] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[[usize; 2]] {
        &self.boundary_edges
    }

    pub fn truncation_radius(&self) -> Option<f64> {
        self.truncation_radius
    }

    pub fn set_truncation_radius(&mut self, r: Option<f64>) {
        self.truncation_radius = r;
    }

    pub fn corner_params(&self, t: usize) -> Option<&CornerParams> {
        self.corner_params.get(t).and_then(Option::as_ref)
    }

    pub fn has_params(&self) -> bool {
        self.corner_params.iter().any(Option::is_some)
    }

    /// Triangle across local edge `k` of triangle `t`.
    pub fn neighbor(&self, t: usize, k: usize) -> Option<usize> {
        self.neighbors[t][k]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        0.5 * wedge_norm(&(&self.vertices[b] - &self.vertices[a]), &(&self.vertices[c] - &self.vertices[a]))
    }

    /// Total flat area of the triangulation.
    pub fn flat_area(&self) -> f64 {
        let areas: Vec<f64> = (0..self.triangles.len()).map(|t| self.triangle_area(t)).collect();
        crate::numeric::pairwise_sum(&areas)
    }

    /// Boundary edges lying on the truncation sphere (about the origin).
    pub fn is_truncation_edge(&self, e: &[usize; 2]) -> bool {
        match self.truncation_radius {
            None => false,
            Some(r) => e.iter().all(|&i| self.vertices[i].norm() >= r * (1.0 - 1e-9)),
        }
    }

    /// Boundary edges that are part of the surface's own compact boundary
    /// rather than artifacts of truncation.
    pub fn inner_boundary_edges(&self) -> Vec<[usize; 2]> {
        self.boundary_edges.iter().copied().filter(|e| !self.is_truncation_edge(e)).collect()
    }

    /// The triangle owning boundary edge `e` and its local edge index.
    pub fn boundary_owner(&self, e: &[usize; 2]) -> Result<(usize, usize)> {
        let key = edge_key(e[0], e[1]);
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                if edge_key(tri[k], tri[(k + 1) % 3]) == key {
                    if self.neighbors[t][k].is_some() {
                        return Err(Error::UnorientedBoundary(e[0], e[1]));
                    }
                    return Ok((t, k));
                }
            }
        }
        Err(Error::UnorientedBoundary(e[0], e[1]))
    }

    /// Applies a similarity transform to every vertex; the truncation radius
    /// scales with it.
    pub fn transformed(&self, motion: &RigidMotion) -> SimplicialSurface {
        let mut out = self.clone();
        out.vertices = self.vertices.iter().map(|v| motion.apply_point(v)).collect();
        out.truncation_radius = self.truncation_radius.map(|r| r * motion.scale);
        out
    }

    pub fn to_file(&self) -> MeshFile {
        MeshFile {
            ambient_dim: self.ambient_dim,
            vertices: self.vertices.iter().map(|v| v.as_slice().to_vec()).collect(),
            triangles: self.triangles.clone(),
            boundary_edges: self.boundary_edges.clone(),
            truncation_radius: self.truncation_radius,
        }
    }

    pub fn from_file(file: MeshFile) -> Result<Self> {
        let vertices = file.vertices.into_iter().map(AmbientVector::from).collect();
        Self::new(file.ambient_dim, vertices, file.triangles, file.boundary_edges, file.truncation_radius)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("mesh serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MeshFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidMesh(format!("mesh JSON: {e}")))?;
        Self::from_file(file)
    }
}

/// Samples `chart` on an `nu x nv` grid and splits each cell into two
/// triangles. Periodic domains wrap in `v` and get no seam boundary.
pub fn mesh_from_chart(chart: &ImmersionChart, resolution: (usize, usize)) -> Result<SimplicialSurface> {
    let (nu, nv) = resolution;
    if nu < 2 || nv < 2 {
        return Err(Error::InvalidArgument(format!("resolution ({nu}, {nv}) must be at least (2, 2)")));
    }
    let d = chart.domain;
    let periodic = d.periodic_v;
    if periodic && nv < 3 {
        return Err(Error::InvalidArgument("periodic charts need nv >= 3".into()));
    }
    let us: Vec<f64> = crate::numeric::linspace(d.u0, d.u1, nu);
    let vs: Vec<f64> = if periodic {
        (0..=nv).map(|j| d.v0 + (d.v1 - d.v0) * j as f64 / nv as f64).collect()
    } else {
        crate::numeric::linspace(d.v0, d.v1, nv)
    };
    let cols = nv; // distinct vertex columns
    for (i, &u) in us.iter().enumerate() {
        for (j, &v) in vs.iter().enumerate().take(cols) {
            let interior_u = i > 0 && i + 1 < nu;
            let interior_v = periodic || (j > 0 && j + 1 < nv);
            if interior_u && interior_v {
                chart.check_regular(u, v)?;
            }
        }
    }
    let index = |i: usize, j: usize| i * cols + (j % cols);
    let mut vertices = Vec::with_capacity(nu * cols);
    for &u in &us {
        for &v in vs.iter().take(cols) {
            vertices.push(chart.eval(u, v));
        }
    }
    let cell_cols = if periodic { nv } else { nv - 1 };
    let mut triangles = Vec::with_capacity(2 * (nu - 1) * cell_cols);
    let mut params = Vec::with_capacity(2 * (nu - 1) * cell_cols);
    for i in 0..nu - 1 {
        for j in 0..cell_cols {
            let (a, b, c, dd) = (index(i, j), index(i + 1, j), index(i + 1, j + 1), index(i, j + 1));
            let (pa, pb, pc, pd) =
                ([us[i], vs[j]], [us[i + 1], vs[j]], [us[i + 1], vs[j + 1]], [us[i], vs[j + 1]]);
            triangles.push([a, b, c]);
            params.push(Some([pa, pb, pc]));
            triangles.push([a, c, dd]);
            params.push(Some([pa, pc, pd]));
        }
    }
    let mut boundary_edges = Vec::new();
    for j in 0..cell_cols {
        boundary_edges.push([index(0, j), index(0, j + 1)]);
        boundary_edges.push([index(nu - 1, j), index(nu - 1, j + 1)]);
    }
    if !periodic {
        for i in 0..nu - 1 {
            boundary_edges.push([index(i, 0), index(i + 1, 0)]);
            boundary_edges.push([index(i, nv - 1), index(i + 1, nv - 1)]);
        }
    }
    SimplicialSurface::with_params(chart.ambient_dim, vertices, triangles, boundary_edges, None, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::chart::ParamDomain;
    use std::sync::Arc;

    fn flat_chart(w: f64, h: f64) -> ImmersionChart {
        ImmersionChart::new(
            "flat",
            ParamDomain::rect(0.0, w, 0.0, h),
            3,
            Arc::new(|u, v| [u, v, 0.0].into()),
            Arc::new(|_, _| ([1.0, 0.0, 0.0].into(), [0.0, 1.0, 0.0].into())),
        )
    }

    #[test]
    fn two_by_two_plane_grid() {
        let mesh = mesh_from_chart(&flat_chart(2.0, 3.0), (2, 2)).unwrap();
        assert_eq!(mesh.triangles().len(), 2);
        assert!((mesh.flat_area() - 6.0).abs() < 1e-14);
        assert_eq!(mesh.boundary_edges().len(), 4);
    }

    #[test]
    fn rejects_small_resolution() {
        assert!(mesh_from_chart(&flat_chart(1.0, 1.0), (1, 4)).is_err());
    }

    #[test]
    fn degenerate_chart_reports_parameters() {
        let chart = ImmersionChart::new(
            "collapsed",
            ParamDomain::rect(0.0, 1.0, 0.0, 1.0),
            3,
            Arc::new(|u, v| [u + v, u + v, 0.0].into()),
            Arc::new(|_, _| ([1.0, 1.0, 0.0].into(), [1.0, 1.0, 0.0].into())),
        );
        match mesh_from_chart(&chart, (3, 3)) {
            Err(Error::DegenerateChart { u, v }) => assert_eq!((u, v), (0.5, 0.5)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mesh_json_round_trip_keeps_field_order() {
        let mesh = mesh_from_chart(&flat_chart(1.0, 1.0), (2, 2)).unwrap();
        let text = mesh.to_json();
        let order: Vec<usize> = ["ambient_dim", "vertices", "triangles", "boundary_edges", "truncation_radius"]
            .iter()
            .map(|k| text.find(k).unwrap())
            .collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
        let back = SimplicialSurface::from_json(&text).unwrap();
        assert_eq!(back.to_file(), mesh.to_file());
    }

    #[test]
    fn unmarked_open_edge_is_rejected() {
        let verts = vec![[0.0, 0.0, 0.0].into(), [1.0, 0.0, 0.0].into(), [0.0, 1.0, 0.0].into()];
        let err = SimplicialSurface::new(3, verts, vec![[0, 1, 2]], vec![[0, 1]], None).unwrap_err();
        assert!(matches!(err, Error::InvalidMesh(_)));
    }

    #[test]
    fn interior_edge_marked_boundary_is_unoriented() {
        let verts = vec![
            [0.0, 0.0, 0.0].into(),
            [1.0, 0.0, 0.0].into(),
            [0.0, 1.0, 0.0].into(),
            [1.0, 1.0, 0.0].into(),
        ];
        let tris = vec![[0, 1, 2], [1, 3, 2]];
        let boundary = vec![[0, 1], [1, 3], [3, 2], [2, 0], [1, 2]];
        let err = SimplicialSurface::new(3, verts, tris, boundary, None).unwrap_err();
        assert_eq!(err, Error::UnorientedBoundary(1, 2));
    }
}
