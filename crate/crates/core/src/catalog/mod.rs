//! Generators for the test surfaces and the Weierstrass integrator.

pub mod charts;
pub mod minimality;
pub mod rational;
pub mod weierstrass;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::chart::ImmersionChart;
use crate::geom::mesh::{mesh_from_chart, SimplicialSurface};
use crate::geom::surface::Surface;
use crate::vector::AmbientVector;

pub use minimality::{interior_grid, verify_minimality, MinimalityReport};
pub use rational::Rational;
pub use weierstrass::{check_periods, weierstrass_immerse, Contour, WeierstrassData, WeierstrassDomain};

/// Names accepted by [`build_surface`], in listing order.
pub const SURFACE_NAMES: [&str; 6] = ["plane", "catenoid", "helicoid", "enneper", "sphere", "complex_parabola_r4"];

/// A named generator with numeric parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl SurfaceSpec {
    pub fn new(name: &str) -> Self {
        SurfaceSpec { name: name.to_string(), params: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    fn get(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.get(key, default);
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidArgument(format!("surface.params.{key} must be positive, got {v}")));
        }
        Ok(v)
    }

    fn count(&self, key: &str, default: usize) -> Result<usize> {
        let v = self.get(key, default as f64);
        if !(v >= 2.0) || v.fract() != 0.0 || v > 1e6 {
            return Err(Error::InvalidArgument(format!("surface.params.{key} must be an integer >= 2, got {v}")));
        }
        Ok(v as usize)
    }
}

/// A built catalog surface: exact chart, its mesh, and metadata.
#[derive(Clone, Debug)]
pub struct CatalogSurface {
    pub spec: SurfaceSpec,
    pub chart: ImmersionChart,
    pub mesh: SimplicialSurface,
    pub minimal: bool,
    /// A base point off the surface used when none is configured.
    pub default_base_point: AmbientVector,
}

impl CatalogSurface {
    pub fn surface(&self) -> Surface<'_> {
        Surface { mesh: &self.mesh, chart: Some(&self.chart) }
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }
}

/// Where a catalog target value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSource {
    /// A value stated in the literature.
    Published,
    /// Worked out here from the closed form only.
    Derived,
    None,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamInfo {
    pub name: &'static str,
    pub default: Option<f64>,
    pub description: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub ambient_dim: usize,
    pub minimal: bool,
    pub params: Vec<ParamInfo>,
    pub target_v: Option<f64>,
    pub target_q: Option<f64>,
    pub target_ends: Option<usize>,
    pub target_source: TargetSource,
    pub note: &'static str,
}

const fn param(name: &'static str, default: Option<f64>, description: &'static str) -> ParamInfo {
    ParamInfo { name, default, description }
}

/// Parameter schemas and known target values, in stable order.
pub fn catalog_entries() -> Vec<CatalogEntry> {
    let r_max = |d: f64| param("R_max", Some(d), "truncation radius about the origin");
    let res = |d: f64| param("resolution", Some(d), "grid cells per parameter direction");
    vec![
        CatalogEntry {
            name: "plane",
            ambient_dim: 3,
            minimal: true,
            params: vec![
                param("h", Some(1.0), "height of the plane z = h"),
                r_max(200.0),
                res(96.0),
                param("grading", Some(1.0), "length scale of the sinh-graded grid"),
                param("inner_radius", None, "if set, an annulus in polar coordinates"),
            ],
            target_v: Some(2.0 * PI),
            target_q: Some(PI),
            target_ends: Some(1),
            target_source: TargetSource::Derived,
            note: "Q = pi for h != 0 and base point at the origin; 0 when h = 0",
        },
        CatalogEntry {
            name: "catenoid",
            ambient_dim: 3,
            minimal: true,
            params: vec![
                param("c", Some(1.0), "neck radius"),
                r_max(200.0),
                param("nu", Some(121.0), "grid points along the axis"),
                param("nv", Some(64.0), "grid points around the axis"),
                param("u_min", None, "if set, cut the lower end at height u_min"),
            ],
            target_v: Some(4.0 * PI),
            target_q: Some(2.0 * PI),
            target_ends: Some(2),
            target_source: TargetSource::Published,
            note: "two embedded ends",
        },
        CatalogEntry {
            name: "helicoid",
            ambient_dim: 3,
            minimal: true,
            params: vec![
                param("b", Some(1.0), "pitch: x = (s cos v, s sin v, b v)"),
                r_max(30.0),
                param("nu", Some(121.0), "grid points along s"),
                param("nv", Some(241.0), "grid points along v"),
            ],
            target_v: None,
            target_q: None,
            target_ends: Some(1),
            target_source: TargetSource::Derived,
            note: "derived only; cubic area growth, projective volume diverges",
        },
        CatalogEntry {
            name: "enneper",
            ambient_dim: 3,
            minimal: true,
            params: vec![r_max(200.0), res(96.0), param("grading", Some(1.0), "length scale of the graded grid")],
            target_v: Some(2.0 * PI),
            target_q: Some(PI),
            target_ends: Some(1),
            target_source: TargetSource::Published,
            note: "target 2 pi l with l = 1 assumes an embedded end; the single end winds three times, so the computed values are 6 pi and 3 pi",
        },
        CatalogEntry {
            name: "sphere",
            ambient_dim: 3,
            minimal: false,
            params: vec![param("r", Some(1.0), "radius"), res(48.0)],
            target_v: None,
            target_q: None,
            target_ends: Some(0),
            target_source: TargetSource::None,
            note: "non-minimal control",
        },
        CatalogEntry {
            name: "complex_parabola_r4",
            ambient_dim: 4,
            minimal: true,
            params: vec![r_max(200.0), res(96.0), param("grading", Some(1.0), "length scale of the graded grid")],
            target_v: Some(4.0 * PI),
            target_q: None,
            target_ends: Some(1),
            target_source: TargetSource::Derived,
            note: "degree-two complex curve: one end of multiplicity two",
        },
    ]
}

/// Smallest `|x|` over the listed sides of a chart grid (`0`: `u = u0`,
/// `1`: `u = u1`, `2`: `v = v0`, `3`: `v = v1`).
fn side_min(mesh: &SimplicialSurface, nu: usize, cols: usize, sides: &[usize]) -> f64 {
    let vs = mesh.vertices();
    let mut best = f64::INFINITY;
    for &side in sides {
        let idx: Vec<usize> = match side {
            0 => (0..cols).collect(),
            1 => (0..cols).map(|j| (nu - 1) * cols + j).collect(),
            2 => (0..nu).map(|i| i * cols).collect(),
            _ => (0..nu).map(|i| i * cols + cols - 1).collect(),
        };
        for i in idx {
            best = best.min(vs[i].norm());
        }
    }
    best
}

fn square_surface(spec: &SurfaceSpec, chart: ImmersionChart, n: usize, base: AmbientVector) -> Result<CatalogSurface> {
    let mut mesh = mesh_from_chart(&chart, (n + 1, n + 1))?;
    let r = side_min(&mesh, n + 1, n + 1, &[0, 1, 2, 3]);
    mesh.set_truncation_radius(Some(r));
    Ok(CatalogSurface { spec: spec.clone(), chart, mesh, minimal: true, default_base_point: base })
}

/// Builds the chart and mesh for a catalog surface.
pub fn build_surface(spec: &SurfaceSpec) -> Result<CatalogSurface> {
    match spec.name.as_str() {
        "plane" => {
            let h = spec.get("h", 1.0);
            if !h.is_finite() {
                return Err(Error::InvalidArgument("surface.params.h must be finite".into()));
            }
            let r_max = spec.positive("R_max", 200.0)?;
            let n = spec.count("resolution", 96)?;
            let origin = AmbientVector::zeros(3);
            if let Some(&inner) = spec.params.get("inner_radius") {
                if !(inner > 0.0 && inner < r_max) {
                    return Err(Error::InvalidArgument("surface.params.inner_radius must lie in (0, R_max)".into()));
                }
                let chart = charts::plane_annulus(h, inner, r_max);
                let mesh = mesh_from_chart(&chart, (n + 1, 4 * n))?;
                let mut mesh = mesh;
                mesh.set_truncation_radius(Some(r_max.hypot(h)));
                return Ok(CatalogSurface { spec: spec.clone(), chart, mesh, minimal: true, default_base_point: origin });
            }
            if r_max <= h.abs() {
                return Err(Error::InvalidArgument("surface.params.R_max must exceed |h|".into()));
            }
            let k = spec.positive("grading", 1.0)?;
            let half = ((r_max * r_max - h * h).sqrt() / k).asinh();
            square_surface(spec, charts::plane(h, k, half), n, origin)
        }
        "catenoid" => {
            let c = spec.positive("c", 1.0)?;
            let r_max = spec.positive("R_max", 200.0)?;
            let nu = spec.count("nu", 121)?;
            let nv = spec.count("nv", 64)?;
            if r_max <= c {
                return Err(Error::InvalidArgument("surface.params.R_max must exceed c".into()));
            }
            let top = charts::catenoid_height(c, r_max);
            let bottom = spec.params.get("u_min").copied().unwrap_or(-top);
            if !(bottom > -top && bottom < top) && spec.params.contains_key("u_min") {
                return Err(Error::InvalidArgument("surface.params.u_min must lie inside the truncated catenoid".into()));
            }
            let chart = charts::catenoid(c, bottom, top);
            let mut mesh = mesh_from_chart(&chart, (nu, nv))?;
            let sides: &[usize] = if spec.params.contains_key("u_min") { &[1] } else { &[0, 1] };
            let r = side_min(&mesh, nu, nv, sides);
            mesh.set_truncation_radius(Some(r));
            Ok(CatalogSurface { spec: spec.clone(), chart, mesh, minimal: true, default_base_point: AmbientVector::zeros(3) })
        }
        "helicoid" => {
            let b = spec.positive("b", 1.0)?;
            let r_max = spec.positive("R_max", 30.0)?;
            let nu = spec.count("nu", 121)?;
            let nv = spec.count("nv", 241)?;
            let chart = charts::helicoid(b, r_max);
            let mut mesh = mesh_from_chart(&chart, (nu, nv))?;
            let r = side_min(&mesh, nu, nv, &[0, 1, 2, 3]);
            mesh.set_truncation_radius(Some(r));
            Ok(CatalogSurface {
                spec: spec.clone(),
                chart,
                mesh,
                minimal: true,
                default_base_point: AmbientVector::from([0.5, 0.5, 0.0]),
            })
        }
        "enneper" => {
            let r_max = spec.positive("R_max", 200.0)?;
            let n = spec.count("resolution", 96)?;
            let k = spec.positive("grading", 1.0)?;
            let half = charts::fit_square(|s| charts::enneper(k, s), r_max);
            square_surface(spec, charts::enneper(k, half), n, AmbientVector::from([0.0, 0.0, 1.0]))
        }
        "complex_parabola_r4" => {
            let r_max = spec.positive("R_max", 200.0)?;
            let n = spec.count("resolution", 96)?;
            let k = spec.positive("grading", 1.0)?;
            let half = charts::fit_square(|s| charts::complex_parabola(k, s), r_max);
            square_surface(spec, charts::complex_parabola(k, half), n, AmbientVector::from([0.0, 0.0, 0.0, 1.0]))
        }
        "sphere" => {
            let r = spec.positive("r", 1.0)?;
            let n = spec.count("resolution", 48)?;
            let (chart, mesh) = sphere_mesh(r, n)?;
            Ok(CatalogSurface {
                spec: spec.clone(),
                chart,
                mesh,
                minimal: false,
                default_base_point: AmbientVector::from([0.0, 0.0, 0.5 * r]),
            })
        }
        other => Err(Error::UnknownSurface(other.to_string())),
    }
}

/// Closed sphere: a chart-backed latitude band plus flat fans at the poles.
fn sphere_mesh(r: f64, rows: usize) -> Result<(ImmersionChart, SimplicialSurface)> {
    let dtheta = PI / (rows + 1) as f64;
    let chart = charts::sphere_band(r, 0.5 * PI - dtheta);
    let cols = 2 * rows;
    let band = mesh_from_chart(&chart, (rows, cols))?;
    let mut vertices = band.vertices().to_vec();
    let mut triangles = band.triangles().to_vec();
    let mut params: Vec<_> = (0..triangles.len()).map(|t| band.corner_params(t).copied()).collect();
    let south = vertices.len();
    vertices.push(AmbientVector::from([0.0, 0.0, -r]));
    let north = vertices.len();
    vertices.push(AmbientVector::from([0.0, 0.0, r]));
    for j in 0..cols {
        let j1 = (j + 1) % cols;
        triangles.push([south, j1, j]);
        params.push(None);
        let top = (rows - 1) * cols;
        triangles.push([north, top + j, top + j1]);
        params.push(None);
    }
    let mesh = SimplicialSurface::with_params(3, vertices, triangles, Vec::new(), None, params)?;
    Ok((chart, mesh))
}
