//! Crofton-Federer checks on subsets of the unit sphere.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::Serialize;

use super::counting::{sample_planes, CountingIndex};
use crate::error::{Error, Result};
use crate::geom::mesh::SimplicialSurface;
use crate::invariants::omega;
use crate::stats::mean_ci95;
use crate::vector::AmbientVector;

/// Largest allowed `| |v| - 1 |` for a vertex of a spherical set.
pub const SPHERE_TOLERANCE: f64 = 1e-9;

/// Built-in triangulated subsets of the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "alpha")]
pub enum SphericalSet {
    /// All of S^2.
    Sphere,
    /// `z >= 0` in S^2.
    Hemisphere,
    /// Geodesic disc of angular radius `alpha` about the north pole of S^2.
    Cap(f64),
    /// `S^2 x {0}` inside S^3.
    GreatSphere,
    /// `{|z1| = |z2| = 1/sqrt 2}` inside S^3.
    CliffordTorus,
}

impl SphericalSet {
    pub fn ambient_dim(&self) -> usize {
        match self {
            SphericalSet::GreatSphere | SphericalSet::CliffordTorus => 4,
            _ => 3,
        }
    }

    /// Exact area of the smooth set.
    pub fn area(&self) -> f64 {
        match self {
            SphericalSet::Sphere | SphericalSet::GreatSphere => 4.0 * PI,
            SphericalSet::Hemisphere => 2.0 * PI,
            SphericalSet::Cap(alpha) => 2.0 * PI * (1.0 - alpha.cos()),
            SphericalSet::CliffordTorus => 2.0 * PI * PI,
        }
    }
}

impl FromStr for SphericalSet {
    type Err = Error;

    /// `sphere`, `hemisphere`, `cap:<alpha>`, `great_sphere`, `clifford_torus`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere" => Ok(SphericalSet::Sphere),
            "hemisphere" => Ok(SphericalSet::Hemisphere),
            "great_sphere" => Ok(SphericalSet::GreatSphere),
            "clifford_torus" => Ok(SphericalSet::CliffordTorus),
            _ => {
                let alpha = s
                    .strip_prefix("cap:")
                    .and_then(|a| a.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown spherical set `{s}`")))?;
                if !(alpha > 0.0 && alpha <= PI) {
                    return Err(Error::InvalidArgument(format!("cap radius {alpha} outside (0, pi]")));
                }
                Ok(SphericalSet::Cap(alpha))
            }
        }
    }
}

fn on_s2(theta: f64, phi: f64) -> AmbientVector {
    AmbientVector::from([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()])
}

/// Latitude-longitude disc about the north pole out to colatitude
/// `theta_max`, closed off with a south-pole fan when `theta_max = pi`.
fn polar_disc(theta_max: f64, rings: usize, embed: impl Fn(AmbientVector) -> AmbientVector, n: usize) -> Result<SimplicialSurface> {
    let closed = (theta_max - PI).abs() < 1e-15;
    let per_ring = 4 * rings;
    let ring_count = if closed { rings - 1 } else { rings };
    let mut vertices = vec![embed(AmbientVector::from([0.0, 0.0, 1.0]))];
    for i in 1..=ring_count {
        let theta = theta_max * i as f64 / rings as f64;
        for j in 0..per_ring {
            vertices.push(embed(on_s2(theta, 2.0 * PI * j as f64 / per_ring as f64)));
        }
    }
    let idx = |ring: usize, j: usize| 1 + (ring - 1) * per_ring + j % per_ring;
    let mut triangles = Vec::new();
    for j in 0..per_ring {
        triangles.push([0, idx(1, j), idx(1, j + 1)]);
    }
    for ring in 1..ring_count {
        for j in 0..per_ring {
            triangles.push([idx(ring, j), idx(ring + 1, j), idx(ring + 1, j + 1)]);
            triangles.push([idx(ring, j), idx(ring + 1, j + 1), idx(ring, j + 1)]);
        }
    }
    let mut boundary = Vec::new();
    if closed {
        let south = vertices.len();
        vertices.push(embed(AmbientVector::from([0.0, 0.0, -1.0])));
        for j in 0..per_ring {
            triangles.push([idx(ring_count, j), south, idx(ring_count, j + 1)]);
        }
    } else {
        for j in 0..per_ring {
            boundary.push([idx(ring_count, j), idx(ring_count, j + 1)]);
        }
    }
    SimplicialSurface::new(n, vertices, triangles, boundary, None)
}

fn clifford_torus(res: usize) -> Result<SimplicialSurface> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut vertices = Vec::with_capacity(res * res);
    for i in 0..res {
        let a = 2.0 * PI * i as f64 / res as f64;
        for j in 0..res {
            let b = 2.0 * PI * j as f64 / res as f64;
            vertices.push(AmbientVector::from([s * a.cos(), s * a.sin(), s * b.cos(), s * b.sin()]));
        }
    }
    let idx = |i: usize, j: usize| (i % res) * res + j % res;
    let mut triangles = Vec::with_capacity(2 * res * res);
    for i in 0..res {
        for j in 0..res {
            triangles.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            triangles.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    SimplicialSurface::new(4, vertices, triangles, Vec::new(), None)
}

/// Triangulates `set` with vertices exactly on the unit sphere;
/// `resolution` is the number of latitude rings (or torus cells per side).
pub fn spherical_set(set: SphericalSet, resolution: usize) -> Result<SimplicialSurface> {
    if resolution < 3 {
        return Err(Error::InvalidArgument(format!("resolution {resolution} < 3")));
    }
    let id = |v: AmbientVector| v;
    let lift = |v: AmbientVector| AmbientVector::from([v[0], v[1], v[2], 0.0]);
    match set {
        SphericalSet::Sphere => polar_disc(PI, resolution, id, 3),
        SphericalSet::Hemisphere => polar_disc(0.5 * PI, resolution, id, 3),
        SphericalSet::Cap(alpha) => polar_disc(alpha, resolution, id, 3),
        SphericalSet::GreatSphere => polar_disc(PI, resolution, lift, 4),
        SphericalSet::CliffordTorus => clifford_torus(resolution),
    }
}

/// Area of the geodesic triangle with unit-vector corners, in any S^{n-1}.
pub fn spherical_area(a: &AmbientVector, b: &AmbientVector, c: &AmbientVector) -> f64 {
    let (ab, bc, ca) = (a.dot(b), b.dot(c), c.dot(a));
    // Gram determinant of (a, b, c) with unit diagonal
    let gram = 1.0 + 2.0 * ab * bc * ca - ab * ab - bc * bc - ca * ca;
    2.0 * gram.max(0.0).sqrt().atan2(1.0 + ab + bc + ca)
}

/// Both sides of the Crofton-Federer identity on a spherical set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CroftonResult {
    pub n: usize,
    pub p: usize,
    /// `integral of f` over the set (exact on geodesic triangles).
    pub lhs: f64,
    /// `(omega_{p+1} / 2) E[sum of f over the crossings]`.
    pub rhs: f64,
    pub ci95: f64,
    pub samples: usize,
    pub jittered: usize,
    pub pass: bool,
}

/// Checks the identity for per-triangle weights `f` (all ones if `None`).
/// The set must be a 2-dimensional triangulation with unit-length vertices.
pub fn crofton_verify(
    set: &SimplicialSurface,
    p: usize,
    weights: Option<&[f64]>,
    samples: usize,
    seed: u64,
) -> Result<CroftonResult> {
    let n = set.ambient_dim();
    if p != set.intrinsic_dim() {
        return Err(Error::DimensionMismatch { expected: set.intrinsic_dim(), got: p });
    }
    if p >= n {
        return Err(Error::InvalidArgument(format!("set dimension {p} must be below ambient dimension {n}")));
    }
    if let Some(bad) = set.vertices().iter().map(|v| (v.norm() - 1.0).abs()).find(|d| *d > SPHERE_TOLERANCE) {
        return Err(Error::InvalidArgument(format!("vertex off the unit sphere by {bad:e}")));
    }
    let ones;
    let weights = match weights {
        Some(w) if w.len() != set.triangles().len() => {
            return Err(Error::DimensionMismatch { expected: set.triangles().len(), got: w.len() })
        }
        Some(w) => w,
        None => {
            ones = vec![1.0; set.triangles().len()];
            &ones
        }
    };
    let verts = set.vertices();
    let lhs: f64 = set
        .triangles()
        .iter()
        .zip(weights)
        .map(|(t, f)| f * spherical_area(&verts[t[0]], &verts[t[1]], &verts[t[2]]))
        .sum();
    let index = CountingIndex::new(set, &AmbientVector::zeros(n), 2.0)?;
    let (sums, jittered) =
        sample_planes(&index, samples, seed, |hits| hits.hits.iter().map(|h| weights[h.triangle]).sum::<f64>())?;
    let (mean, ci) = mean_ci95(&sums);
    let half_omega = 0.5 * omega(p + 1)?;
    let rhs = half_omega * mean;
    let ci95 = half_omega * ci;
    let pass = (lhs - rhs).abs() <= ci95 + 1e-9 * lhs.abs();
    Ok(CroftonResult { n, p, lhs, rhs, ci95, samples, jittered, pass })
}
