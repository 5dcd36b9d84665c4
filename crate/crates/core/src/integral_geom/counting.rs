//! Counting intersections of random planes through a base point with a
//! triangulated surface.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{sample_grassmann, PlaneThrough};
use crate::error::{Error, Result};
use crate::geom::mesh::SimplicialSurface;
use crate::stats::mean_ci95;
use crate::vector::AmbientVector;

/// Barycentric coordinate (or relative determinant) below which a hit is
/// treated as degenerate and the plane is re-drawn with a small jitter.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;
/// Angular jitter applied to degenerate planes.
pub const JITTER_SCALE: f64 = 1e-9;
/// Samples drawn from one RNG stream.
pub const CHUNK_SIZE: usize = 1024;
const MAX_JITTERS: usize = 32;
const CAP_PAD: f64 = 1e-9;
const THETA_BINS: usize = 64;
const PHI_BINS: usize = 128;

/// One transversal crossing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit {
    pub triangle: usize,
    /// Distance from the base point.
    pub distance: f64,
    /// For lines: `true` on the ray along the sampled direction.
    pub forward: bool,
}

/// Crossings of one plane with the indexed triangles.
#[derive(Clone, Debug, Default)]
pub struct Intersections {
    /// Sorted by distance.
    pub hits: Vec<Hit>,
    /// A hit fell within tolerance of an edge, or a triangle was parallel.
    pub degenerate: bool,
}

impl Intersections {
    pub fn count_within(&self, r: f64) -> usize {
        self.hits.partition_point(|h| h.distance <= r)
    }

    /// Largest number of hits on either ray of a line within distance `r`.
    pub fn max_ray_hits(&self, r: f64) -> usize {
        let (mut fwd, mut back) = (0, 0);
        for h in self.hits.iter().take_while(|h| h.distance <= r) {
            if h.forward {
                fwd += 1;
            } else {
                back += 1;
            }
        }
        fwd.max(back)
    }
}

struct Candidate {
    triangle: usize,
    origin: Vec<f64>,
    e1: Vec<f64>,
    e2: Vec<f64>,
    scale: f64,
    // unit direction to the centroid and cosine of the angular radius;
    // `None` when the cap is too wide to be useful
    cap: Option<(Vec<f64>, f64)>,
}

/// Per-triangle data relative to a fixed base point, restricted to the
/// triangles that come within `radius` of it.
pub struct CountingIndex {
    n: usize,
    base: AmbientVector,
    radius: f64,
    candidates: Vec<Candidate>,
    bins: Option<DirectionBins>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn segment_distance(p: &[f64], q: &[f64]) -> f64 {
    // distance from the origin to the segment [p, q]
    let d: Vec<f64> = q.iter().zip(p).map(|(a, b)| a - b).collect();
    let dd = dot(&d, &d);
    let s = if dd > 0.0 { (-dot(p, &d) / dd).clamp(0.0, 1.0) } else { 0.0 };
    p.iter().zip(&d).map(|(a, b)| (a + s * b).powi(2)).sum::<f64>().sqrt()
}

/// Distance from the origin to the triangle `o + l1 e1 + l2 e2`.
fn triangle_distance(o: &[f64], e1: &[f64], e2: &[f64]) -> f64 {
    let (g11, g12, g22) = (dot(e1, e1), dot(e1, e2), dot(e2, e2));
    let (b1, b2) = (-dot(o, e1), -dot(o, e2));
    let det = g11 * g22 - g12 * g12;
    if det > 0.0 {
        let l1 = (b1 * g22 - g12 * b2) / det;
        let l2 = (g11 * b2 - g12 * b1) / det;
        if l1 >= 0.0 && l2 >= 0.0 && l1 + l2 <= 1.0 {
            return o.iter().zip(e1).zip(e2).map(|((a, b), c)| (a + l1 * b + l2 * c).powi(2)).sum::<f64>().sqrt();
        }
    }
    let p1: Vec<f64> = o.iter().zip(e1).map(|(a, b)| a + b).collect();
    let p2: Vec<f64> = o.iter().zip(e2).map(|(a, b)| a + b).collect();
    segment_distance(o, &p1).min(segment_distance(&p1, &p2)).min(segment_distance(&p2, o))
}

impl CountingIndex {
    /// Indexes `mesh` about `base` for planes counted inside `B(base, radius)`.
    /// The base point must be off the surface and, for truncated meshes,
    /// the ball must lie inside the truncation ball.
    pub fn new(mesh: &SimplicialSurface, base: &AmbientVector, radius: f64) -> Result<Self> {
        let n = mesh.ambient_dim();
        if base.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: base.dim() });
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument(format!("counting radius must be positive, got {radius}")));
        }
        if let Some(trunc) = mesh.truncation_radius() {
            let limit = trunc - base.norm();
            if radius.is_finite() && radius > limit * (1.0 + 1e-12) {
                return Err(Error::Precondition(format!(
                    "counting radius {radius} exceeds the truncation ball (limit {limit})"
                )));
            }
        }
        let verts = mesh.vertices();
        let mut candidates = Vec::new();
        let mut closest = f64::INFINITY;
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let v0 = &verts[tri[0]];
            let origin: Vec<f64> = (0..n).map(|i| v0[i] - base[i]).collect();
            let e1: Vec<f64> = (0..n).map(|i| verts[tri[1]][i] - v0[i]).collect();
            let e2: Vec<f64> = (0..n).map(|i| verts[tri[2]][i] - v0[i]).collect();
            let dist = triangle_distance(&origin, &e1, &e2);
            closest = closest.min(dist);
            if dist > radius {
                continue;
            }
            let centroid: Vec<f64> = (0..n).map(|i| origin[i] + (e1[i] + e2[i]) / 3.0).collect();
            let c_norm = norm(&centroid);
            let cap = if c_norm > 0.0 && dist > 0.0 {
                let dir: Vec<f64> = centroid.iter().map(|x| x / c_norm).collect();
                let corners = [origin.clone(), (0..n).map(|i| origin[i] + e1[i]).collect(), (0..n).map(|i| origin[i] + e2[i]).collect()];
                let mut alpha = 0.0f64;
                for c in &corners {
                    let cos = (dot(c, &dir) / norm(c)).clamp(-1.0, 1.0);
                    alpha = alpha.max(cos.acos());
                }
                let alpha = alpha + CAP_PAD;
                (alpha < std::f64::consts::FRAC_PI_2 - 1e-6).then(|| (dir, alpha.cos()))
            } else {
                None
            };
            let scale = norm(&e1) * norm(&e2);
            candidates.push(Candidate { triangle: t, origin, e1, e2, scale, cap });
        }
        if closest <= 1e-12 * (1.0 + base.norm()) {
            return Err(Error::Precondition("base point lies on the surface".into()));
        }
        let bins = (n == 3).then(|| DirectionBins::build(&candidates));
        Ok(CountingIndex { n, base: base.clone(), radius, candidates, bins })
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> &AmbientVector {
        &self.base
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Number of triangles that can meet the ball.
    pub fn candidate_count(&self) -> usize {
        self.candidates.len()
    }

    /// Intersects a codimension-2 plane through the base point.
    pub fn intersect(&self, plane: &PlaneThrough) -> Result<Intersections> {
        if plane.ambient_dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: plane.ambient_dim() });
        }
        if plane.frame.len() + 2 != self.n {
            return Err(Error::InvalidArgument(format!(
                "plane of dimension {} does not have codimension 2 in R^{}",
                plane.frame.len(),
                self.n
            )));
        }
        if plane.base.distance(&self.base) > 1e-12 * (1.0 + self.base.norm()) {
            return Err(Error::InvalidArgument("plane does not pass through the indexed base point".into()));
        }
        let comp = plane.complement();
        let normals = [comp[0].as_slice(), comp[1].as_slice()];
        let mut out = Intersections::default();
        match &self.bins {
            Some(bins) => {
                let d = plane.frame[0].as_slice();
                let back: Vec<f64> = d.iter().map(|x| -x).collect();
                for (dir, forward) in [(d, true), (back.as_slice(), false)] {
                    for &k in bins.lookup(dir) {
                        self.test(k, &normals, Some((d, forward)), &mut out);
                    }
                }
                for &k in &bins.always {
                    self.test(k, &normals, Some((d, true)), &mut out);
                    self.test(k, &normals, Some((d, false)), &mut out);
                }
            }
            None => {
                let ray = (self.n == 3).then(|| (plane.frame[0].as_slice(), true));
                for k in 0..self.candidates.len() {
                    if let Some((dir, cos)) = &self.candidates[k].cap {
                        let off: f64 = normals.iter().map(|m| dot(m, dir).powi(2)).sum();
                        if 1.0 - off < cos * cos {
                            continue;
                        }
                    }
                    match ray {
                        Some((d, _)) => {
                            self.test(k, &normals, Some((d, true)), &mut out);
                            self.test(k, &normals, Some((d, false)), &mut out);
                        }
                        None => self.test(k, &normals, None, &mut out),
                    }
                }
            }
        }
        out.hits.sort_by(|a, b| a.distance.total_cmp(&b.distance).then(a.triangle.cmp(&b.triangle)));
        Ok(out)
    }

    fn test(&self, k: usize, normals: &[&[f64]; 2], ray: Option<(&[f64], bool)>, out: &mut Intersections) {
        let c = &self.candidates[k];
        let a00 = dot(normals[0], &c.e1);
        let a01 = dot(normals[0], &c.e2);
        let a10 = dot(normals[1], &c.e1);
        let a11 = dot(normals[1], &c.e2);
        let r0 = -dot(normals[0], &c.origin);
        let r1 = -dot(normals[1], &c.origin);
        let det = a00 * a11 - a01 * a10;
        if det.abs() < DEGENERACY_TOLERANCE * c.scale {
            out.degenerate = true;
            return;
        }
        let l1 = (r0 * a11 - a01 * r1) / det;
        let l2 = (a00 * r1 - r0 * a10) / det;
        let m = l1.min(l2).min(1.0 - l1 - l2);
        if m < -DEGENERACY_TOLERANCE {
            return;
        }
        let x: Vec<f64> = (0..self.n).map(|i| c.origin[i] + l1 * c.e1[i] + l2 * c.e2[i]).collect();
        let forward = match ray {
            Some((d, want)) => {
                let along = dot(&x, d) > 0.0;
                if along != want {
                    return;
                }
                along
            }
            None => true,
        };
        if m <= DEGENERACY_TOLERANCE {
            out.degenerate = true;
            return;
        }
        let distance = norm(&x);
        if distance <= self.radius {
            out.hits.push(Hit { triangle: c.triangle, distance, forward });
        }
    }
}

/// Latitude-longitude buckets of triangle caps on S^2.
struct DirectionBins {
    cells: Vec<Vec<usize>>,
    always: Vec<usize>,
}

impl DirectionBins {
    fn cell(theta_bin: usize, phi_bin: usize) -> usize {
        theta_bin * PHI_BINS + phi_bin
    }

    fn build(candidates: &[Candidate]) -> Self {
        use std::f64::consts::PI;
        let dt = PI / THETA_BINS as f64;
        let dp = 2.0 * PI / PHI_BINS as f64;
        let mut cells = vec![Vec::new(); THETA_BINS * PHI_BINS];
        let mut always = Vec::new();
        for (k, c) in candidates.iter().enumerate() {
            let Some((dir, cos)) = &c.cap else {
                always.push(k);
                continue;
            };
            let alpha = cos.acos();
            let theta = dir[2].clamp(-1.0, 1.0).acos();
            let phi = dir[1].atan2(dir[0]);
            let lo = theta - alpha;
            let hi = theta + alpha;
            let i0 = (lo.max(0.0) / dt).floor() as usize;
            let i1 = ((hi.min(PI) / dt).floor() as usize).min(THETA_BINS - 1);
            let full = lo <= 0.0 || hi >= PI || alpha.sin() >= theta.sin();
            let (j0, j1) = if full {
                (0i64, PHI_BINS as i64 - 1)
            } else {
                let half = (alpha.sin() / theta.sin()).asin();
                (((phi - half) / dp).floor() as i64, ((phi + half) / dp).floor() as i64)
            };
            let span = (j1 - j0 + 1).min(PHI_BINS as i64);
            for i in i0..=i1 {
                for s in 0..span {
                    let j = (j0 + s).rem_euclid(PHI_BINS as i64) as usize;
                    cells[Self::cell(i, j)].push(k);
                }
            }
        }
        DirectionBins { cells, always }
    }

    fn lookup(&self, d: &[f64]) -> &[usize] {
        use std::f64::consts::PI;
        let theta = d[2].clamp(-1.0, 1.0).acos();
        let phi = d[1].atan2(d[0]);
        let i = ((theta / (PI / THETA_BINS as f64)).floor() as usize).min(THETA_BINS - 1);
        let j = ((phi / (2.0 * PI / PHI_BINS as f64)).floor() as i64).rem_euclid(PHI_BINS as i64) as usize;
        &self.cells[Self::cell(i, j)]
    }
}

/// Crossings of `plane` with `mesh` inside `B(plane.base, radius)`.
pub fn plane_mesh_intersections(mesh: &SimplicialSurface, plane: &PlaneThrough, radius: f64) -> Result<Intersections> {
    CountingIndex::new(mesh, &plane.base, radius)?.intersect(plane)
}

/// Monte-Carlo average of `N(b; R)` over Haar-random planes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountingEstimate {
    #[serde(rename = "R")]
    pub r: f64,
    pub mean: f64,
    pub ci95: f64,
    pub samples: usize,
    pub max_observed: usize,
    /// Samples that needed a jittered re-draw.
    pub jittered: usize,
    /// Most crossings seen on a single ray from the base point (lines only).
    pub max_ray_hits: Option<usize>,
}

struct Draw {
    hits: Intersections,
    jittered: bool,
}

fn draw(index: &CountingIndex, p: usize, rng: &mut ChaCha8Rng) -> Result<Draw> {
    let plane = sample_grassmann(index.n, p, &index.base, rng)?;
    let mut hits = index.intersect(&plane)?;
    let mut jittered = false;
    let mut tries = 0;
    while hits.degenerate {
        tries += 1;
        if tries > MAX_JITTERS {
            return Err(Error::Precondition("plane stayed degenerate after repeated jitter".into()));
        }
        jittered = true;
        hits = index.intersect(&plane.jittered(rng, JITTER_SCALE))?;
    }
    Ok(Draw { hits, jittered })
}

/// Runs `samples` draws split into fixed chunks; chunk `c` uses stream `c`
/// of a ChaCha8 generator seeded with `seed`, so results do not depend on
/// the thread count.
pub(crate) fn sample_planes<T: Send>(
    index: &CountingIndex,
    samples: usize,
    seed: u64,
    per_draw: impl Fn(&Intersections) -> T + Sync,
) -> Result<(Vec<T>, usize)> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let p = 2;
    let chunks = samples.div_ceil(CHUNK_SIZE);
    let results: Vec<Result<(Vec<T>, usize)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK_SIZE.min(samples - c * CHUNK_SIZE);
            let mut out = Vec::with_capacity(count);
            let mut jittered = 0;
            for _ in 0..count {
                let d = draw(index, p, &mut rng)?;
                jittered += d.jittered as usize;
                out.push(per_draw(&d.hits));
            }
            Ok((out, jittered))
        })
        .collect();
    let mut all = Vec::with_capacity(samples);
    let mut jittered = 0;
    for r in results {
        let (v, j) = r?;
        all.extend(v);
        jittered += j;
    }
    Ok((all, jittered))
}

/// `E[N(b; R)]` for every radius in `r_grid`, from one shared set of planes.
pub fn counting_sweep(
    mesh: &SimplicialSurface,
    b: &AmbientVector,
    r_grid: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<CountingEstimate>> {
    let Some(r_max) = r_grid.iter().copied().reduce(f64::max) else {
        return Err(Error::InvalidArgument("empty R grid".into()));
    };
    if r_grid.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidArgument("R grid values must be positive".into()));
    }
    let index = CountingIndex::new(mesh, b, r_max)?;
    let lines = mesh.ambient_dim() == 3;
    let (draws, jittered) = sample_planes(&index, samples, seed, |hits| {
        r_grid.iter().map(|&r| (hits.count_within(r), hits.max_ray_hits(r))).collect::<Vec<_>>()
    })?;
    Ok(r_grid
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let counts: Vec<f64> = draws.iter().map(|d| d[k].0 as f64).collect();
            let (mean, ci95) = mean_ci95(&counts);
            CountingEstimate {
                r,
                mean,
                ci95,
                samples,
                max_observed: draws.iter().map(|d| d[k].0).max().unwrap_or(0),
                jittered,
                max_ray_hits: lines.then(|| draws.iter().map(|d| d[k].1).max().unwrap_or(0)),
            }
        })
        .collect())
}

/// `E[N(b; R)]` at a single radius.
pub fn counting_average(
    mesh: &SimplicialSurface,
    b: &AmbientVector,
    r: f64,
    samples: usize,
    seed: u64,
) -> Result<CountingEstimate> {
    Ok(counting_sweep(mesh, b, &[r], samples, seed)?.remove(0))
}
