//! Level sets of the distance function `f(m) = |x(m) - a|`.

use std::collections::HashMap;

use crate::geom::mesh::edge_key;
use crate::geom::surface::Surface;
use crate::numeric::{bracketed_root, gauss_legendre};
use crate::vector::AmbientVector;

/// A level segment with the edge keys it starts and ends on and its end positions.
type Crossing = (LevelSegment, [usize; 2], [usize; 2], AmbientVector, AmbientVector);

/// Relative snapping distance between a level and vertex values.
pub const SNAP_RELATIVE: f64 = 1e-9;

/// Default number of bisection passes applied to every segment.
pub const DEFAULT_REFINEMENT: u32 = 2;

/// One piece of a level curve inside a triangle, in barycentric
/// coordinates of that triangle. The piece is the quadratic through
/// `start`, `mid` and `end`; `mid` lies on the level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSegment {
    pub triangle: usize,
    pub start: [f64; 3],
    pub mid: [f64; 3],
    pub end: [f64; 3],
}

impl LevelSegment {
    fn straight(triangle: usize, start: [f64; 3], end: [f64; 3]) -> Self {
        let mid = [0.5 * (start[0] + end[0]), 0.5 * (start[1] + end[1]), 0.5 * (start[2] + end[2])];
        LevelSegment { triangle, start, mid, end }
    }

    fn reversed(&self) -> Self {
        LevelSegment { triangle: self.triangle, start: self.end, mid: self.mid, end: self.start }
    }

    /// Barycentric point and velocity at curve parameter `s` in `[0, 1]`.
    pub fn at(&self, s: f64) -> ([f64; 3], [f64; 3]) {
        let (w0, w1, w2) = ((1.0 - s) * (1.0 - 2.0 * s), 4.0 * s * (1.0 - s), s * (2.0 * s - 1.0));
        let (d0, d1, d2) = (4.0 * s - 3.0, 4.0 - 8.0 * s, 4.0 * s - 1.0);
        let mut b = [0.0; 3];
        let mut v = [0.0; 3];
        for k in 0..3 {
            b[k] = w0 * self.start[k] + w1 * self.mid[k] + w2 * self.end[k];
            v[k] = d0 * self.start[k] + d1 * self.mid[k] + d2 * self.end[k];
        }
        (b, v)
    }
}

#[derive(Clone, Debug)]
pub struct LevelPolyline {
    pub points: Vec<AmbientVector>,
    pub segments: Vec<LevelSegment>,
    pub closed: bool,
}

/// The level set `{|x - a| = t}` of a surface traced as polylines.
#[derive(Clone, Debug)]
pub struct LevelCurve {
    pub polylines: Vec<LevelPolyline>,
    /// Level actually traced (after snapping).
    pub level: f64,
    /// Level that was requested.
    pub requested: f64,
    pub center: AmbientVector,
}

impl LevelCurve {
    pub fn perturbation(&self) -> f64 {
        self.level - self.requested
    }

    pub fn is_empty(&self) -> bool {
        self.polylines.is_empty()
    }

    /// Length of the curve on the surface, integrated along each segment.
    pub fn length(&self, surface: &Surface<'_>) -> f64 {
        self.integrate(surface, |_, _| 1.0)
    }

    /// Line integral `int g(point, unit_tangent) ds` over all segments.
    pub fn integrate<G>(&self, surface: &Surface<'_>, g: G) -> f64
    where
        G: Fn(&crate::geom::surface::SurfacePoint, &AmbientVector) -> f64,
    {
        let rule = gauss_legendre(4);
        let mut parts = Vec::new();
        for pl in &self.polylines {
            for seg in &pl.segments {
                let mut acc = 0.0;
                for (s, w) in &rule {
                    let (b, db) = seg.at(*s);
                    let p = surface.sample(seg.triangle, b);
                    let vel = p.velocity(db[1], db[2]);
                    let speed = vel.norm();
                    if speed > 0.0 {
                        acc += w * g(&p, &vel.scaled(1.0 / speed)) * speed;
                    }
                }
                parts.push(acc);
            }
        }
        crate::numeric::pairwise_sum(&parts)
    }
}

/// Level `t` moved off every vertex value by whole snapping steps, upward
/// unless that would pass the largest vertex value (a level at the outer
/// truncation), in which case downward.
pub fn snap_level(values: &[f64], t: f64) -> f64 {
    let eps = SNAP_RELATIVE * t.abs().max(f64::MIN_POSITIVE);
    let top = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let step = if t + eps > top && t <= top { -eps } else { eps };
    let mut level = t;
    for _ in 0..1000 {
        if values.iter().all(|v| (v - level).abs() >= eps) {
            break;
        }
        level += step;
    }
    level
}

fn bary_on_edge(k: usize, s: f64) -> [f64; 3] {
    let mut b = [0.0; 3];
    b[k] = 1.0 - s;
    b[(k + 1) % 3] = s;
    b
}

/// Moves barycentric point `b` of triangle `tri` onto the level by Newton
/// steps along the gradient of the distance in `(l1, l2)`.
fn project_to_level(surface: &Surface<'_>, tri: usize, mut b: [f64; 3], a: &AmbientVector, level: f64) -> [f64; 3] {
    for _ in 0..8 {
        let p = surface.sample(tri, b);
        let xa = &p.position - a;
        let f = xa.norm();
        let (g1, g2) = (xa.dot(&p.d1) / f, xa.dot(&p.d2) / f);
        let gg = g1 * g1 + g2 * g2;
        if gg == 0.0 {
            break;
        }
        let step = (level - f) / gg;
        b[1] += step * g1;
        b[2] += step * g2;
        b[0] = 1.0 - b[1] - b[2];
        if (level - f).abs() <= 1e-13 * level {
            break;
        }
    }
    b
}

fn refine_segment(
    surface: &Surface<'_>,
    seg: &LevelSegment,
    a: &AmbientVector,
    level: f64,
    depth: u32,
    out: &mut Vec<LevelSegment>,
) {
    let m = project_to_level(surface, seg.triangle, seg.mid, a, level);
    if depth == 0 {
        out.push(LevelSegment { mid: m, ..seg.clone() });
        return;
    }
    let left = LevelSegment::straight(seg.triangle, seg.start, m);
    let right = LevelSegment::straight(seg.triangle, m, seg.end);
    refine_segment(surface, &left, a, level, depth - 1, out);
    refine_segment(surface, &right, a, level, depth - 1, out);
}

/// Traces `{|x - a| = t}` with the default refinement.
pub fn level_polyline(surface: &Surface<'_>, a: &AmbientVector, t: f64) -> LevelCurve {
    level_polyline_refined(surface, a, t, DEFAULT_REFINEMENT)
}

/// Traces `{|x - a| = t}` through the triangles of `surface`.
///
/// Crossings are located on each edge by root finding along the edge;
/// each segment is then bisected `refinement` times with the new points
/// projected back onto the level, so the polyline follows the curved level
/// set inside each triangle.
pub fn level_polyline_refined(surface: &Surface<'_>, a: &AmbientVector, t: f64, refinement: u32) -> LevelCurve {
    let mesh = surface.mesh;
    let values: Vec<f64> = mesh.vertices().iter().map(|v| v.distance(a)).collect();
    let level = snap_level(&values, t);
    let mut curve = LevelCurve { polylines: Vec::new(), level, requested: t, center: a.clone() };

    // crossing on local edge k of triangle tri: barycentric point + position
    let mut segs: Vec<Crossing> = Vec::new();
    for (ti, tri) in mesh.triangles().iter().enumerate() {
        let above: Vec<bool> = tri.iter().map(|&i| values[i] > level).collect();
        if above.iter().all(|b| *b) || above.iter().all(|b| !*b) {
            continue;
        }
        let mut ends = Vec::with_capacity(2);
        for k in 0..3 {
            let (i, j) = (tri[k], tri[(k + 1) % 3]);
            if above[k] == above[(k + 1) % 3] {
                continue;
            }
            let s = if surface.chart.is_some() && mesh.corner_params(ti).is_some() {
                let g = |s: f64| surface.position(ti, bary_on_edge(k, s)).distance(a) - level;
                bracketed_root(g, 0.0, 1.0, 1e-15)
            } else {
                segment_sphere_param(&mesh.vertices()[i], &mesh.vertices()[j], a, level)
            };
            let b = bary_on_edge(k, s);
            ends.push((b, edge_key(i, j), surface.position(ti, b)));
        }
        debug_assert_eq!(ends.len(), 2);
        let (b1, k1, p1) = ends.pop().unwrap();
        let (b0, k0, p0) = ends.pop().unwrap();
        segs.push((LevelSegment::straight(ti, b0, b1), k0, k1, p0, p1));
    }

    // chain segments through shared edges
    let mut by_edge: HashMap<[usize; 2], Vec<usize>> = HashMap::new();
    for (si, s) in segs.iter().enumerate() {
        by_edge.entry(s.1).or_default().push(si);
        by_edge.entry(s.2).or_default().push(si);
    }
    let mut used = vec![false; segs.len()];
    let other_end = |si: usize, key: [usize; 2]| -> Option<usize> {
        by_edge.get(&key).and_then(|v| v.iter().copied().find(|&o| o != si))
    };
    for start in 0..segs.len() {
        if used[start] {
            continue;
        }
        // walk backwards to an open end, if any
        let mut first = start;
        let mut entry_key = segs[start].1;
        let mut guard = 0;
        while let Some(prev) = other_end(first, entry_key) {
            if prev == start || guard > segs.len() {
                break;
            }
            let pk = if segs[prev].1 == entry_key { segs[prev].2 } else { segs[prev].1 };
            first = prev;
            entry_key = pk;
            guard += 1;
        }
        let mut pl = LevelPolyline { points: Vec::new(), segments: Vec::new(), closed: false };
        let mut cur = first;
        let mut in_key = entry_key;
        loop {
            used[cur] = true;
            let (seg, k0, _k1, p0, p1) = &segs[cur];
            let forward = *k0 == in_key;
            let (seg_oriented, pa, pb, out_key) = if forward {
                (seg.clone(), p0, p1, segs[cur].2)
            } else {
                (seg.reversed(), p1, p0, segs[cur].1)
            };
            if pl.points.is_empty() {
                pl.points.push(pa.clone());
            }
            pl.points.push(pb.clone());
            pl.segments.push(seg_oriented);
            match other_end(cur, out_key) {
                Some(next) if next == first && !pl.segments.is_empty() => {
                    pl.closed = true;
                    pl.points.pop();
                    break;
                }
                Some(next) if !used[next] => {
                    cur = next;
                    in_key = out_key;
                }
                _ => break,
            }
        }
        {
            let mut segments = Vec::with_capacity(pl.segments.len() << refinement);
            for seg in &pl.segments {
                refine_segment(surface, seg, a, level, refinement, &mut segments);
            }
            let mut points: Vec<AmbientVector> =
                segments.iter().map(|s| surface.position(s.triangle, s.start)).collect();
            if !pl.closed {
                let last = segments.last().expect("nonempty polyline");
                points.push(surface.position(last.triangle, last.end));
            }
            pl = LevelPolyline { points, segments, closed: pl.closed };
        }
        curve.polylines.push(pl);
    }
    curve
}

/// Parameter `s` in `[0, 1]` where `|p + s (q - p) - a| = r`, assuming a
/// single crossing on the segment.
fn segment_sphere_param(p: &AmbientVector, q: &AmbientVector, a: &AmbientVector, r: f64) -> f64 {
    let d = q - p;
    let w = p - a;
    let aa = d.norm_sq();
    let bb = 2.0 * w.dot(&d);
    let cc = w.norm_sq() - r * r;
    let disc = (bb * bb - 4.0 * aa * cc).max(0.0).sqrt();
    let roots = [(-bb - disc) / (2.0 * aa), (-bb + disc) / (2.0 * aa)];
    roots
        .into_iter()
        .filter(|s| (-1e-12..=1.0 + 1e-12).contains(s))
        .map(|s| s.clamp(0.0, 1.0))
        .next()
        .unwrap_or_else(|| bracketed_root(|s| p.add_scaled(s, &d).distance(a) - r, 0.0, 1.0, 1e-15))
}
