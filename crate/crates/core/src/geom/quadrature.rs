//! Surface integrals over regions cut out by spheres.

use std::sync::Arc;

use rayon::prelude::*;

use crate::geom::surface::{Surface, SurfacePoint};
use crate::numeric::{pairwise_sum, TRIANGLE_RULE};
use crate::vector::AmbientVector;

/// Default recursion depth for triangles straddling a region boundary.
pub const DEFAULT_BOUNDARY_DEPTH: u32 = 6;

/// A region of ambient space. Sphere-bounded regions carry a signed
/// function (negative inside) so cut triangles can be clipped linearly.
#[derive(Clone)]
pub enum Region {
    All,
    Ball { center: AmbientVector, radius: f64 },
    Exterior { center: AmbientVector, radius: f64 },
    Shell { center: AmbientVector, inner: f64, outer: f64 },
    Predicate(Arc<dyn Fn(&AmbientVector) -> bool + Send + Sync>),
}

impl std::fmt::Debug for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Region::All => write!(f, "All"),
            Region::Ball { center, radius } => write!(f, "Ball({center:?}, {radius})"),
            Region::Exterior { center, radius } => write!(f, "Exterior({center:?}, {radius})"),
            Region::Shell { center, inner, outer } => write!(f, "Shell({center:?}, {inner}, {outer})"),
            Region::Predicate(_) => write!(f, "Predicate"),
        }
    }
}

impl Region {
    fn signed(&self, x: &AmbientVector) -> Option<f64> {
        match self {
            Region::All => Some(-1.0),
            Region::Ball { center, radius } => Some(x.distance(center) - radius),
            Region::Exterior { center, radius } => Some(radius - x.distance(center)),
            Region::Shell { center, inner, outer } => {
                let r = x.distance(center);
                Some((inner - r).max(r - outer))
            }
            Region::Predicate(_) => None,
        }
    }

    fn tolerance(&self) -> f64 {
        match self {
            Region::Ball { radius, .. } | Region::Exterior { radius, .. } => 1e-12 * radius,
            Region::Shell { outer, .. } => 1e-12 * outer,
            _ => 0.0,
        }
    }

    pub fn contains(&self, x: &AmbientVector) -> bool {
        match self {
            Region::Predicate(p) => p(x),
            _ => self.signed(x).unwrap() < 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadratureOptions {
    /// Recursion depth for triangles cut by the region boundary.
    pub boundary_depth: u32,
    /// Number of uniform 1-to-4 subdivision passes applied to every triangle.
    pub subdivision: u32,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions { boundary_depth: DEFAULT_BOUNDARY_DEPTH, subdivision: 0 }
    }
}

type Bary = [f64; 3];

fn lerp_bary(corners: &[Bary; 3], l: &[f64; 3]) -> Bary {
    let mut out = [0.0; 3];
    for k in 0..3 {
        out[k] = l[0] * corners[0][k] + l[1] * corners[1][k] + l[2] * corners[2][k];
    }
    out
}

fn mid(a: &Bary, b: &Bary) -> Bary {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])]
}

/// Fraction of `(l1, l2)`-area of the sub-triangle relative to its parent.
fn bary_area_fraction(c: &[Bary; 3]) -> f64 {
    ((c[1][1] - c[0][1]) * (c[2][2] - c[0][2]) - (c[1][2] - c[0][2]) * (c[2][1] - c[0][1])).abs()
}

fn split4(c: &[Bary; 3]) -> [[Bary; 3]; 4] {
    let (m01, m12, m20) = (mid(&c[0], &c[1]), mid(&c[1], &c[2]), mid(&c[2], &c[0]));
    [[c[0], m01, m20], [m01, c[1], m12], [m20, m12, c[2]], [m01, m12, m20]]
}

/// Sub-triangles of the reference triangle after `level` uniform splits.
pub(crate) fn uniform_pieces(level: u32) -> Vec<[Bary; 3]> {
    let mut pieces = vec![[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]];
    for _ in 0..level {
        pieces = pieces.iter().flat_map(split4).collect();
    }
    pieces
}

/// Portion of a triangle where the linear interpolant of `phi` is negative.
fn negative_fraction(phi: [f64; 3]) -> f64 {
    let neg = phi.iter().filter(|p| **p < 0.0).count();
    let lone = |sign_neg: bool| {
        let i = (0..3).find(|&i| (phi[i] < 0.0) == sign_neg).unwrap();
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        phi[i] * phi[i] / ((phi[i] - phi[j]) * (phi[i] - phi[k]))
    };
    match neg {
        0 => 0.0,
        3 => 1.0,
        1 => lone(true),
        _ => 1.0 - lone(false),
    }
}

/// Integral of `g` over the part of sub-triangle `corners` of triangle `t`
/// lying in `region`.
pub(crate) fn piece_integral<G>(
    surface: &Surface<'_>,
    t: usize,
    corners: &[Bary; 3],
    region: &Region,
    integrand: &G,
    depth_left: u32,
) -> f64
where
    G: Fn(&SurfacePoint) -> f64,
{
    let frac = bary_area_fraction(corners);
    let nodes: Vec<(SurfacePoint, f64)> = TRIANGLE_RULE
        .iter()
        .map(|(l, w)| (surface.sample(t, lerp_bary(corners, l)), *w))
        .collect();
    let full = || {
        nodes.iter().map(|(p, w)| w * integrand(p) * p.area_density()).sum::<f64>() * 0.5 * frac
    };
    if matches!(region, Region::All) {
        return full();
    }
    let corner_pos: Vec<AmbientVector> = corners.iter().map(|c| surface.position(t, *c)).collect();
    match region {
        Region::Predicate(pred) => {
            let inside: Vec<bool> = corner_pos
                .iter()
                .map(|x| pred(x))
                .chain(nodes.iter().map(|(p, _)| pred(&p.position)))
                .collect();
            if inside.iter().all(|b| *b) {
                return full();
            }
            if inside.iter().all(|b| !*b) {
                return 0.0;
            }
            if depth_left == 0 {
                return nodes
                    .iter()
                    .zip(&inside[3..])
                    .filter(|(_, b)| **b)
                    .map(|((p, w), _)| w * integrand(p) * p.area_density())
                    .sum::<f64>()
                    * 0.5
                    * frac;
            }
        }
        _ => {
            let tol = region.tolerance();
            let corner_phi: Vec<f64> = corner_pos.iter().map(|x| region.signed(x).unwrap()).collect();
            let node_phi: Vec<f64> = nodes.iter().map(|(p, _)| region.signed(&p.position).unwrap()).collect();
            let all = corner_phi.iter().chain(node_phi.iter());
            let (mut any_in, mut any_out) = (false, false);
            for phi in all {
                any_in |= *phi < -tol;
                any_out |= *phi > tol;
            }
            if !any_out {
                return full();
            }
            if !any_in {
                return 0.0;
            }
            if depth_left == 0 {
                let phi = [corner_phi[0], corner_phi[1], corner_phi[2]];
                let corners_straddle = phi.iter().any(|p| *p < 0.0) && phi.iter().any(|p| *p >= 0.0);
                if corners_straddle {
                    return negative_fraction(phi) * full();
                }
                return nodes
                    .iter()
                    .zip(&node_phi)
                    .filter(|(_, phi)| **phi < 0.0)
                    .map(|((p, w), _)| w * integrand(p) * p.area_density())
                    .sum::<f64>()
                    * 0.5
                    * frac;
            }
        }
    }
    split4(corners)
        .iter()
        .map(|c| piece_integral(surface, t, c, region, integrand, depth_left - 1))
        .sum()
}

/// Per-triangle integrals of `integrand` over `region`, in triangle order.
pub fn triangle_integrals<G>(surface: &Surface<'_>, region: &Region, integrand: &G, opts: QuadratureOptions) -> Vec<f64>
where
    G: Fn(&SurfacePoint) -> f64 + Sync,
{
    let pieces = uniform_pieces(opts.subdivision);
    (0..surface.triangle_count())
        .into_par_iter()
        .map(|t| {
            pieces
                .iter()
                .map(|c| piece_integral(surface, t, c, region, integrand, opts.boundary_depth))
                .sum::<f64>()
        })
        .collect()
}

/// Integral of `integrand` (per unit area) over the part of the surface in
/// `region`.
pub fn integrate<G>(surface: &Surface<'_>, region: &Region, integrand: &G, opts: QuadratureOptions) -> f64
where
    G: Fn(&SurfacePoint) -> f64 + Sync,
{
    pairwise_sum(&triangle_integrals(surface, region, integrand, opts))
}

/// Integral at one extra level of uniform subdivision, with the change
/// from the coarser level as the error estimate.
pub fn integrate_with_error<G>(
    surface: &Surface<'_>,
    region: &Region,
    integrand: &G,
    opts: QuadratureOptions,
) -> (f64, f64)
where
    G: Fn(&SurfacePoint) -> f64 + Sync,
{
    let coarse = integrate(surface, region, integrand, opts);
    let fine = integrate(surface, region, integrand, QuadratureOptions { subdivision: opts.subdivision + 1, ..opts });
    (fine, (fine - coarse).abs())
}

/// p-dimensional measure of the part of the surface inside `region`.
pub fn surface_measure(surface: &Surface<'_>, region: &Region) -> f64 {
    integrate(surface, region, &|_: &SurfacePoint| 1.0, QuadratureOptions::default())
}

/// Cached per-triangle data for evaluating one integrand over many balls
/// or shells around a fixed center.
pub struct RadialSweep<'a> {
    surface: Surface<'a>,
    center: AmbientVector,
    full: Vec<f64>,
    ranges: Vec<(f64, f64)>,
    opts: QuadratureOptions,
}

impl<'a> RadialSweep<'a> {
    pub fn new<G>(surface: Surface<'a>, center: AmbientVector, integrand: &G, opts: QuadratureOptions) -> Self
    where
        G: Fn(&SurfacePoint) -> f64 + Sync,
    {
        let pieces = uniform_pieces(opts.subdivision);
        let data: Vec<(f64, (f64, f64))> = (0..surface.triangle_count())
            .into_par_iter()
            .map(|t| {
                let full = pieces
                    .iter()
                    .map(|c| piece_integral(&surface, t, c, &Region::All, integrand, 0))
                    .sum::<f64>();
                let mut lo = f64::INFINITY;
                let mut hi = 0.0f64;
                let probe = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
                    .into_iter()
                    .chain(TRIANGLE_RULE.iter().map(|(l, _)| *l));
                for b in probe {
                    let r = surface.position(t, b).distance(&center);
                    lo = lo.min(r);
                    hi = hi.max(r);
                }
                let pad = 0.05 * (hi - lo);
                (full, ((lo - pad).max(0.0), hi + pad))
            })
            .collect();
        let (full, ranges) = data.into_iter().unzip();
        RadialSweep { surface, center, full, ranges, opts }
    }

    fn cut<G>(&self, region: &Region, keep: impl Fn(f64, f64) -> Option<bool> + Sync, integrand: &G) -> f64
    where
        G: Fn(&SurfacePoint) -> f64 + Sync,
    {
        let pieces = uniform_pieces(self.opts.subdivision);
        let vals: Vec<f64> = (0..self.full.len())
            .into_par_iter()
            .map(|t| {
                let (lo, hi) = self.ranges[t];
                match keep(lo, hi) {
                    Some(true) => self.full[t],
                    Some(false) => 0.0,
                    None => pieces
                        .iter()
                        .map(|c| piece_integral(&self.surface, t, c, region, integrand, self.opts.boundary_depth))
                        .sum(),
                }
            })
            .collect();
        pairwise_sum(&vals)
    }

    /// Integral over `B(center, radius)`.
    pub fn ball<G>(&self, radius: f64, integrand: &G) -> f64
    where
        G: Fn(&SurfacePoint) -> f64 + Sync,
    {
        let region = Region::Ball { center: self.center.clone(), radius };
        self.cut(
            &region,
            |lo, hi| {
                if hi < radius {
                    Some(true)
                } else if lo > radius {
                    Some(false)
                } else {
                    None
                }
            },
            integrand,
        )
    }

    /// Integral over `inner < |x - center| < outer`.
    pub fn shell<G>(&self, inner: f64, outer: f64, integrand: &G) -> f64
    where
        G: Fn(&SurfacePoint) -> f64 + Sync,
    {
        let region = Region::Shell { center: self.center.clone(), inner, outer };
        self.cut(
            &region,
            |lo, hi| {
                if lo > inner && hi < outer {
                    Some(true)
                } else if hi < inner || lo > outer {
                    Some(false)
                } else {
                    None
                }
            },
            integrand,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::mesh::SimplicialSurface;

    #[test]
    fn unit_right_triangle_area() {
        let verts = vec![[0.0, 0.0, 0.0].into(), [1.0, 0.0, 0.0].into(), [0.0, 1.0, 0.0].into()];
        let mesh = SimplicialSurface::new(3, verts, vec![[0, 1, 2]], vec![[0, 1], [1, 2], [2, 0]], None).unwrap();
        let s = Surface::flat(&mesh);
        assert!((surface_measure(&s, &Region::All) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn negative_fraction_of_linear_cut() {
        // phi = x - 0.5 on the unit right triangle: area with x < 0.5 is 3/8 of 1/2
        let f = negative_fraction([-0.5, 0.5, -0.5]);
        assert!((f - 0.75).abs() < 1e-15);
        assert_eq!(negative_fraction([1.0, 2.0, 3.0]), 0.0);
    }
}
