use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::level::{level_polyline_refined, DEFAULT_REFINEMENT};
use crate::geom::quadrature::{QuadratureOptions, RadialSweep};
use crate::geom::surface::{Surface, SurfacePoint};
use crate::vector::AmbientVector;

/// Relative drop of `J(t)/t^{p-1}` tolerated between consecutive levels.
pub const DEFAULT_MONOTONICITY_TOL: f64 = 1e-3;

/// `J(t) = t^{-1} int_{|x - a| = t} |x_a^T|` on a grid of levels.
#[derive(Clone, Debug, Serialize)]
pub struct FluxProfile {
    pub levels: Vec<f64>,
    pub j_values: Vec<f64>,
    /// `J(t) / t^{p-1}`.
    pub normalized: Vec<f64>,
    /// Change of `J` under one extra level-set refinement pass.
    pub errors: Vec<f64>,
    /// Levels where the level set was empty (recorded as `J = 0`).
    pub empty: Vec<bool>,
    pub perturbations: Vec<f64>,
}

/// `|x_a^T|` at a surface point.
pub(crate) fn tangential_norm(p: &SurfacePoint, a: &AmbientVector) -> f64 {
    let xa = &p.position - a;
    p.frame().tangential_norm_sq(&xa).sqrt()
}

/// `J(t)` and its refinement error at one level.
pub(crate) fn flux_at(surface: &Surface<'_>, a: &AmbientVector, t: f64) -> (f64, f64, bool, f64) {
    let integrate = |depth| {
        let curve = level_polyline_refined(surface, a, t, depth);
        let j = curve.integrate(surface, |p, _| tangential_norm(p, a)) / curve.level;
        (j, curve.is_empty(), curve.perturbation())
    };
    let (fine, empty, pert) = integrate(DEFAULT_REFINEMENT);
    let (coarse, _, _) = integrate(DEFAULT_REFINEMENT - 1);
    (fine, (fine - coarse).abs(), empty, pert)
}

fn validate_grid(levels: &[f64]) -> Result<()> {
    if levels.is_empty() {
        return Err(Error::InvalidArgument("level grid is empty".into()));
    }
    if levels.iter().any(|t| !(*t > 0.0) || !t.is_finite()) || levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("levels must be positive and strictly increasing".into()));
    }
    Ok(())
}

pub fn flux_profile(surface: &Surface<'_>, a: &AmbientVector, t_grid: &[f64]) -> Result<FluxProfile> {
    validate_grid(t_grid)?;
    if a.dim() != surface.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: surface.ambient_dim(), got: a.dim() });
    }
    let p = surface.mesh.intrinsic_dim() as i32;
    let rows: Vec<(f64, f64, bool, f64)> = t_grid.par_iter().map(|&t| flux_at(surface, a, t)).collect();
    Ok(FluxProfile {
        levels: t_grid.to_vec(),
        j_values: rows.iter().map(|r| r.0).collect(),
        normalized: rows.iter().zip(t_grid).map(|(r, t)| r.0 / t.powi(p - 1)).collect(),
        errors: rows.iter().map(|r| r.1).collect(),
        empty: rows.iter().map(|r| r.2).collect(),
        perturbations: rows.iter().map(|r| r.3).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityCheck {
    pub pass: bool,
    /// Largest relative drop `(n_i - n_{i+1}) / n_i` over the profile.
    pub worst_violation: f64,
    pub worst_level: Option<f64>,
    pub tol: f64,
}

/// Pass iff `normalized[i+1] >= normalized[i] (1 - tol)` everywhere.
pub fn check_monotonicity(profile: &FluxProfile, tol: f64) -> MonotonicityCheck {
    let mut worst = 0.0f64;
    let mut at = None;
    for i in 0..profile.normalized.len().saturating_sub(1) {
        let (n0, n1) = (profile.normalized[i], profile.normalized[i + 1]);
        if n0 <= 0.0 {
            continue;
        }
        let drop = (n0 - n1) / n0;
        if drop > worst {
            worst = drop;
            at = Some(profile.levels[i + 1]);
        }
    }
    MonotonicityCheck { pass: worst <= tol, worst_violation: worst, worst_level: at, tol }
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub levels: Vec<f64>,
    /// `|p A(t) - t J(t)| / (t J(t))` per level.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// Compares `p A(t)` with `t J(t)` on levels whose ball contains no
/// boundary of the surface.
pub fn check_density_identity(surface: &Surface<'_>, a: &AmbientVector, t_grid: &[f64]) -> Result<DensityReport> {
    validate_grid(t_grid)?;
    let t_max = *t_grid.last().unwrap();
    let mesh = surface.mesh;
    for e in mesh.boundary_edges() {
        let (t, k) = mesh.boundary_owner(e)?;
        for s in [0.0, 0.5, 1.0] {
            let mut b = [0.0; 3];
            b[k] = 1.0 - s;
            b[(k + 1) % 3] = s;
            if surface.position(t, b).distance(a) < t_max {
                return Err(Error::NotApplicable(format!(
                    "surface boundary lies inside the ball of radius {t_max} about the base point"
                )));
            }
        }
    }
    let p = mesh.intrinsic_dim() as f64;
    let one = |_: &SurfacePoint| 1.0;
    let sweep = RadialSweep::new(*surface, a.clone(), &one, QuadratureOptions::default());
    let profile = flux_profile(surface, a, t_grid)?;
    let residuals: Vec<f64> = t_grid
        .iter()
        .zip(&profile.j_values)
        .map(|(&t, &j)| {
            let area = sweep.ball(t, &one);
            let tj = t * j;
            if tj > 0.0 {
                (p * area - tj).abs() / tj
            } else if area == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    Ok(DensityReport { levels: t_grid.to_vec(), residuals, max_residual })
}
