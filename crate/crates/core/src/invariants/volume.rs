use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::frame::radial_split_sq;
use crate::geom::quadrature::{integrate_with_error, QuadratureOptions, RadialSweep, Region};
use crate::geom::surface::{Surface, SurfacePoint};
use crate::invariants::flux::flux_at;
use crate::invariants::{mesh_id, InvariantEstimate, Method, Resolution};
use crate::numeric::least_squares_line;
use crate::vector::AmbientVector;

/// Relative disagreement between the two estimators above which the
/// volume is flagged unreliable.
pub const ESTIMATOR_AGREEMENT: f64 = 0.10;
/// Relative change of `J(R)/R^{p-1}` between `R/2` and `R` tolerated for a
/// converged estimate.
pub const CONVERGENCE_DRIFT: f64 = 0.05;

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    #[serde(rename = "R")]
    pub r: f64,
    /// `I(R) = int_{M_a(R)} |x_a|^{-p}`.
    pub log_integral: f64,
    /// `J(R) / R^{p-1}`.
    pub normalized_flux: f64,
    pub flux_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeEstimate {
    pub estimate: InvariantEstimate,
    pub flux_limit: f64,
    pub log_slope: f64,
    pub quadrature_error: f64,
    /// `J/R^{p-1}` stopped moving between `R/2` and `R`, and the two
    /// estimators agree.
    pub converged: bool,
    /// The two estimators agree within 10%.
    pub reliable: bool,
    pub sweep: Vec<SweepPoint>,
}

impl VolumeEstimate {
    /// Larger of the two estimators; an upper proxy for the limit.
    pub fn upper(&self) -> f64 {
        self.flux_limit.max(self.log_slope)
    }
}

pub(crate) fn check_off_surface(surface: &Surface<'_>, a: &AmbientVector, scale: f64) -> Result<f64> {
    if a.dim() != surface.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: surface.ambient_dim(), got: a.dim() });
    }
    let d = surface.sampled_distance(a);
    if d <= 1e-9 * scale.max(1.0) {
        return Err(Error::Precondition("base point lies on the surface".into()));
    }
    Ok(d)
}

fn check_radius_grid(surface: &Surface<'_>, a: &AmbientVector, r_grid: &[f64]) -> Result<()> {
    if r_grid.len() < 4 {
        return Err(Error::InvalidArgument("R grid needs at least 4 radii".into()));
    }
    if r_grid.iter().any(|r| !(*r > 0.0) || !r.is_finite()) || r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("R grid must be positive and strictly increasing".into()));
    }
    if let Some(trunc) = surface.mesh.truncation_radius() {
        let limit = trunc - a.norm();
        let r_max = *r_grid.last().unwrap();
        if r_max > limit * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "R grid reaches {r_max}, beyond the truncation ball of radius {limit} about the base point"
            )));
        }
    }
    Ok(())
}

/// Projective volume from the flux limit `J(R_max)/R_max^{p-1}`, checked
/// against the slope of `I(R)` in `ln R` over the top half of the grid.
pub fn projective_volume(surface: &Surface<'_>, a: &AmbientVector, r_grid: &[f64]) -> Result<VolumeEstimate> {
    check_radius_grid(surface, a, r_grid)?;
    let r_max = *r_grid.last().unwrap();
    check_off_surface(surface, a, r_max)?;
    let p = surface.mesh.intrinsic_dim() as i32;

    let integrand = |sp: &SurfacePoint| sp.position.distance(a).powi(-p);
    let opts = QuadratureOptions::default();
    let coarse = RadialSweep::new(*surface, a.clone(), &integrand, opts);
    let fine = RadialSweep::new(*surface, a.clone(), &integrand, QuadratureOptions { subdivision: opts.subdivision + 1, ..opts });

    let mut radii = r_grid.to_vec();
    radii.push(0.5 * r_max);
    let fluxes: Vec<(f64, f64, bool, f64)> = radii.par_iter().map(|&r| flux_at(surface, a, r)).collect();
    let integrals: Vec<(f64, f64)> = r_grid.par_iter().map(|&r| (coarse.ball(r, &integrand), fine.ball(r, &integrand))).collect();

    let sweep: Vec<SweepPoint> = r_grid
        .iter()
        .enumerate()
        .map(|(i, &r)| SweepPoint {
            r,
            log_integral: integrals[i].1,
            normalized_flux: fluxes[i].0 / r.powi(p - 1),
            flux_error: fluxes[i].1 / r.powi(p - 1),
        })
        .collect();

    let half = r_grid.len() / 2;
    let xs: Vec<f64> = r_grid[half..].iter().map(|r| r.ln()).collect();
    let slope_of = |k: usize| {
        let ys: Vec<f64> = integrals[half..].iter().map(|v| if k == 0 { v.0 } else { v.1 }).collect();
        least_squares_line(&xs, &ys).0
    };
    let (slope_coarse, log_slope) = (slope_of(0), slope_of(1));
    let last = r_grid.len() - 1;
    let flux_limit = sweep[last].normalized_flux;
    let half_flux = fluxes[last + 1].0 / (0.5 * r_max).powi(p - 1);
    let quadrature_error = (log_slope - slope_coarse).abs() + sweep[last].flux_error;
    let scale = flux_limit.abs().max(log_slope.abs()).max(f64::MIN_POSITIVE);
    let reliable = (flux_limit - log_slope).abs() <= ESTIMATOR_AGREEMENT * scale;
    let drift = (flux_limit - half_flux).abs() / flux_limit.abs().max(f64::MIN_POSITIVE);
    let converged = reliable && drift <= CONVERGENCE_DRIFT;

    Ok(VolumeEstimate {
        estimate: InvariantEstimate {
            value: flux_limit,
            error: (flux_limit - log_slope).abs() + quadrature_error,
            method: Method::FluxLimit,
            resolution: Resolution {
                mesh_id: mesh_id(surface),
                triangles: surface.triangle_count(),
                r_grid: r_grid.to_vec(),
                samples: None,
            },
        },
        flux_limit,
        log_slope,
        quadrature_error,
        converged,
        reliable,
        sweep,
    })
}

/// Direct quadrature of `|x_a^perp|^2 / |x_a|^{p+2}` over `M_a(R)`.
///
/// With a volume estimate, the tail beyond `R` is bounded by
/// `(V - J(R)/R^{p-1}) / p` and added to the error bar.
pub fn q_invariant(
    surface: &Surface<'_>,
    a: &AmbientVector,
    r: f64,
    volume: Option<&VolumeEstimate>,
) -> Result<InvariantEstimate> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument("Q radius must be positive".into()));
    }
    if a.dim() != surface.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: surface.ambient_dim(), got: a.dim() });
    }
    let p = surface.mesh.intrinsic_dim() as i32;
    let integrand = |sp: &SurfacePoint| {
        let (r2, _, n2) = radial_split_sq(&sp.position, &sp.frame(), a);
        n2 / r2.powf(0.5 * (p + 2) as f64)
    };
    let region = Region::Ball { center: a.clone(), radius: r };
    let (value, quad_err) = integrate_with_error(surface, &region, &integrand, QuadratureOptions::default());
    let tail = match volume {
        Some(v) => {
            let at_r = v.sweep.iter().rev().find(|s| (s.r - r).abs() <= 1e-12 * r);
            let flux = match at_r {
                Some(s) => s.normalized_flux,
                None => flux_at(surface, a, r).0 / r.powi(p - 1),
            };
            (v.upper() - flux).max(0.0) / p as f64
        }
        None => 0.0,
    };
    Ok(InvariantEstimate {
        value,
        error: quad_err + tail,
        method: Method::DirectQuadrature,
        resolution: Resolution {
            mesh_id: mesh_id(surface),
            triangles: surface.triangle_count(),
            r_grid: vec![r],
            samples: None,
        },
    })
}
