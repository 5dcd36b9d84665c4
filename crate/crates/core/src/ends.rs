//! Ends of a surface counted as unbounded components outside growing balls.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::components::{label_components, DEFAULT_LATTICE};
use crate::geom::surface::Surface;
use crate::invariants::{omega, VolumeEstimate};
use crate::vector::AmbientVector;

/// Largest admissible grid radius as a fraction of the truncation radius.
pub const TRUNCATION_MARGIN: f64 = 0.8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentInfo {
    pub pieces: usize,
    pub reaches_truncation: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EndCount {
    #[serde(rename = "R_grid")]
    pub r_grid: Vec<f64>,
    pub l_values: Vec<usize>,
    /// Components with compact closure (not reaching the truncation) per R.
    pub compact_components: Vec<usize>,
    pub stabilized: bool,
    pub l_estimate: usize,
    /// `l(R)` never decreases along the grid.
    pub nondecreasing: bool,
}

/// Components of `{|x| > R}` on the surface.
pub fn components_outside(surface: &Surface<'_>, r: f64) -> Result<Vec<ComponentInfo>> {
    if let Some(trunc) = surface.mesh.truncation_radius() {
        if r >= trunc {
            return Err(Error::InvalidArgument(format!("R = {r} is not below the truncation radius {trunc}")));
        }
    }
    let labels = label_components(surface, &|x: &AmbientVector| x.norm() > r, DEFAULT_LATTICE);
    let mut sizes = vec![0usize; labels.count];
    for &l in &labels.labels {
        sizes[l] += 1;
    }
    Ok(sizes
        .into_iter()
        .zip(&labels.reaches_truncation)
        .map(|(pieces, &reaches)| ComponentInfo { pieces, reaches_truncation: reaches })
        .collect())
}

/// `l(R)` over the grid and its stabilized value: the last `ceil(30%)` of
/// the grid must agree.
pub fn ends_estimate(surface: &Surface<'_>, r_grid: &[f64]) -> Result<EndCount> {
    if r_grid.is_empty() || r_grid.windows(2).any(|w| w[1] <= w[0]) || r_grid[0] <= 0.0 {
        return Err(Error::InvalidArgument("R grid must be positive and strictly increasing".into()));
    }
    if let Some(trunc) = surface.mesh.truncation_radius() {
        let top = *r_grid.last().unwrap();
        if top > TRUNCATION_MARGIN * trunc {
            return Err(Error::Precondition(format!(
                "R grid reaches {top}, beyond {TRUNCATION_MARGIN} of the truncation radius {trunc}"
            )));
        }
    }
    let mut l_values = Vec::with_capacity(r_grid.len());
    let mut compact_components = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let comps = components_outside(surface, r)?;
        l_values.push(comps.iter().filter(|c| c.reaches_truncation).count());
        compact_components.push(comps.iter().filter(|c| !c.reaches_truncation).count());
    }
    let tail = (3 * r_grid.len()).div_ceil(10).max(1);
    let last = *l_values.last().unwrap();
    let stabilized = l_values[l_values.len() - tail..].iter().all(|&l| l == last);
    let nondecreasing = l_values.windows(2).all(|w| w[1] >= w[0]);
    Ok(EndCount { r_grid: r_grid.to_vec(), l_values, compact_components, stabilized, l_estimate: last, nondecreasing })
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem2Check {
    pub ends: usize,
    /// `(2^p / omega_p) V`.
    pub bound: f64,
    pub margin: f64,
    /// Error bar of the bound: `(2^p / omega_p) V.error`.
    pub tolerance: f64,
    pub pass: bool,
}

/// Bound `l <= (2^p / omega_p) V`.
pub fn check_theorem2(ends: usize, volume: &VolumeEstimate, p: usize) -> Result<Theorem2Check> {
    if !volume.converged {
        return Err(Error::NotApplicable("projective volume estimate did not converge".into()));
    }
    let scale = 2f64.powi(p as i32) / omega(p)?;
    let bound = scale * volume.estimate.value;
    let margin = bound - ends as f64;
    let tolerance = scale * volume.estimate.error;
    Ok(Theorem2Check { ends, bound, margin, tolerance, pass: margin >= -tolerance })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::catalog::{build_surface, SurfaceSpec};
    use crate::invariants::{InvariantEstimate, Method, Resolution};

    fn volume(value: f64, error: f64, converged: bool) -> VolumeEstimate {
        VolumeEstimate {
            estimate: InvariantEstimate { value, error, method: Method::FluxLimit, resolution: Resolution::default() },
            flux_limit: value,
            log_slope: value,
            quadrature_error: error,
            converged,
            reliable: converged,
            sweep: Vec::new(),
        }
    }

    #[test]
    fn bound_from_volume() {
        // 2^2 / (2 pi) * 4 pi = 8
        let t = check_theorem2(2, &volume(4.0 * PI, 0.0, true), 2).unwrap();
        assert!((t.bound - 8.0).abs() < 1e-12 && (t.margin - 6.0).abs() < 1e-12 && t.pass);
        assert!(!check_theorem2(9, &volume(4.0 * PI, 0.0, true), 2).unwrap().pass);
        // inside the error bar still passes
        assert!(check_theorem2(9, &volume(4.0 * PI, PI, true), 2).unwrap().pass);
        assert!(matches!(check_theorem2(1, &volume(1.0, 0.0, false), 2), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn grid_validation() {
        let s = build_surface(&SurfaceSpec::new("plane").with("R_max", 10.0).with("resolution", 16.0)).unwrap();
        let surf = s.surface();
        assert!(ends_estimate(&surf, &[]).is_err());
        assert!(ends_estimate(&surf, &[0.0, 1.0]).is_err());
        assert!(ends_estimate(&surf, &[2.0, 2.0]).is_err());
        assert!(components_outside(&surf, 20.0).is_err());
    }

    #[test]
    fn plane_has_one_unbounded_component() {
        let s = build_surface(&SurfaceSpec::new("plane").with("R_max", 10.0).with("resolution", 16.0)).unwrap();
        let e = ends_estimate(&s.surface(), &[2.0, 4.0, 6.0, 8.0]).unwrap();
        assert_eq!(e.l_values, vec![1, 1, 1, 1]);
        assert!(e.stabilized && e.nondecreasing);
        assert_eq!(e.compact_components, vec![0; 4]);
    }
}
