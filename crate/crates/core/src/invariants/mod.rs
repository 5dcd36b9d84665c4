//! Projective volume, Q-invariant, flux, boundary constant, and the
//! identities relating them.

mod boundary;
mod checks;
mod flux;
mod volume;

use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

pub use boundary::{boundary_constant, BoundaryConstant};
pub use checks::{
    check_corollary1_point, check_lemma1, check_theorem1, flat_planes, on_surface_invariants, Corollary1Check,
    FlatPlanes, Lemma1Report, Theorem1Check,
};
pub use flux::{
    check_density_identity, check_monotonicity, flux_profile, DensityReport, FluxProfile, MonotonicityCheck,
    DEFAULT_MONOTONICITY_TOL,
};
pub use volume::{projective_volume, q_invariant, SweepPoint, VolumeEstimate};

/// Measure of the unit sphere `S^{p-1}`: `2 pi^{p/2} / Gamma(p/2)`.
pub fn omega(p: usize) -> Result<f64> {
    if p < 1 {
        return Err(Error::InvalidArgument(format!("omega needs p >= 1, got {p}")));
    }
    let half = p as f64 / 2.0;
    Ok(2.0 * std::f64::consts::PI.powf(half) / gamma(half))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    FluxLimit,
    LogSlope,
    DirectQuadrature,
    MonteCarlo,
}

/// Discretization metadata attached to an estimate.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Resolution {
    pub mesh_id: String,
    pub triangles: usize,
    #[serde(rename = "R_grid", skip_serializing_if = "Vec::is_empty")]
    pub r_grid: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

/// A numeric estimate with a nonnegative error half-width.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantEstimate {
    pub value: f64,
    pub error: f64,
    pub method: Method,
    pub resolution: Resolution,
}

pub(crate) fn mesh_id(surface: &crate::geom::Surface<'_>) -> String {
    let name = surface.chart.map(|c| c.name.as_str()).unwrap_or("mesh");
    format!("{name}/{}v/{}t", surface.mesh.vertices().len(), surface.mesh.triangles().len())
}
