//! Finite-difference mean curvature of charts.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::chart::ImmersionChart;
use crate::geom::frame::TangentFrame;
use crate::vector::AmbientVector;

/// Default pass threshold on `max |H| * length_scale`.
pub const DEFAULT_MINIMALITY_TOL: f64 = 1e-3;

/// Stencil step relative to the parameter extent.
const STEP_FRACTION: f64 = 1e-3;

#[derive(Clone, Debug, Serialize)]
pub struct MinimalityReport {
    pub max_mean_curvature: f64,
    /// Half the diameter of the sampled image; makes `|H|` dimensionless.
    pub length_scale: f64,
    pub scaled: f64,
    pub samples: usize,
    pub pass: bool,
}

/// `nu x nv` parameter samples strictly inside the chart domain.
pub fn interior_grid(chart: &ImmersionChart, nu: usize, nv: usize) -> Vec<(f64, f64)> {
    let d = chart.domain;
    let mut out = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            let a = (i as f64 + 0.5) / nu as f64;
            let b = (j as f64 + 0.5) / nv as f64;
            out.push((d.u0 + a * (d.u1 - d.u0), d.v0 + b * (d.v1 - d.v0)));
        }
    }
    out
}

/// Fourth-order central difference of `f` at `x` with step `h`.
fn d4(f: impl Fn(f64) -> AmbientVector, x: f64, h: f64) -> AmbientVector {
    let (p2, p1, m1, m2) = (f(x + 2.0 * h), f(x + h), f(x - h), f(x - 2.0 * h));
    let num = &(&m2 - &p2) + &(&p1 - &m1).scaled(8.0);
    num.scaled(1.0 / (12.0 * h))
}

/// Mean curvature vector `H = (1/2) g^{ij} (x_ij)^normal` at `(u, v)`.
pub fn mean_curvature(chart: &ImmersionChart, u: f64, v: f64) -> Result<AmbientVector> {
    let d = chart.domain;
    let (hu, hv) = (STEP_FRACTION * (d.u1 - d.u0), STEP_FRACTION * (d.v1 - d.v0));
    let out_u = u - 2.0 * hu < d.u0 || u + 2.0 * hu > d.u1;
    let out_v = !d.periodic_v && (v - 2.0 * hv < d.v0 || v + 2.0 * hv > d.v1);
    if out_u || out_v {
        return Err(Error::StencilOutOfDomain { u, v });
    }
    let (xu, xv) = chart.deriv(u, v);
    let xuu = d4(|s| chart.deriv(s, v).0, u, hu);
    let xuv = d4(|t| chart.deriv(u, t).0, v, hv);
    let xvv = d4(|t| chart.deriv(u, t).1, v, hv);
    let (e, f, g) = (xu.norm_sq(), xu.dot(&xv), xv.norm_sq());
    let det = e * g - f * f;
    let (gi11, gi12, gi22) = (g / det, -f / det, e / det);
    let second = xuu.scaled(gi11).add_scaled(2.0 * gi12, &xuv).add_scaled(gi22, &xvv);
    let frame = TangentFrame::from_spanning(&[xu, xv]).ok_or(Error::DegenerateChart { u, v })?;
    let normal = &second - &frame.project(&second);
    Ok(normal.scaled(0.5))
}

/// Pass iff `max |H| * length_scale <= tol` over the samples.
pub fn verify_minimality(chart: &ImmersionChart, samples: &[(f64, f64)], tol: f64) -> Result<MinimalityReport> {
    let mut max_h = 0.0f64;
    let mut points = Vec::with_capacity(samples.len());
    for &(u, v) in samples {
        max_h = max_h.max(mean_curvature(chart, u, v)?.norm());
        points.push(chart.eval(u, v));
    }
    let mut diameter = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            diameter = diameter.max(p.distance(q));
        }
    }
    let length_scale = 0.5 * diameter;
    let scaled = max_h * length_scale;
    Ok(MinimalityReport { max_mean_curvature: max_h, length_scale, scaled, samples: samples.len(), pass: scaled <= tol })
}
