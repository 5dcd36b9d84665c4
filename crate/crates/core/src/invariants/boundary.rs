use serde::Serialize;

use crate::error::Result;
use crate::geom::surface::Surface;
use crate::numeric::{gauss_legendre, pairwise_sum};
use crate::vector::AmbientVector;

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryConstant {
    pub value: f64,
    /// Change between 4- and 8-point Gauss rules per edge.
    pub error: f64,
    pub edges: usize,
}

fn edge_integral(surface: &Surface<'_>, t: usize, k: usize, a: &AmbientVector, p: i32, nodes: usize) -> f64 {
    let (i, j, o) = (k, (k + 1) % 3, (k + 2) % 3);
    let mut db = [0.0; 3];
    db[i] = -1.0;
    db[j] = 1.0;
    // barycentric direction from the edge midpoint to the opposite corner
    let mut inward = [-0.5; 3];
    inward[o] = 1.0;
    let mut acc = 0.0;
    for (s, w) in gauss_legendre(nodes) {
        let mut b = [0.0; 3];
        b[i] = 1.0 - s;
        b[j] = s;
        let pt = surface.sample(t, b);
        let tau = pt.velocity(db[1], db[2]);
        let speed = tau.norm();
        let tau_hat = tau.scaled(1.0 / speed);
        let into = pt.velocity(inward[1], inward[2]);
        let across = into.add_scaled(-into.dot(&tau_hat), &tau_hat);
        let nu = across.scaled(-1.0 / across.norm());
        let xa = &pt.position - a;
        acc += w * xa.dot(&nu) / xa.norm().powi(p) * speed;
    }
    acc
}

/// `c(Sigma; a) = int_Sigma <x_a^T, nu> / |x_a|^p` over the boundary edges
/// that are not truncation artifacts; `nu` is the outward conormal.
pub fn boundary_constant(surface: &Surface<'_>, a: &AmbientVector) -> Result<BoundaryConstant> {
    let mesh = surface.mesh;
    let p = mesh.intrinsic_dim() as i32;
    let edges = mesh.inner_boundary_edges();
    let mut fine = Vec::with_capacity(edges.len());
    let mut coarse = Vec::with_capacity(edges.len());
    for e in &edges {
        let (t, k) = mesh.boundary_owner(e)?;
        fine.push(edge_integral(surface, t, k, a, p, 8));
        coarse.push(edge_integral(surface, t, k, a, p, 4));
    }
    let value = pairwise_sum(&fine);
    Ok(BoundaryConstant { value, error: (value - pairwise_sum(&coarse)).abs(), edges: edges.len() })
}
