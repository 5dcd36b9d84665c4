//! Closed-form charts of the catalog surfaces.

use std::f64::consts::TAU;
use std::sync::Arc;

use crate::geom::chart::{ImmersionChart, ParamDomain};
use crate::numeric::bracketed_root;
use crate::vector::AmbientVector;

fn v3(x: f64, y: f64, z: f64) -> AmbientVector {
    AmbientVector::from([x, y, z])
}

/// Plane `z = h` in graded coordinates `(k sinh s, k sinh w)`.
pub fn plane(h: f64, k: f64, half_width: f64) -> ImmersionChart {
    ImmersionChart::new(
        "plane",
        ParamDomain::rect(-half_width, half_width, -half_width, half_width),
        3,
        Arc::new(move |s, w| v3(k * s.sinh(), k * w.sinh(), h)),
        Arc::new(move |s, w| (v3(k * s.cosh(), 0.0, 0.0), v3(0.0, k * w.cosh(), 0.0))),
    )
}

/// Plane `z = h` in polar coordinates over `inner <= rho <= outer`.
pub fn plane_annulus(h: f64, inner: f64, outer: f64) -> ImmersionChart {
    ImmersionChart::new(
        "plane",
        ParamDomain::periodic(inner, outer, 0.0, TAU),
        3,
        Arc::new(move |r, t| v3(r * t.cos(), r * t.sin(), h)),
        Arc::new(move |r, t| (v3(t.cos(), t.sin(), 0.0), v3(-r * t.sin(), r * t.cos(), 0.0))),
    )
}

/// Catenoid `(c cosh(u/c) cos v, c cosh(u/c) sin v, u)`.
pub fn catenoid(c: f64, u0: f64, u1: f64) -> ImmersionChart {
    ImmersionChart::new(
        "catenoid",
        ParamDomain::periodic(u0, u1, 0.0, TAU),
        3,
        Arc::new(move |u, v| {
            let r = c * (u / c).cosh();
            v3(r * v.cos(), r * v.sin(), u)
        }),
        Arc::new(move |u, v| {
            let (s, r) = ((u / c).sinh(), c * (u / c).cosh());
            (v3(s * v.cos(), s * v.sin(), 1.0), v3(-r * v.sin(), r * v.cos(), 0.0))
        }),
    )
}

/// Height `u` at which the catenoid reaches distance `radius` from the
/// origin.
pub fn catenoid_height(c: f64, radius: f64) -> f64 {
    let f = |u: f64| (c * (u / c).cosh()).hypot(u) - radius;
    let mut hi = c.max(1.0);
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    bracketed_root(f, 0.0, hi, 1e-14 * hi)
}

/// Helicoid `(s cos v, s sin v, b v)` over `|s| <= half_width`,
/// `|b v| <= half_width`.
pub fn helicoid(b: f64, half_width: f64) -> ImmersionChart {
    let vmax = half_width / b;
    ImmersionChart::new(
        "helicoid",
        ParamDomain::rect(-half_width, half_width, -vmax, vmax),
        3,
        Arc::new(move |s, v| v3(s * v.cos(), s * v.sin(), b * v)),
        Arc::new(move |s, v| (v3(v.cos(), v.sin(), 0.0), v3(-s * v.sin(), s * v.cos(), b))),
    )
}

/// Enneper's surface in graded coordinates `z = k sinh s + i k sinh w`.
pub fn enneper(k: f64, half_width: f64) -> ImmersionChart {
    ImmersionChart::new(
        "enneper",
        ParamDomain::rect(-half_width, half_width, -half_width, half_width),
        3,
        Arc::new(move |s, w| enneper_point(k * s.sinh(), k * w.sinh())),
        Arc::new(move |s, w| {
            let (u, v) = (k * s.sinh(), k * w.sinh());
            let (du, dv) = (k * s.cosh(), k * w.cosh());
            let xu = v3(1.0 - u * u + v * v, -2.0 * u * v, 2.0 * u);
            let xv = v3(2.0 * u * v, -1.0 - u * u + v * v, -2.0 * v);
            (xu.scaled(du), xv.scaled(dv))
        }),
    )
}

/// `Re (z - z^3/3, i (z + z^3/3), z^2)` at `z = u + i v`.
pub fn enneper_point(u: f64, v: f64) -> AmbientVector {
    v3(u - u * u * u / 3.0 + u * v * v, -v - u * u * v + v * v * v / 3.0, u * u - v * v)
}

/// Graph of `w = z^2` in `C^2 = R^4`, graded as the plane chart.
pub fn complex_parabola(k: f64, half_width: f64) -> ImmersionChart {
    ImmersionChart::new(
        "complex_parabola_r4",
        ParamDomain::rect(-half_width, half_width, -half_width, half_width),
        4,
        Arc::new(move |s, w| {
            let (u, v) = (k * s.sinh(), k * w.sinh());
            AmbientVector::from([u, v, u * u - v * v, 2.0 * u * v])
        }),
        Arc::new(move |s, w| {
            let (u, v) = (k * s.sinh(), k * w.sinh());
            let (du, dv) = (k * s.cosh(), k * w.cosh());
            (
                AmbientVector::from([du, 0.0, 2.0 * u * du, 2.0 * v * du]),
                AmbientVector::from([0.0, dv, -2.0 * v * dv, 2.0 * u * dv]),
            )
        }),
    )
}

/// Round sphere of radius `r` about the origin, latitude `|theta| <= theta_max`.
pub fn sphere_band(r: f64, theta_max: f64) -> ImmersionChart {
    ImmersionChart::new(
        "sphere",
        ParamDomain::periodic(-theta_max, theta_max, 0.0, TAU),
        3,
        Arc::new(move |t, p| v3(r * t.cos() * p.cos(), r * t.cos() * p.sin(), r * t.sin())),
        Arc::new(move |t, p| {
            (
                v3(-r * t.sin() * p.cos(), -r * t.sin() * p.sin(), r * t.cos()),
                v3(-r * t.cos() * p.sin(), r * t.cos() * p.cos(), 0.0),
            )
        }),
    )
}

/// Smallest distance from the origin over the boundary of a square chart,
/// sampled densely.
pub fn square_boundary_min(chart: &ImmersionChart, samples: usize) -> f64 {
    let d = chart.domain;
    let mut best = f64::INFINITY;
    for i in 0..=samples {
        let a = i as f64 / samples as f64;
        let (u, v) = (d.u0 + a * (d.u1 - d.u0), d.v0 + a * (d.v1 - d.v0));
        for (x, y) in [(u, d.v0), (u, d.v1), (d.u0, v), (d.u1, v)] {
            best = best.min(chart.eval(x, y).norm());
        }
    }
    best
}

/// Half-width `S` of a square domain such that the chart built by `make(S)`
/// stays outside the ball of `radius` along its boundary.
pub fn fit_square(make: impl Fn(f64) -> ImmersionChart, radius: f64) -> f64 {
    let reach = |s: f64| square_boundary_min(&make(s), 400);
    let mut hi = 1.0;
    while reach(hi) < radius {
        hi *= 1.5;
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if reach(mid) < radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(chart: &ImmersionChart, u: f64, v: f64) {
        let h = 1e-6;
        let (xu, xv) = chart.deriv(u, v);
        let fu = &chart.eval(u + h, v) - &chart.eval(u - h, v);
        let fv = &chart.eval(u, v + h) - &chart.eval(u, v - h);
        let scale = xu.norm().max(xv.norm());
        assert!((&fu.scaled(0.5 / h) - &xu).norm() < 1e-6 * scale, "{}", chart.name);
        assert!((&fv.scaled(0.5 / h) - &xv).norm() < 1e-6 * scale, "{}", chart.name);
    }

    #[test]
    fn derivatives_match_differences() {
        fd_check(&plane(1.0, 1.0, 3.0), 0.4, -1.1);
        fd_check(&plane_annulus(0.5, 1.0, 3.0), 1.7, 2.2);
        fd_check(&catenoid(1.3, -4.0, 4.0), 0.7, 1.9);
        fd_check(&helicoid(0.7, 10.0), -2.5, 3.1);
        fd_check(&enneper(1.0, 2.0), 0.9, -0.35);
        fd_check(&complex_parabola(1.0, 2.0), -0.6, 1.2);
        fd_check(&sphere_band(2.0, 1.4), 0.3, 4.0);
    }

    #[test]
    fn catenoid_origin_sample() {
        let x = catenoid(1.0, -1.0, 1.0).eval(0.0, 0.0);
        assert_eq!(x.as_slice(), &[1.0, 0.0, 0.0]);
        let u = catenoid_height(1.0, 200.0);
        assert!(((u.cosh()).hypot(u) - 200.0).abs() < 1e-9);
    }

    #[test]
    fn fitted_square_reaches_radius() {
        let s = fit_square(|s| enneper(1.0, s), 50.0);
        let m = square_boundary_min(&enneper(1.0, s), 400);
        assert!((50.0..50.5).contains(&m), "{m}");
    }
}
