//! Invariant estimators against closed forms and symmetry.

use std::f64::consts::PI;

use mingauge::catalog::{build_surface, charts, SurfaceSpec};
use mingauge::geom::frame::{decompose_radial, TangentFrame};
use mingauge::geom::{level_polyline, RigidMotion, Surface};
use mingauge::invariants::{
    boundary_constant, check_density_identity, check_theorem1, flux_profile, projective_volume, q_invariant,
};
use mingauge::numeric::logspace;
use mingauge::AmbientVector;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn grid(trunc: f64, a: &AmbientVector, points: usize) -> Vec<f64> {
    let top = 0.999 * (trunc - a.norm());
    logspace(top / 100.0, top, points)
}

fn vec3() -> impl Strategy<Value = AmbientVector> {
    prop::array::uniform3(-10.0f64..10.0).prop_map(AmbientVector::from)
}

proptest! {
    #[test]
    fn radial_split_is_pythagorean(x in vec3(), a in vec3(), e1 in vec3(), e2 in vec3()) {
        let frame = TangentFrame::from_spanning(&[e1, e2]);
        prop_assume!(frame.is_some());
        let frame = frame.unwrap();
        let (t, n) = decompose_radial(&x, &frame, &a).unwrap();
        let r2 = (&x - &a).norm_sq();
        prop_assert!((t.norm_sq() + n.norm_sq() - r2).abs() <= 1e-10 * r2.max(1.0));
        // the normal part is orthogonal to the tangent plane
        for e in frame.basis() {
            prop_assert!(n.dot(e).abs() <= 1e-9 * r2.sqrt().max(1.0));
        }
    }
}

#[test]
fn plane_flux_matches_circle_oracle() {
    let h = 1.5;
    let s = build_surface(&SurfaceSpec::new("plane").with("h", h).with("R_max", 60.0)).unwrap();
    let a = AmbientVector::zeros(3);
    let surf = s.surface();
    let levels = logspace(2.0, 50.0, 12);
    let f = flux_profile(&surf, &a, &levels).unwrap();
    for (k, &t) in f.levels.iter().enumerate() {
        // level t: circle of radius rho = sqrt(t^2 - h^2) with |x^T|/|x| = rho/t, so J/t = 2 pi rho^2/t^2
        let rho2 = t * t - h * h;
        let oracle = 2.0 * PI * rho2 / (t * t);
        assert!(rel(f.normalized[k], oracle) <= 1e-4, "t {t}: {} vs {oracle}", f.normalized[k]);
        let len = level_polyline(&surf, &a, t).length(&surf);
        assert!(rel(len, 2.0 * PI * rho2.sqrt()) <= 1e-4, "t {t}: length {len}");
    }
}

#[test]
fn catenoid_volume_does_not_depend_on_base_point() {
    let s = build_surface(&SurfaceSpec::new("catenoid")).unwrap();
    let surf = s.surface();
    let trunc = s.mesh.truncation_radius().unwrap();
    let mut values = Vec::new();
    for a in [AmbientVector::zeros(3), AmbientVector::from([0.5, 0.3, 0.2])] {
        let v = projective_volume(&surf, &a, &grid(trunc, &a, 24)).unwrap();
        values.push(v.estimate.value);
    }
    assert!(rel(values[0], values[1]) <= 0.01, "{values:?}");
    assert!(rel(values[1], 4.0 * PI) <= 0.03, "{values:?}");
}

#[test]
fn q_is_invariant_under_similarities() {
    let s = build_surface(&SurfaceSpec::new("catenoid").with("R_max", 40.0)).unwrap();
    let a = AmbientVector::from([0.3, -0.2, 0.4]);
    let r = 25.0;
    let base = q_invariant(&s.surface(), &a, r, None).unwrap().value;
    let motions = [
        RigidMotion::plane_rotation(3, 0, 2, 0.7, AmbientVector::from([5.0, -3.0, 2.0])),
        RigidMotion::homothety(3, 3.5),
        RigidMotion::plane_rotation(3, 1, 2, -1.1, AmbientVector::from([0.0, 1.0, 0.0])).then(&RigidMotion::homothety(3, 0.25)),
    ];
    for m in &motions {
        let mesh = s.mesh.transformed(m);
        let chart = s.chart.transformed(m);
        let moved = Surface::curved(&mesh, &chart).unwrap();
        let q = q_invariant(&moved, &m.apply_point(&a), m.scale * r, None).unwrap().value;
        assert!(rel(q, base) <= 1e-9, "{q} vs {base}");
        let f0 = flux_profile(&s.surface(), &a, &[10.0]).unwrap().normalized[0];
        let f1 = flux_profile(&moved, &m.apply_point(&a), &[10.0 * m.scale]).unwrap().normalized[0];
        assert!(rel(f1, f0) <= 1e-9, "{f1} vs {f0}");
    }
}

#[test]
fn boundary_constant_of_cut_catenoid_matches_circle_integral() {
    let u0 = -1.0;
    let s = build_surface(&SurfaceSpec::new("catenoid").with("u_min", u0)).unwrap();
    let a = AmbientVector::zeros(3);
    let c = boundary_constant(&s.surface(), &a).unwrap();
    // bottom circle: radius r = cosh u0, outward conormal -x_u/|x_u|,
    // <x, x_u> = r sinh u0 + u0, |x_u| = cosh u0
    let r = u0.cosh();
    let oracle = -2.0 * PI * r * (r * u0.sinh() + u0) / (u0.cosh() * (r * r + u0 * u0));
    assert!(rel(c.value, oracle) <= 1e-6, "{} vs {oracle}", c.value);
}

#[test]
fn relation_holds_on_full_and_cut_catenoids() {
    for spec in [SurfaceSpec::new("catenoid"), SurfaceSpec::new("catenoid").with("u_min", -1.0)] {
        let s = build_surface(&spec).unwrap();
        let surf = s.surface();
        let a = AmbientVector::zeros(3);
        let g = grid(s.mesh.truncation_radius().unwrap(), &a, 24);
        let r = *g.last().unwrap();
        let v = projective_volume(&surf, &a, &g).unwrap();
        let q = q_invariant(&surf, &a, r, Some(&v)).unwrap();
        let c = boundary_constant(&surf, &a).unwrap();
        let t = check_theorem1((v.estimate.value, v.estimate.error), (q.value, q.error), (c.value, c.error), 2);
        let residual = (t.lhs - t.rhs).abs() / t.rhs.abs();
        assert!(residual <= 0.02, "{:?}: p Q {} vs V + c {}", spec.params, t.lhs, t.rhs);
    }
}

#[test]
fn density_identity_skips_balls_containing_boundary() {
    let s = build_surface(&SurfaceSpec::new("catenoid").with("u_min", -1.0)).unwrap();
    let a = AmbientVector::zeros(3);
    assert!(check_density_identity(&s.surface(), &a, &[5.0, 10.0]).is_err());
}

#[test]
fn catenoid_neck_level_has_two_circles() {
    // |x| = t on the unit catenoid is two circles at heights +-u with cosh^2 u + u^2 = t^2
    let chart = charts::catenoid(1.0, -4.0, 4.0);
    let mesh = mingauge::geom::mesh_from_chart(&chart, (161, 96)).unwrap();
    let surf = Surface::curved(&mesh, &chart).unwrap();
    let t = 3.0;
    let u = charts::catenoid_height(1.0, t);
    let len = level_polyline(&surf, &AmbientVector::zeros(3), t).length(&surf);
    assert!(rel(len, 2.0 * 2.0 * PI * u.cosh()) <= 1e-5, "{len}");
}
