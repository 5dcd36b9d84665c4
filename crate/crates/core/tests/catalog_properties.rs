//! Catalog surfaces against independent constructions.

use std::f64::consts::{PI, TAU};

use mingauge::catalog::{check_periods, weierstrass_immerse, Contour, WeierstrassData};
use mingauge::catalog::{build_surface, catalog_entries, charts, interior_grid, verify_minimality, Rational, SurfaceSpec};
use mingauge::geom::chart::ImmersionChart;
use mingauge::Error;
use nalgebra::{Matrix3, Matrix3xX, Vector3};
use num_complex::Complex64;

fn to_na(x: &mingauge::AmbientVector) -> Vector3<f64> {
    Vector3::new(x[0], x[1], x[2])
}

/// Best orthogonal map plus translation taking `a` onto `b`; returns the
/// worst residual after alignment.
fn procrustes_residual(a: &[Vector3<f64>], b: &[Vector3<f64>]) -> f64 {
    let n = a.len() as f64;
    let ca = a.iter().sum::<Vector3<f64>>() / n;
    let cb = b.iter().sum::<Vector3<f64>>() / n;
    let pa = Matrix3xX::from_columns(&a.iter().map(|x| x - ca).collect::<Vec<_>>());
    let pb = Matrix3xX::from_columns(&b.iter().map(|x| x - cb).collect::<Vec<_>>());
    let h: Matrix3<f64> = &pa * pb.transpose();
    let svd = h.svd(true, true);
    let rot = svd.v_t.unwrap().transpose() * svd.u.unwrap().transpose();
    a.iter().zip(b).map(|(x, y)| (rot * (x - ca) + cb - y).norm()).fold(0.0, f64::max)
}

#[test]
fn weierstrass_catenoid_is_congruent_to_neck_two_catenoid() {
    let data = WeierstrassData::catenoid(0.2, 5.0);
    let w = weierstrass_immerse(&data, 32).unwrap();
    let direct = charts::catenoid(2.0, -4.0, 4.0);
    let mut a = Vec::new();
    let mut b = Vec::new();
    // z = exp(s + i theta): height 2 s, angle theta
    for i in 0..9 {
        let s = -1.2 + 0.3 * i as f64;
        for j in 0..12 {
            let theta = TAU * j as f64 / 12.0;
            a.push(to_na(&w.eval(s, theta)));
            b.push(to_na(&direct.eval(2.0 * s, theta)));
        }
    }
    let residual = procrustes_residual(&a, &b);
    assert!(residual < 1e-6, "residual {residual:e}");
}

#[test]
fn catenoid_data_has_no_real_period() {
    let data = WeierstrassData::catenoid(0.5, 2.0);
    let loops = [
        Contour::Circle { center: Complex64::new(0.0, 0.0), radius: 0.7 },
        Contour::Circle { center: Complex64::new(0.0, 0.0), radius: 1.5 },
    ];
    for rep in check_periods(&data, &loops).unwrap() {
        assert!(rep.well_defined, "real period {:e}", rep.max_real);
        // the vertical flux is imaginary: 2 * 2 pi i
        assert!((rep.complex[2].im.abs() - 4.0 * PI).abs() < 1e-6, "{:?}", rep.complex[2]);
    }
}

#[test]
fn nonzero_period_is_rejected() {
    // g = 1/z, h = 1: Phi_1 = 0, Phi_2 = 2i dz/z picks up a real period -4 pi
    let mut data = WeierstrassData::catenoid(0.5, 2.0);
    data.h = Rational::constant(1.0);
    data.g = Rational::monomial(1.0, -1);
    match weierstrass_immerse(&data, 8) {
        Err(Error::NonzeroPeriod { period, .. }) => assert!((period.abs() - 4.0 * PI).abs() < 1e-6),
        other => panic!("expected a period error, got {other:?}"),
    }
}

#[test]
fn weierstrass_enneper_matches_direct_formula() {
    let w = weierstrass_immerse(&WeierstrassData::enneper(1.5), 16).unwrap();
    for &(u, v) in &[(0.0, 0.0), (1.4, -1.1), (-0.6, 0.9), (0.25, 1.5)] {
        let x = w.eval(u, v);
        let (x1, x2, x3) = (u - u.powi(3) / 3.0 + u * v * v, -v - u * u * v + v.powi(3) / 3.0, u * u - v * v);
        assert!((x[0] - x1).abs() + (x[1] - x2).abs() + (x[2] - x3).abs() < 1e-9, "at ({u}, {v})");
    }
}

fn assert_conformal(chart: &ImmersionChart, tol: f64) {
    for (u, v) in interior_grid(chart, 7, 7) {
        let (e, f, g) = chart.first_fundamental_form(u, v);
        let scale = e.max(g);
        assert!((e - g).abs() <= tol * scale && f.abs() <= tol * scale, "{} at ({u}, {v}): E {e} F {f} G {g}", chart.name);
    }
}

#[test]
fn weierstrass_charts_are_conformal() {
    assert_conformal(&weierstrass_immerse(&WeierstrassData::enneper(2.0), 8).unwrap(), 1e-12);
    assert_conformal(&weierstrass_immerse(&WeierstrassData::catenoid(0.3, 3.0), 8).unwrap(), 1e-12);
}

#[test]
fn catalog_charts_are_minimal_and_the_sphere_is_not() {
    for name in ["plane", "catenoid", "helicoid", "enneper", "complex_parabola_r4"] {
        let s = build_surface(&SurfaceSpec::new(name).with("R_max", 20.0)).unwrap();
        let rep = verify_minimality(&s.chart, &interior_grid(&s.chart, 9, 9), 1e-3).unwrap();
        assert!(rep.pass, "{name}: scaled |H| {:e}", rep.scaled);
        assert!(s.minimal);
    }
    let sphere = build_surface(&SurfaceSpec::new("sphere").with("r", 2.0)).unwrap();
    let rep = verify_minimality(&sphere.chart, &interior_grid(&sphere.chart, 9, 9), 1e-3).unwrap();
    assert!(!rep.pass);
    // |H| = 1/r on the round sphere
    assert!((rep.max_mean_curvature - 0.5).abs() < 1e-6, "{}", rep.max_mean_curvature);
}

#[test]
fn truncation_radius_bounds_the_outer_boundary() {
    for name in ["plane", "catenoid", "enneper", "complex_parabola_r4"] {
        let s = build_surface(&SurfaceSpec::new(name).with("R_max", 40.0)).unwrap();
        let t = s.mesh.truncation_radius().unwrap();
        assert!(t >= 40.0 * 0.999, "{name}: truncation {t}");
        // with no compact boundary, every boundary edge comes from truncation
        assert!(s.mesh.inner_boundary_edges().is_empty(), "{name}");
    }
    let cut = build_surface(&SurfaceSpec::new("catenoid").with("R_max", 40.0).with("u_min", -1.0)).unwrap();
    assert!(!cut.mesh.inner_boundary_edges().is_empty());
}

#[test]
fn catalog_targets_satisfy_the_volume_relation() {
    // at a base point off a minimal surface with no inner boundary, p Q = V
    for e in catalog_entries() {
        if let (Some(v), Some(q)) = (e.target_v, e.target_q) {
            assert!((2.0 * q - v).abs() < 1e-12, "{}", e.name);
        }
    }
}

#[test]
fn bad_parameters_are_rejected() {
    assert!(matches!(build_surface(&SurfaceSpec::new("torus")), Err(Error::UnknownSurface(_))));
    assert!(build_surface(&SurfaceSpec::new("catenoid").with("R_max", 0.5)).is_err());
    assert!(build_surface(&SurfaceSpec::new("plane").with("h", 3.0).with("R_max", 2.0)).is_err());
    assert!(build_surface(&SurfaceSpec::new("enneper").with("resolution", 1.5)).is_err());
    assert!(build_surface(&SurfaceSpec::new("catenoid").with("u_min", 1e6)).is_err());
}
