//! Minimal immersions from Weierstrass data `(h, g dz)` on planar domains.

use std::sync::Arc;

use num_complex::Complex64;

use crate::catalog::rational::Rational;
use crate::error::{Error, Result};
use crate::geom::chart::{ImmersionChart, ParamDomain};
use crate::numeric::gauss_legendre;
use crate::vector::AmbientVector;

/// Real periods below this are treated as zero.
pub const PERIOD_TOLERANCE: f64 = 1e-8;

const NODES_PER_PANEL: usize = 8;
const CONTOUR_POINTS: usize = 512;

/// Parameter domain of the data.
#[derive(Clone, Debug, PartialEq)]
pub enum WeierstrassDomain {
    /// `z = u + i v` over a rectangle; paths are straight segments.
    Rect { u0: f64, u1: f64, v0: f64, v1: f64 },
    /// `z = center + exp(s + i theta)` with `r0 <= |z - center| <= r1`;
    /// paths run along the arc through the base point, then radially.
    Annulus { center: Complex64, r0: f64, r1: f64 },
}

/// Weierstrass data: `Phi = ((1 - h^2) g, i (1 + h^2) g, 2 h g) dz`.
#[derive(Clone, Debug)]
pub struct WeierstrassData {
    pub h: Rational,
    pub g: Rational,
    pub base_point: Complex64,
    pub domain: WeierstrassDomain,
    pub punctures: Vec<Complex64>,
    /// Minimal admissible distance between a path and a puncture.
    pub clearance: f64,
}

#[derive(Clone, Debug)]
pub enum Contour {
    Circle { center: Complex64, radius: f64 },
}

/// Complex period of `Phi` around one loop.
#[derive(Clone, Debug)]
pub struct PeriodReport {
    pub complex: [Complex64; 3],
    pub real: [f64; 3],
    pub max_real: f64,
    pub well_defined: bool,
}

/// Conformal metric density `|g| (1 + |h|^2)` sampled over the domain.
#[derive(Clone, Debug)]
pub struct MetricReport {
    pub min_density: f64,
    pub max_density: f64,
    pub regular: bool,
}

impl WeierstrassData {
    /// `h = z`, `g = 1` on a square: the Enneper surface.
    pub fn enneper(half_width: f64) -> Self {
        WeierstrassData {
            h: Rational::monomial(1.0, 1),
            g: Rational::constant(1.0),
            base_point: Complex64::new(0.0, 0.0),
            domain: WeierstrassDomain::Rect { u0: -half_width, u1: half_width, v0: -half_width, v1: half_width },
            punctures: Vec::new(),
            clearance: 1e-3,
        }
    }

    /// `h = z`, `g = z^-2` on an annulus about the puncture at 0: a catenoid
    /// with neck radius 2, rotated by pi about the vertical axis.
    pub fn catenoid(r0: f64, r1: f64) -> Self {
        WeierstrassData {
            h: Rational::monomial(1.0, 1),
            g: Rational::monomial(1.0, -2),
            base_point: Complex64::new(1.0, 0.0),
            domain: WeierstrassDomain::Annulus { center: Complex64::new(0.0, 0.0), r0, r1 },
            punctures: vec![Complex64::new(0.0, 0.0)],
            clearance: 1e-3,
        }
    }

    /// `h = 0`, `g = 1`: the coordinate plane.
    pub fn plane(half_width: f64) -> Self {
        WeierstrassData { h: Rational::constant(0.0), ..Self::enneper(half_width) }
    }

    pub fn phi(&self, z: Complex64) -> [Complex64; 3] {
        let h = self.h.eval(z);
        let g = self.g.eval(z);
        let i = Complex64::i();
        [(1.0 - h * h) * g, i * (1.0 + h * h) * g, 2.0 * h * g]
    }

    pub fn metric_density(&self, z: Complex64) -> f64 {
        let h = self.h.eval(z);
        self.g.eval(z).norm() * (1.0 + h.norm_sqr())
    }

    fn check_clear(&self, z: Complex64) -> Result<()> {
        for p in &self.punctures {
            let d = (z - p).norm();
            if d < self.clearance {
                return Err(Error::PathSingularity { puncture: format!("{p}"), clearance: d });
            }
        }
        Ok(())
    }

    /// Checks every puncture against a segment.
    fn check_segment(&self, a: Complex64, b: Complex64) -> Result<()> {
        for p in &self.punctures {
            let d = b - a;
            let s = if d.norm_sqr() > 0.0 { (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0) } else { 0.0 };
            let dist = (a + d * s - p).norm();
            if dist < self.clearance {
                return Err(Error::PathSingularity { puncture: format!("{p}"), clearance: dist });
            }
        }
        Ok(())
    }

    /// `int Phi` along `gamma` with derivative `dgamma` over `[0, 1]`.
    fn path_integral<F, D>(&self, gamma: F, dgamma: D, panels: usize) -> [Complex64; 3]
    where
        F: Fn(f64) -> Complex64,
        D: Fn(f64) -> Complex64,
    {
        let rule = gauss_legendre(NODES_PER_PANEL);
        let mut acc = [Complex64::new(0.0, 0.0); 3];
        let width = 1.0 / panels as f64;
        for k in 0..panels {
            for (x, w) in &rule {
                let s = (k as f64 + x) * width;
                let dz = dgamma(s) * (w * width);
                let phi = self.phi(gamma(s));
                for c in 0..3 {
                    acc[c] += phi[c] * dz;
                }
            }
        }
        acc
    }

    /// `Re int_{base}^{z} Phi` along the domain's canonical path.
    pub fn integrate_to(&self, z: Complex64, panels: usize) -> Result<AmbientVector> {
        let panels = panels.max(1);
        match &self.domain {
            WeierstrassDomain::Rect { .. } => {
                self.check_segment(self.base_point, z)?;
                Ok(real_part(self.straight(self.base_point, z, panels)))
            }
            WeierstrassDomain::Annulus { center, .. } => {
                let w0 = (self.base_point - center).ln();
                let w = (z - center).ln();
                let mut theta = w.im;
                // follow the shorter arc
                while theta - w0.im > std::f64::consts::PI {
                    theta -= std::f64::consts::TAU;
                }
                while theta - w0.im < -std::f64::consts::PI {
                    theta += std::f64::consts::TAU;
                }
                self.check_clear(z)?;
                Ok(real_part(self.log_polar_path(*center, w0, Complex64::new(w.re, theta), panels)))
            }
        }
    }

    fn straight(&self, a: Complex64, b: Complex64, panels: usize) -> [Complex64; 3] {
        self.path_integral(|s| a + (b - a) * s, |_| b - a, panels)
    }

    /// Arc at `Re w0` from `Im w0` to `Im w`, then radial to `Re w`, in the
    /// log-polar coordinate `z = center + exp(w)`.
    fn log_polar_path(&self, center: Complex64, w0: Complex64, w: Complex64, panels: usize) -> [Complex64; 3] {
        let i = Complex64::i();
        let arc = self.path_integral(
            |s| center + Complex64::new(w0.re, w0.im + s * (w.im - w0.im)).exp(),
            |s| i * (w.im - w0.im) * Complex64::new(w0.re, w0.im + s * (w.im - w0.im)).exp(),
            panels,
        );
        let radial = self.path_integral(
            |s| center + Complex64::new(w0.re + s * (w.re - w0.re), w.im).exp(),
            |s| (w.re - w0.re) * Complex64::new(w0.re + s * (w.re - w0.re), w.im).exp(),
            panels,
        );
        [arc[0] + radial[0], arc[1] + radial[1], arc[2] + radial[2]]
    }

    /// Samples the metric density on a grid over the domain, skipping
    /// points within the clearance of a puncture. The immersion is regular
    /// where the density is finite and positive.
    pub fn check_metric(&self, samples: usize) -> MetricReport {
        let n = samples.max(2);
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        let mut regular = true;
        for i in 0..n {
            for j in 0..n {
                let (a, b) = ((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
                let z = match &self.domain {
                    WeierstrassDomain::Rect { u0, u1, v0, v1 } => Complex64::new(u0 + a * (u1 - u0), v0 + b * (v1 - v0)),
                    WeierstrassDomain::Annulus { center, r0, r1 } => {
                        let s = r0.ln() + a * (r1.ln() - r0.ln());
                        center + Complex64::from_polar(s.exp(), std::f64::consts::TAU * b)
                    }
                };
                if self.punctures.iter().any(|p| (z - p).norm() < self.clearance) {
                    continue;
                }
                let d = self.metric_density(z);
                regular &= d.is_finite() && d > 0.0;
                lo = lo.min(d);
                hi = hi.max(d);
            }
        }
        MetricReport { min_density: lo, max_density: hi, regular }
    }
}

fn real_part(v: [Complex64; 3]) -> AmbientVector {
    AmbientVector::from([v[0].re, v[1].re, v[2].re])
}

/// Complex periods of `Phi` around each loop.
pub fn check_periods(data: &WeierstrassData, loops: &[Contour]) -> Result<Vec<PeriodReport>> {
    let mut out = Vec::with_capacity(loops.len());
    for contour in loops {
        let Contour::Circle { center, radius } = contour;
        for p in &data.punctures {
            let d = ((p - center).norm() - radius).abs();
            if d < data.clearance {
                return Err(Error::PathSingularity { puncture: format!("{p}"), clearance: d });
            }
        }
        // trapezoid rule; spectrally accurate for analytic periodic integrands
        let mut acc = [Complex64::new(0.0, 0.0); 3];
        let dt = std::f64::consts::TAU / CONTOUR_POINTS as f64;
        for k in 0..CONTOUR_POINTS {
            let e = Complex64::from_polar(*radius, k as f64 * dt);
            let dz = Complex64::i() * e * dt;
            let phi = data.phi(center + e);
            for c in 0..3 {
                acc[c] += phi[c] * dz;
            }
        }
        let real = [acc[0].re, acc[1].re, acc[2].re];
        let max_real = real.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        out.push(PeriodReport { complex: acc, real, max_real, well_defined: max_real <= PERIOD_TOLERANCE });
    }
    Ok(out)
}

/// Builds the chart `X = Re int Phi`, with `resolution` Gauss panels per
/// path leg. Annular domains are first checked for real periods.
pub fn weierstrass_immerse(data: &WeierstrassData, resolution: usize) -> Result<ImmersionChart> {
    let panels = resolution.max(1);
    match data.domain.clone() {
        WeierstrassDomain::Rect { u0, u1, v0, v1 } => {
            // straight paths from the base point stay in the convex rectangle
            for p in &data.punctures {
                let du = (u0 - p.re).max(p.re - u1).max(0.0);
                let dv = (v0 - p.im).max(p.im - v1).max(0.0);
                let d = du.hypot(dv);
                if d < data.clearance {
                    return Err(Error::PathSingularity { puncture: format!("{p}"), clearance: d });
                }
            }
            let (d1, d2) = (data.clone(), data.clone());
            Ok(ImmersionChart::new(
                "weierstrass",
                ParamDomain::rect(u0, u1, v0, v1),
                3,
                Arc::new(move |u, v| real_part(d1.straight(d1.base_point, Complex64::new(u, v), panels))),
                Arc::new(move |u, v| {
                    let phi = d2.phi(Complex64::new(u, v));
                    let xu = AmbientVector::from([phi[0].re, phi[1].re, phi[2].re]);
                    let xv = AmbientVector::from([-phi[0].im, -phi[1].im, -phi[2].im]);
                    (xu, xv)
                }),
            ))
        }
        WeierstrassDomain::Annulus { center, r0, r1 } => {
            for p in &data.punctures {
                let rho = (p - center).norm();
                if rho > r0 - data.clearance && rho < r1 + data.clearance {
                    return Err(Error::PathSingularity { puncture: format!("{p}"), clearance: (rho - r0).abs().min((rho - r1).abs()) });
                }
            }
            let w0 = (data.base_point - center).ln();
            let reports = check_periods(data, &[Contour::Circle { center, radius: w0.re.exp() }])?;
            if !reports[0].well_defined {
                return Err(Error::NonzeroPeriod { loop_index: 0, period: reports[0].max_real });
            }
            let (d1, d2) = (data.clone(), data.clone());
            Ok(ImmersionChart::new(
                "weierstrass",
                ParamDomain::periodic(r0.ln(), r1.ln(), w0.im, w0.im + std::f64::consts::TAU),
                3,
                Arc::new(move |s, theta| real_part(d1.log_polar_path(center, w0, Complex64::new(s, theta), panels))),
                Arc::new(move |s, theta| {
                    let e = Complex64::new(s, theta).exp();
                    let phi = d2.phi(center + e);
                    let xs: Vec<Complex64> = phi.iter().map(|f| f * e).collect();
                    let xu = AmbientVector::from([xs[0].re, xs[1].re, xs[2].re]);
                    let xv = AmbientVector::from([-xs[0].im, -xs[1].im, -xs[2].im]);
                    (xu, xv)
                }),
            ))
        }
    }
}
