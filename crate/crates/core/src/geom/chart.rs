use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::motion::RigidMotion;
use crate::vector::AmbientVector;

pub type ChartMap = Arc<dyn Fn(f64, f64) -> AmbientVector + Send + Sync>;
pub type ChartDerivative = Arc<dyn Fn(f64, f64) -> (AmbientVector, AmbientVector) + Send + Sync>;

/// Parameter rectangle `[u0, u1] x [v0, v1]`, optionally periodic in `v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamDomain {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
    pub periodic_v: bool,
}

impl ParamDomain {
    pub fn rect(u0: f64, u1: f64, v0: f64, v1: f64) -> Self {
        ParamDomain { u0, u1, v0, v1, periodic_v: false }
    }

    pub fn periodic(u0: f64, u1: f64, v0: f64, v1: f64) -> Self {
        ParamDomain { u0, u1, v0, v1, periodic_v: true }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        u >= self.u0 && u <= self.u1 && (self.periodic_v || (v >= self.v0 && v <= self.v1))
    }
}

/// An analytic parametric immersion with exact first derivatives.
#[derive(Clone)]
pub struct ImmersionChart {
    pub name: String,
    pub domain: ParamDomain,
    pub ambient_dim: usize,
    map: ChartMap,
    derivative: ChartDerivative,
}

impl fmt::Debug for ImmersionChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImmersionChart")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("ambient_dim", &self.ambient_dim)
            .finish_non_exhaustive()
    }
}

impl ImmersionChart {
    pub fn new(
        name: impl Into<String>,
        domain: ParamDomain,
        ambient_dim: usize,
        map: ChartMap,
        derivative: ChartDerivative,
    ) -> Self {
        ImmersionChart { name: name.into(), domain, ambient_dim, map, derivative }
    }

    pub fn eval(&self, u: f64, v: f64) -> AmbientVector {
        (self.map)(u, v)
    }

    /// `(dx/du, dx/dv)` at `(u, v)`.
    pub fn deriv(&self, u: f64, v: f64) -> (AmbientVector, AmbientVector) {
        (self.derivative)(u, v)
    }

    /// Coefficients `(E, F, G)` of the first fundamental form.
    pub fn first_fundamental_form(&self, u: f64, v: f64) -> (f64, f64, f64) {
        let (xu, xv) = self.deriv(u, v);
        (xu.norm_sq(), xu.dot(&xv), xv.norm_sq())
    }

    /// Errors when `det g` is negligible relative to `((E + G) / 2)^2`.
    pub fn check_regular(&self, u: f64, v: f64) -> Result<()> {
        let (e, f, g) = self.first_fundamental_form(u, v);
        let det = e * g - f * f;
        let scale = 0.25 * (e + g) * (e + g);
        if !(det > 1e-12 * scale) || !det.is_finite() {
            return Err(Error::DegenerateChart { u, v });
        }
        Ok(())
    }

    /// The chart composed with a similarity transform of the ambient space.
    pub fn transformed(&self, motion: &RigidMotion) -> ImmersionChart {
        let (m1, m2) = (motion.clone(), motion.clone());
        let (f, d) = (self.map.clone(), self.derivative.clone());
        ImmersionChart {
            name: self.name.clone(),
            domain: self.domain,
            ambient_dim: self.ambient_dim,
            map: Arc::new(move |u, v| m1.apply_point(&f(u, v))),
            derivative: Arc::new(move |u, v| {
                let (xu, xv) = d(u, v);
                (m2.apply_vector(&xu), m2.apply_vector(&xv))
            }),
        }
    }
}
