//! Mesh and chart representations, radial decomposition, level sets, and
//! surface quadrature.

pub mod chart;
pub mod components;
pub mod frame;
pub mod level;
pub mod mesh;
pub mod motion;
pub mod quadrature;
pub mod surface;

pub use chart::{ImmersionChart, ParamDomain};
pub use frame::{decompose_radial, TangentFrame};
pub use level::{level_polyline, LevelCurve, LevelPolyline, LevelSegment};
pub use mesh::{mesh_from_chart, MeshFile, SimplicialSurface};
pub use motion::RigidMotion;
pub use quadrature::{integrate, integrate_with_error, surface_measure, QuadratureOptions, RadialSweep, Region};
pub use surface::{Surface, SurfacePoint};
