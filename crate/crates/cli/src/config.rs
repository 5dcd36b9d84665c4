//! Run configuration: parsing with field paths, defaults, and validation.

use std::path::{Path, PathBuf};

use mingauge::catalog::{CatalogSurface, SurfaceSpec};
use mingauge::numeric::{linspace, logspace};
use mingauge::vector::AmbientVector;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_GRID_POINTS: usize = 24;
pub const DEFAULT_SAMPLES: usize = 50_000;
pub const MIN_SAMPLES: usize = 100;
/// Fraction of the admissible radius used as the default grid top.
pub const GRID_TOP_FRACTION: f64 = 0.999;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub count: Option<usize>,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSpec {
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub seed: u64,
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

impl Default for McSpec {
    fn default() -> Self {
        McSpec { samples: DEFAULT_SAMPLES, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative slack for `J(t)/t^{p-1}` to be nondecreasing.
    pub monotonicity: f64,
    /// Largest admissible relative residual of `pA(t) = tJ(t)`.
    pub density: f64,
    /// Slack below 1 for the shell-area ratio.
    pub lemma1: f64,
    /// Minimality residual `|H| * scale`.
    pub minimality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { monotonicity: 1e-3, density: 1e-2, lemma1: 1e-6, minimality: 1e-3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub surface: SurfaceSpec,
    #[serde(default)]
    pub base_points: Vec<Vec<f64>>,
    #[serde(rename = "R_grid", default)]
    pub r_grid: GridSpec,
    #[serde(default)]
    pub mc: McSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." { "config".to_string() } else { path };
            CliError::Config(format!("{path}: {}", e.into_inner()))
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks that do not need the built surface.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |path: &str, msg: String| Err(CliError::Config(format!("{path}: {msg}")));
        if let Some(min) = self.r_grid.min {
            if !(min > 0.0 && min.is_finite()) {
                return bad("R_grid.min", format!("must be positive, got {min}"));
            }
        }
        if let Some(max) = self.r_grid.max {
            if !(max > 0.0 && max.is_finite()) {
                return bad("R_grid.max", format!("must be positive, got {max}"));
            }
            if let Some(min) = self.r_grid.min {
                if max <= min {
                    return bad("R_grid.max", format!("must exceed R_grid.min = {min}, got {max}"));
                }
            }
        }
        if let Some(count) = self.r_grid.count {
            if count < 4 {
                return bad("R_grid.count", format!("must be at least 4, got {count}"));
            }
        }
        if self.mc.samples < MIN_SAMPLES {
            return bad("mc.samples", format!("must be at least {MIN_SAMPLES}, got {}", self.mc.samples));
        }
        for (i, b) in self.base_points.iter().enumerate() {
            if b.iter().any(|x| !x.is_finite()) {
                return bad(&format!("base_points[{i}]"), "coordinates must be finite".into());
            }
        }
        let t = &self.tolerances;
        for (name, v) in [("monotonicity", t.monotonicity), ("density", t.density), ("lemma1", t.lemma1), ("minimality", t.minimality)] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(&format!("tolerances.{name}"), format!("must be nonnegative, got {v}"));
            }
        }
        Ok(())
    }

    /// Configured base points, or the surface's default one.
    pub fn resolve_base_points(&self, surface: &CatalogSurface) -> Result<Vec<AmbientVector>, CliError> {
        let n = surface.mesh.ambient_dim();
        if self.base_points.is_empty() {
            return Ok(vec![surface.default_base_point.clone()]);
        }
        self.base_points
            .iter()
            .enumerate()
            .map(|(i, b)| {
                if b.len() != n {
                    Err(CliError::Config(format!("base_points[{i}]: expected {n} coordinates, got {}", b.len())))
                } else {
                    Ok(AmbientVector::new(b))
                }
            })
            .collect()
    }

    /// Radius grid about `b`: the configured range clipped to the largest
    /// ball about `b` inside the truncation (or the whole closed surface).
    pub fn radius_grid(&self, surface: &CatalogSurface, b: &AmbientVector) -> Result<(Vec<f64>, Option<String>), CliError> {
        let limit = match surface.mesh.truncation_radius() {
            Some(trunc) => trunc - b.norm(),
            None => surface.mesh.vertices().iter().map(|v| v.distance(b)).fold(0.0, f64::max),
        };
        if !(limit > 0.0) {
            return Err(CliError::Config(format!("base point {:?} lies outside the truncation ball", b.as_slice())));
        }
        let top = GRID_TOP_FRACTION * limit;
        let mut warning = None;
        let max = match self.r_grid.max {
            Some(m) if m > top => {
                warning = Some(format!("R_grid.max = {m} clipped to {top} (truncation)"));
                top
            }
            Some(m) => m,
            None => top,
        };
        let min = self.r_grid.min.unwrap_or(max / 100.0);
        if min >= max {
            return Err(CliError::Config(format!("R_grid.min: {min} is not below the usable maximum {max}")));
        }
        let count = self.r_grid.count.unwrap_or(DEFAULT_GRID_POINTS);
        let grid = match self.r_grid.spacing {
            Spacing::Log => logspace(min, max, count),
            Spacing::Linear => linspace(min, max, count),
        };
        Ok((grid, warning))
    }
}
