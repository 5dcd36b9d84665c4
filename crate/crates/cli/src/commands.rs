//! `catalog` and `crofton` subcommands.

use mingauge::catalog::{catalog_entries, CatalogEntry, TargetSource};
use mingauge::integral_geom::{crofton_verify, spherical_set, CroftonResult, SphericalSet};
use serde::Serialize;

use crate::CliError;

fn target(v: Option<f64>) -> String {
    match v {
        Some(x) => {
            let over_pi = x / std::f64::consts::PI;
            if (over_pi - over_pi.round()).abs() < 1e-12 {
                format!("{}pi", over_pi.round())
            } else {
                format!("{x:.6}")
            }
        }
        None => "-".into(),
    }
}

fn source(s: TargetSource) -> &'static str {
    match s {
        TargetSource::Published => "published",
        TargetSource::Derived => "derived only",
        TargetSource::None => "none",
    }
}

fn params(e: &CatalogEntry) -> String {
    e.params
        .iter()
        .map(|p| match p.default {
            Some(d) => format!("{}={d}", p.name),
            None => format!("{}?", p.name),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Plain-text table of the catalog, one row per surface in stable order.
pub fn catalog_table() -> String {
    let rows: Vec<[String; 8]> = catalog_entries()
        .iter()
        .map(|e| {
            [
                e.name.to_string(),
                e.ambient_dim.to_string(),
                if e.minimal { "minimal".into() } else { "non-minimal control".into() },
                target(e.target_v),
                target(e.target_q),
                e.target_ends.map(|l| l.to_string()).unwrap_or_else(|| "-".into()),
                source(e.target_source).into(),
                params(e),
            ]
        })
        .collect();
    let header = ["surface", "n", "kind", "V", "Q", "ends", "targets", "params"].map(String::from);
    let mut widths = header.clone().map(|h| h.len());
    for r in &rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |r: &[String; 8]| {
        r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
    };
    let mut out = vec![line(&header)];
    out.extend(rows.iter().map(line));
    let mut text = out.join("\n");
    text.push('\n');
    for e in catalog_entries() {
        text.push_str(&format!("\n{}: {}", e.name, e.note));
    }
    text.push('\n');
    text
}

/// The catalog as JSON.
pub fn catalog_json() -> String {
    serde_json::to_string_pretty(&catalog_entries()).expect("catalog entries serialize")
}

#[derive(Clone, Debug, Serialize)]
pub struct CroftonOutput {
    pub set: SphericalSet,
    pub resolution: usize,
    pub seed: u64,
    /// Closed-form area of the smooth set, for reference.
    pub smooth_area: f64,
    #[serde(flatten)]
    pub result: CroftonResult,
}

pub fn crofton(n: usize, p: usize, set: &str, samples: usize, seed: u64, resolution: usize) -> Result<CroftonOutput, CliError> {
    let kind: SphericalSet = set.parse().map_err(|e: mingauge::Error| CliError::Config(format!("--set: {e}")))?;
    if kind.ambient_dim() != n {
        return Err(CliError::Config(format!("--n: set `{set}` lives in R^{}, got --n {n}", kind.ambient_dim())));
    }
    if p != 2 {
        return Err(CliError::Config(format!("--p: only 2-dimensional sets are built in, got {p}")));
    }
    if samples < crate::config::MIN_SAMPLES {
        return Err(CliError::Config(format!("--samples: must be at least {}", crate::config::MIN_SAMPLES)));
    }
    let mesh = spherical_set(kind, resolution).map_err(|e| CliError::Config(format!("--resolution: {e}")))?;
    let result = crofton_verify(&mesh, p, None, samples, seed)?;
    Ok(CroftonOutput { set: kind, resolution, seed, smooth_area: kind.area(), result })
}
