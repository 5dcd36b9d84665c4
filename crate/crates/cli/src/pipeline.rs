//! The report pipeline: builds the surface, runs every estimate and check
//! for each base point, and writes report.json, sweeps.csv, and run.log.

use std::path::{Path, PathBuf};
use std::time::Instant;

use mingauge::catalog::{build_surface, catalog_entries, interior_grid, verify_minimality, CatalogEntry, CatalogSurface};
use mingauge::ends::{check_theorem2, ends_estimate, EndCount, TRUNCATION_MARGIN};
use mingauge::integral_geom::{
    check_corollary3, check_lemma2, corollary4_check, counting_sweep, CountingEstimate,
};
use mingauge::invariants::{
    boundary_constant, check_corollary1_point, check_density_identity, check_lemma1, check_monotonicity,
    check_theorem1, flux_profile, on_surface_invariants, projective_volume, q_invariant, InvariantEstimate,
    VolumeEstimate,
};
use mingauge::numeric::logspace;
use mingauge::vector::AmbientVector;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::CliError;

pub const SCHEMA_VERSION: &str = "1.0";
const MINIMALITY_GRID: usize = 12;
/// A base point closer than this (relative to the grid scale) counts as on the surface.
const ON_SURFACE: f64 = 1e-9;
/// Fraction of the farthest vertex used as the end-count top on closed surfaces.
const GRID_CLOSED_FRACTION: f64 = 0.999;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
    Report,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckEntry {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_point: Option<usize>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub detail: Value,
}

impl CheckEntry {
    fn counts_as_failure(&self) -> bool {
        matches!(self.status, Status::Fail | Status::Error)
    }
}

#[derive(Default)]
struct Checks {
    entries: Vec<CheckEntry>,
}

impl Checks {
    /// Records `outcome`: `None` for `pass` marks a report-only entry;
    /// `applicable = false` keeps the detail but never fails the run.
    fn record<T: Serialize>(
        &mut self,
        name: &str,
        base_point: Option<usize>,
        outcome: mingauge::Result<T>,
        pass: impl Fn(&T) -> Option<bool>,
        applicable: Result<(), String>,
    ) {
        let entry = match outcome {
            Ok(v) => {
                let detail = serde_json::to_value(&v).unwrap_or(Value::Null);
                match (applicable, pass(&v)) {
                    (Err(reason), _) => CheckEntry { name: name.into(), base_point, status: Status::NotApplicable, reason: Some(reason), detail },
                    (Ok(()), None) => CheckEntry { name: name.into(), base_point, status: Status::Report, reason: None, detail },
                    (Ok(()), Some(ok)) => CheckEntry {
                        name: name.into(),
                        base_point,
                        status: if ok { Status::Pass } else { Status::Fail },
                        reason: None,
                        detail,
                    },
                }
            }
            Err(e @ (mingauge::Error::NotApplicable(_) | mingauge::Error::Precondition(_))) => CheckEntry {
                name: name.into(),
                base_point,
                status: Status::NotApplicable,
                reason: Some(e.to_string()),
                detail: Value::Null,
            },
            Err(e) => CheckEntry { name: name.into(), base_point, status: Status::Error, reason: Some(e.to_string()), detail: Value::Null },
        };
        self.entries.push(entry);
    }

    fn skip(&mut self, name: &str, base_point: Option<usize>, reason: &str) {
        self.entries.push(CheckEntry {
            name: name.into(),
            base_point,
            status: Status::NotApplicable,
            reason: Some(reason.into()),
            detail: Value::Null,
        });
    }
}

/// One row of sweeps.csv.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub quantity: String,
    #[serde(rename = "R_or_t")]
    pub r_or_t: f64,
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BasePointReport {
    pub index: usize,
    pub b: AmbientVector,
    pub on_surface: bool,
    #[serde(rename = "R_grid")]
    pub r_grid: Vec<f64>,
    pub volume: Option<VolumeEstimate>,
    /// Q over the whole surface; the error includes the tail past the grid.
    pub q: Option<InvariantEstimate>,
    /// Q over `B(b, R_max)` with quadrature error only.
    pub q_truncated: Option<InvariantEstimate>,
    pub boundary_constant: Option<Value>,
    pub counting: Vec<CountingEstimate>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub not_applicable: usize,
    pub reports: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub tool: Value,
    pub config: RunConfig,
    pub surface: Value,
    pub targets: Option<CatalogEntry>,
    pub base_points: Vec<BasePointReport>,
    pub ends: Option<EndCount>,
    pub checks: Vec<CheckEntry>,
    pub warnings: Vec<String>,
    pub summary: Summary,
}

pub struct RunOutput {
    pub report: Report,
    pub sweeps: Vec<SweepRow>,
    pub elapsed_secs: f64,
}

fn applicable_if(cond: bool, reason: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(reason.to_string())
    }
}

const NON_MINIMAL: &str = "surface is not minimal (control)";

/// Runs the whole pipeline in memory.
pub fn run(config: &RunConfig, strict: bool) -> Result<RunOutput, CliError> {
    let started = Instant::now();
    let cs: CatalogSurface = build_surface(&config.surface).map_err(|e| CliError::Config(format!("surface: {e}")))?;
    let bases = config.resolve_base_points(&cs)?;
    let surface = cs.surface();
    let p = cs.mesh.intrinsic_dim();
    let minimal = cs.minimal;
    let tol = &config.tolerances;
    let mut checks = Checks::default();
    let mut warnings = Vec::new();
    let mut sweeps = Vec::new();
    let mut reports = Vec::new();

    let minimality = verify_minimality(&cs.chart, &interior_grid(&cs.chart, MINIMALITY_GRID, MINIMALITY_GRID), tol.minimality);
    checks.record("minimality", None, minimality, |m| Some(m.pass), applicable_if(minimal, NON_MINIMAL));

    // grids are validated up front so a bad range is a config error
    let mut grids = Vec::with_capacity(bases.len());
    for b in &bases {
        let (grid, warn) = config.radius_grid(&cs, b)?;
        warnings.extend(warn);
        grids.push(grid);
    }

    // quantities reused by the surface-level checks
    let mut first_volume: Option<VolumeEstimate> = None;
    let mut first_counting: Option<CountingEstimate> = None;

    for (i, (b, grid)) in bases.iter().zip(&grids).enumerate() {
        let bp = Some(i);
        let r_top = *grid.last().expect("grid is nonempty");
        let on_surface = surface.sampled_distance(b) <= ON_SURFACE * r_top.max(1.0);
        let mut rep = BasePointReport {
            index: i,
            b: b.clone(),
            on_surface,
            r_grid: grid.clone(),
            volume: None,
            q: None,
            q_truncated: None,
            boundary_constant: None,
            counting: Vec::new(),
        };
        if on_surface {
            let outcome = on_surface_invariants(&cs.spec, b).and_then(|(v, q, mult)| check_corollary1_point(v, q, p, mult));
            checks.record("corollary1", bp, outcome, |c| Some(c.pass), Ok(()));
            for name in ["theorem1", "monotonicity", "density_identity", "lemma2"] {
                checks.skip(name, bp, "base point lies on the surface");
            }
            reports.push(rep);
            continue;
        }

        let volume = projective_volume(&surface, b, grid);
        let q_trunc = q_invariant(&surface, b, r_top, None);
        let bc = boundary_constant(&surface, b);
        let flux = flux_profile(&surface, b, grid);

        if let Ok(v) = &volume {
            for s in &v.sweep {
                sweeps.push(SweepRow {
                    quantity: format!("normalized_flux[b{i}]"),
                    r_or_t: s.r,
                    value: s.normalized_flux,
                    error: s.flux_error,
                });
                if s.r > 1.0 {
                    sweeps.push(SweepRow {
                        quantity: format!("log_integral_ratio[b{i}]"),
                        r_or_t: s.r,
                        value: s.log_integral / s.r.ln(),
                        error: 0.0,
                    });
                }
            }
            if !v.reliable {
                let msg = format!(
                    "b{i}: volume estimators diverge (flux {:.6}, log-slope {:.6})",
                    v.flux_limit, v.log_slope
                );
                warnings.push(msg);
            }
            if strict {
                checks.record("volume_estimators", bp, Ok(v.clone()), |v| Some(v.reliable && v.converged), Ok(()));
            }
        }

        let q_full = match (&q_trunc, &volume) {
            (Ok(q), Ok(v)) => {
                let at_top = v.sweep.last().map(|s| s.normalized_flux).unwrap_or(0.0);
                let tail = (v.upper() - at_top).max(0.0) / p as f64;
                Ok(InvariantEstimate { error: q.error + tail, ..q.clone() })
            }
            (Err(e), _) | (_, Err(e)) => Err(e.clone()),
        };

        let theorem1 = match (&volume, &q_full, &bc) {
            (Ok(v), Ok(q), Ok(c)) => Ok(check_theorem1(
                (v.estimate.value, v.estimate.error),
                (q.value, q.error),
                (c.value, c.error),
                p,
            )),
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => Err(e.clone()),
        };
        let converged = volume.as_ref().map(|v| v.converged).unwrap_or(false);
        checks.record(
            "theorem1",
            bp,
            theorem1,
            |t| Some(t.pass),
            applicable_if(minimal, NON_MINIMAL)
                .and_then(|_| applicable_if(converged, "projective volume did not converge")),
        );

        match &flux {
            Ok(f) => {
                let mono = check_monotonicity(f, tol.monotonicity);
                checks.record("monotonicity", bp, Ok(mono), |m| Some(m.pass), applicable_if(minimal, NON_MINIMAL));
            }
            Err(e) => checks.record::<()>("monotonicity", bp, Err(e.clone()), |_| None, Ok(())),
        }
        let density = check_density_identity(&surface, b, grid);
        let density_tol = tol.density;
        checks.record(
            "density_identity",
            bp,
            density,
            |d| Some(d.max_residual <= density_tol),
            applicable_if(minimal, NON_MINIMAL),
        );

        let counting = counting_sweep(&cs.mesh, b, grid, config.mc.samples, config.mc.seed);
        match &counting {
            Ok(c) => {
                for e in c {
                    sweeps.push(SweepRow { quantity: format!("counting[b{i}]"), r_or_t: e.r, value: e.mean, error: e.ci95 });
                }
                rep.counting = c.clone();
            }
            Err(e) => warnings.push(format!("b{i}: counting failed: {e}")),
        }
        let lemma2 = match (&q_trunc, &counting) {
            (Ok(q), Ok(c)) => check_lemma2(q, c.last().expect("grid is nonempty"), p, minimal),
            (Err(e), _) | (_, Err(e)) => Err(e.clone()),
        };
        checks.record("lemma2", bp, lemma2, |l| Some(l.pass), applicable_if(minimal, NON_MINIMAL));

        if first_volume.is_none() {
            first_volume = volume.as_ref().ok().cloned();
            first_counting = counting.as_ref().ok().and_then(|c| c.last().cloned());
        }
        rep.volume = volume.ok();
        rep.q = q_full.ok();
        rep.q_truncated = q_trunc.ok();
        rep.boundary_constant = bc.ok().and_then(|c| serde_json::to_value(c).ok());
        reports.push(rep);
    }

    // ends and the end-count bounds, about the origin
    let (ends_top, ends_min) = {
        let top = match cs.mesh.truncation_radius() {
            Some(t) => TRUNCATION_MARGIN * t,
            None => GRID_CLOSED_FRACTION * cs.mesh.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max),
        };
        let top = match config.r_grid.max {
            Some(m) if m < top => m,
            _ => top,
        };
        (top, config.r_grid.min.filter(|m| *m < top).unwrap_or(top / 100.0))
    };
    let count = config.r_grid.count.unwrap_or(crate::config::DEFAULT_GRID_POINTS);
    let ends = ends_estimate(&surface, &logspace(ends_min, ends_top, count));
    if let Ok(e) = &ends {
        for (r, l) in e.r_grid.iter().zip(&e.l_values) {
            sweeps.push(SweepRow { quantity: "ends".into(), r_or_t: *r, value: *l as f64, error: 0.0 });
        }
    }
    checks.record("ends_stabilized", None, ends.clone(), |e| Some(e.stabilized), Ok(()));
    let lemma1 = check_lemma1(&surface, 0.25 * ends_top, 0.5 * ends_top, tol.lemma1);
    checks.record("lemma1", None, lemma1, |l| Some(l.pass), applicable_if(minimal, NON_MINIMAL));

    match (&ends, &first_volume) {
        (Ok(e), Some(v)) => {
            checks.record("theorem2", None, check_theorem2(e.l_estimate, v, p), |t| Some(t.pass), applicable_if(minimal, NON_MINIMAL));
        }
        _ => checks.skip("theorem2", None, "needs both the end count and a projective volume"),
    }
    match (&ends, &first_counting) {
        (Ok(e), Some(c)) => {
            checks.record("corollary3", None, check_corollary3(e.l_estimate, c, p), |t| Some(t.pass), applicable_if(minimal, NON_MINIMAL));
            checks.record("corollary4", None, corollary4_check(e.l_estimate, c, p), |_| None, Ok(()));
        }
        _ => {
            checks.skip("corollary3", None, "needs both the end count and a counting estimate");
            checks.skip("corollary4", None, "needs both the end count and a counting estimate");
        }
    }

    let entries = checks.entries;
    let count_status = |s: Status| entries.iter().filter(|e| e.status == s).count();
    let summary = Summary {
        checks: entries.len(),
        passed: count_status(Status::Pass),
        failed: count_status(Status::Fail),
        errors: count_status(Status::Error),
        not_applicable: count_status(Status::NotApplicable),
        reports: count_status(Status::Report),
        pass: !entries.iter().any(CheckEntry::counts_as_failure),
    };
    let surface_info = json!({
        "name": cs.spec.name,
        "params": cs.spec.params,
        "ambient_dim": cs.mesh.ambient_dim(),
        "intrinsic_dim": p,
        "minimal": minimal,
        "vertices": cs.mesh.vertices().len(),
        "triangles": cs.mesh.triangles().len(),
        "truncation_radius": cs.mesh.truncation_radius(),
        "chart": cs.chart.name,
    });
    let report = Report {
        schema_version: SCHEMA_VERSION,
        tool: json!({ "name": "mingauge", "version": env!("CARGO_PKG_VERSION") }),
        config: config.clone(),
        surface: surface_info,
        targets: catalog_entries().into_iter().find(|e| e.name == cs.spec.name),
        base_points: reports,
        ends: ends.ok(),
        checks: entries,
        warnings,
        summary,
    };
    Ok(RunOutput { report, sweeps, elapsed_secs: started.elapsed().as_secs_f64() })
}

/// Writes the three output files into `dir` and returns their paths.
pub fn write_outputs(out: &RunOutput, dir: &Path, threads: usize) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let report_path = dir.join("report.json");
    let mut text = serde_json::to_string_pretty(&out.report).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(&report_path, text).map_err(|e| CliError::Io(format!("{}: {e}", report_path.display())))?;

    let sweeps_path = dir.join("sweeps.csv");
    let mut w = csv::Writer::from_path(&sweeps_path).map_err(|e| CliError::Io(format!("{}: {e}", sweeps_path.display())))?;
    for row in &out.sweeps {
        w.serialize(row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;

    let log_path = dir.join("run.log");
    let r = &out.report;
    let mut log = vec![
        format!("mingauge {}", env!("CARGO_PKG_VERSION")),
        format!("schema_version {}", r.schema_version),
        format!("surface {}", r.config.surface.name),
        format!("seed {}", r.config.mc.seed),
        format!("samples {}", r.config.mc.samples),
        format!("threads {threads}"),
        format!("wall_time_s {:.3}", out.elapsed_secs),
    ];
    log.extend(r.warnings.iter().map(|w| format!("warning {w}")));
    for c in &r.checks {
        let at = c.base_point.map(|b| format!("[b{b}]")).unwrap_or_default();
        let why = c.reason.as_deref().map(|s| format!(" ({s})")).unwrap_or_default();
        log.push(format!("check {}{at} {:?}{why}", c.name, c.status));
    }
    log.push(format!("result {}", if r.summary.pass { "pass" } else { "fail" }));
    std::fs::write(&log_path, log.join("\n") + "\n").map_err(|e| CliError::Io(format!("{}: {e}", log_path.display())))?;
    Ok(vec![report_path, sweeps_path, log_path])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recorded(outcome: mingauge::Result<bool>, applicable: Result<(), String>) -> Status {
        let mut c = Checks::default();
        c.record("x", None, outcome, |ok| Some(*ok), applicable);
        c.entries[0].status
    }

    #[test]
    fn statuses() {
        assert_eq!(recorded(Ok(true), Ok(())), Status::Pass);
        assert_eq!(recorded(Ok(false), Ok(())), Status::Fail);
        // a failing value on an inapplicable surface never fails the run
        assert_eq!(recorded(Ok(false), Err("control".into())), Status::NotApplicable);
        assert_eq!(recorded(Err(mingauge::Error::Precondition("on surface".into())), Ok(())), Status::NotApplicable);
        assert_eq!(recorded(Err(mingauge::Error::NotApplicable("diverges".into())), Ok(())), Status::NotApplicable);
        assert_eq!(recorded(Err(mingauge::Error::InvalidArgument("bad".into())), Ok(())), Status::Error);
        let mut c = Checks::default();
        c.record("r", Some(0), Ok(1.0), |_| None, Ok(()));
        assert_eq!(c.entries[0].status, Status::Report);
    }

    #[test]
    fn only_fail_and_error_count_against_the_run() {
        let entry = |status| CheckEntry { name: "x".into(), base_point: None, status, reason: None, detail: Value::Null };
        assert!(entry(Status::Fail).counts_as_failure());
        assert!(entry(Status::Error).counts_as_failure());
        for s in [Status::Pass, Status::NotApplicable, Status::Report] {
            assert!(!entry(s).counts_as_failure());
        }
    }

    #[test]
    fn small_plane_run_passes() {
        let cfg = RunConfig::from_json(
            r#"{"surface": {"name": "plane", "params": {"R_max": 30, "resolution": 32}}, "mc": {"samples": 500, "seed": 1}}"#,
        )
        .unwrap();
        let out = run(&cfg, false).unwrap();
        let s = &out.report.summary;
        assert!(s.pass && s.failed == 0 && s.errors == 0, "{:?}", out.report.checks.iter().map(|c| (&c.name, c.status)).collect::<Vec<_>>());
        assert!(out.sweeps.iter().any(|r| r.quantity == "ends"));
    }
}
