use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mingauge_cli::config::RunConfig;
use mingauge_cli::{commands, pipeline, CliError, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_PASS};

/// Integral-geometric invariants of minimal surfaces.
#[derive(Parser)]
#[command(name = "mingauge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every estimate and check for one configured surface.
    Report {
        /// JSON run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Treat estimator divergence as a failed check.
        #[arg(long)]
        strict: bool,
        /// Output directory (overrides `output` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in surfaces with parameters and target values.
    Catalog {
        #[arg(long)]
        json: bool,
    },
    /// Check the Crofton-Federer identity on a spherical set.
    Crofton {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        p: usize,
        /// sphere, hemisphere, cap:<alpha>, great_sphere, clifford_torus
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Latitude rings (or torus cells per side).
        #[arg(long, default_value_t = 48)]
        resolution: usize,
    },
}

fn init_threads() -> Result<usize, CliError> {
    let threads = match std::env::var("MINGAUGE_THREADS") {
        Ok(v) => {
            let n: usize = v.trim().parse().map_err(|_| CliError::Config(format!("MINGAUGE_THREADS: not a count: `{v}`")))?;
            if n == 0 {
                return Err(CliError::Config("MINGAUGE_THREADS: must be at least 1".into()));
            }
            Some(n)
        }
        Err(_) => None,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    builder.build_global().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    Ok(rayon::current_num_threads())
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let threads = init_threads()?;
    match cli.command {
        Command::Report { config, strict, out } => {
            let cfg = RunConfig::load(&config)?;
            let dir = out.or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("mingauge-out"));
            let result = pipeline::run(&cfg, strict)?;
            let paths = pipeline::write_outputs(&result, &dir, threads)?;
            let s = &result.report.summary;
            println!(
                "{}: {} passed, {} failed, {} errors, {} not applicable, {} report-only",
                result.report.config.surface.name, s.passed, s.failed, s.errors, s.not_applicable, s.reports
            );
            for w in &result.report.warnings {
                eprintln!("warning: {w}");
            }
            for p in paths {
                println!("wrote {}", p.display());
            }
            Ok(if s.pass { EXIT_PASS } else { EXIT_CHECK_FAILED })
        }
        Command::Catalog { json } => {
            if json {
                println!("{}", commands::catalog_json());
            } else {
                print!("{}", commands::catalog_table());
            }
            Ok(EXIT_PASS)
        }
        Command::Crofton { n, p, set, samples, seed, resolution } => {
            let out = commands::crofton(n, p, &set, samples, seed, resolution)?;
            println!("{}", serde_json::to_string_pretty(&out).expect("crofton output serializes"));
            Ok(if out.result.pass { EXIT_PASS } else { EXIT_CHECK_FAILED })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("mingauge: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
