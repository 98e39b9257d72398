//! `fama-lab`: sweeps, validation and figure reproduction for cell-free FAMA
//! outage analysis.

mod figures;
mod output;
mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fama_core::checks::{validate, ValidationOptions};
use fama_core::netmodel::{NetworkConfig, Scheme};
use fama_core::quad::QuadratureSettings;
use serde::Serialize;

use crate::output::{CurveManifest, Manifest, SOFTWARE};
use crate::sweep::{run_sweep, DistanceRule, Method, RunOptions, SweepSpec};

/// Seed used by `validate` and `figure` when none is given; recorded in
/// every report and manifest.
const DEFAULT_SEED: u64 = 20240601;

/// println! that tolerates a closed stdout (e.g. piping into `head`).
macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0} invariant check(s) failed")]
    Invariant(usize),
}

impl From<fama_core::Error> for CliError {
    fn from(e: fama_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invariant(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "fama-lab",
    version,
    about = "Outage analysis of cell-free FAMA networks with MRT precoding"
)]
struct Cli {
    /// Worker threads (results never depend on it).
    #[arg(long, global = true, env = "FAMA_LAB_JOBS")]
    jobs: Option<usize>,
    /// Record per-row wall time; without it wall_ms is 0 and reruns are
    /// byte-identical.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep described by a JSON SweepSpec.
    Sweep {
        spec: PathBuf,
        /// CSV destination (stdout when omitted); the manifest goes next to
        /// it as <out>.manifest.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant battery; exits 1 if any check fails.
    Validate {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Override the port correlation μ² (e.g. 0 for independence).
        #[arg(long)]
        mu2: Option<f64>,
        /// Write the full report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Reproduce a figure's curves as CSV files plus a manifest.
    Figure {
        /// fig2, fig3, fig4, fig5 or fig6.
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 200_000)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Evaluate one outage probability and print it as JSON.
    Eval {
        #[arg(long)]
        scheme: Scheme,
        #[arg(long)]
        method: Method,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        /// Required for MC.
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// A JSON NetworkConfig plus per-field overrides.
#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Transmit antennas per base station (N).
    #[arg(long)]
    antennas: Option<u32>,
    /// Interfering base stations (U); distances follow the equal rule
    /// unless --distances is given.
    #[arg(long)]
    interferers: Option<u32>,
    /// FAS ports (K).
    #[arg(long)]
    ports: Option<u32>,
    /// FAS size in wavelengths (W).
    #[arg(long)]
    fas_size: Option<f64>,
    /// Linear SIR threshold for both schemes.
    #[arg(long)]
    sir_threshold: Option<f64>,
    /// SNR threshold in dB.
    #[arg(long)]
    snr_db: Option<f64>,
    /// Comma-separated distances, serving BS first.
    #[arg(long, value_delimiter = ',')]
    distances: Option<Vec<f64>>,
}

impl ConfigArgs {
    fn load(&self) -> Result<NetworkConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = read(path)?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            None => NetworkConfig::default(),
        };
        if let Some(n) = self.antennas {
            cfg.n_bs_antennas = n;
        }
        if let Some(k) = self.ports {
            cfg.n_ports = k;
        }
        if let Some(w) = self.fas_size {
            cfg.fas_size = w;
        }
        if let Some(g) = self.sir_threshold {
            cfg.sir_threshold_f = g;
            cfg.sir_threshold_s = g;
        }
        if let Some(db) = self.snr_db {
            cfg.snr_threshold = fama_core::netmodel::db_to_linear(db);
        }
        if let Some(u) = self.interferers {
            cfg.distances = DistanceRule::Equal.distances(&cfg, u);
            cfg.n_interferers = u;
        }
        if let Some(d) = &self.distances {
            cfg.distances = d.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn manifest_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn cmd_sweep(spec_path: &Path, out: Option<&Path>, opts: &RunOptions) -> Result<(), CliError> {
    let spec = SweepSpec::from_json(&read(spec_path)?)?;
    let rows = run_sweep(&spec, opts)?;
    match out {
        Some(path) => {
            output::write_csv_file(&rows, path)?;
            let file = path
                .file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_default();
            let manifest = Manifest {
                software: SOFTWARE,
                command: format!("sweep {}", spec_path.display()),
                quadrature: opts.quad,
                timing_recorded: opts.timing,
                curves: vec![CurveManifest::new(file, &spec, &rows)],
            };
            output::write_json(&manifest, &manifest_path(path))?;
        }
        None => output::write_csv(&rows, std::io::stdout().lock())?,
    }
    for r in rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "row {} {} {}: {}",
            r.axis_value,
            r.scheme,
            r.method.as_str(),
            r.error.as_deref().unwrap_or("")
        );
    }
    Ok(())
}

fn cmd_figure(
    name: &str,
    out: &Path,
    trials: u64,
    seed: u64,
    opts: &RunOptions,
) -> Result<(), CliError> {
    let curves = figures::figure_curves(name, trials, seed).ok_or_else(|| {
        CliError::Config(format!(
            "unknown figure {name:?}; expected one of {}",
            figures::FIGURES.join(", ")
        ))
    })?;
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let mut all_rows = Vec::with_capacity(curves.len());
    for c in &curves {
        let rows = run_sweep(&c.spec, opts)?;
        let file = format!("{name}_{}.csv", c.name);
        output::write_csv_file(&rows, &out.join(&file))?;
        eprintln!("wrote {file}");
        all_rows.push((file, rows));
    }
    let manifest = Manifest {
        software: SOFTWARE,
        command: format!("figure {name} --trials {trials} --seed {seed}"),
        quadrature: opts.quad,
        timing_recorded: opts.timing,
        curves: curves
            .iter()
            .zip(&all_rows)
            .map(|(c, (file, rows))| CurveManifest::new(file.clone(), &c.spec, rows))
            .collect(),
    };
    output::write_json(&manifest, &out.join(format!("{name}_manifest.json")))
}

fn cmd_validate(
    cfg: &NetworkConfig,
    opts: ValidationOptions,
    json: Option<&Path>,
) -> Result<(), CliError> {
    let report = validate(cfg, &opts)?;
    outln!("seed {} trials {}", opts.seed, opts.trials);
    for c in &report.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let note = c
            .note
            .as_deref()
            .map(|n| format!("  [{n}]"))
            .unwrap_or_default();
        outln!(
            "{status} {}: measured {:.6e}, expected {:.6e}, tolerance {:.1e}{note}",
            c.name,
            c.measured,
            c.expected,
            c.tolerance
        );
    }
    if let Some(path) = json {
        output::write_json(&report, path)?;
    }
    match report.failures().count() {
        0 => Ok(()),
        n => Err(CliError::Invariant(n)),
    }
}

#[derive(Serialize)]
struct EvalOutput<'a> {
    scheme: Scheme,
    method: &'static str,
    probability: f64,
    uncertainty: f64,
    trials: u64,
    seed: Option<u64>,
    warning: Option<String>,
    config: &'a NetworkConfig,
}

fn cmd_eval(
    scheme: Scheme,
    method: Method,
    cfg: &NetworkConfig,
    trials: u64,
    seed: Option<u64>,
    opts: &RunOptions,
) -> Result<(), CliError> {
    let seed = match (method, seed) {
        (Method::Mc, None) => {
            return Err(CliError::Config(
                "--seed is required for --method MC".into(),
            ))
        }
        (_, s) => s,
    };
    let (probability, uncertainty, trials, warning) =
        sweep::evaluate(cfg, scheme, method, trials, seed.unwrap_or(0), opts)?;
    let out = EvalOutput {
        scheme,
        method: method.as_str(),
        probability,
        uncertainty,
        trials,
        seed,
        warning,
        config: cfg,
    };
    outln!(
        "{}",
        serde_json::to_string_pretty(&out).expect("serializable")
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let opts = RunOptions {
        quad: QuadratureSettings::default(),
        timing: cli.timing,
        ..Default::default()
    };
    match &cli.command {
        Command::Sweep { spec, out } => cmd_sweep(spec, out.as_deref(), &opts),
        Command::Figure {
            name,
            out,
            trials,
            seed,
        } => cmd_figure(name, out, *trials, *seed, &opts),
        Command::Validate {
            config,
            trials,
            seed,
            mu2,
            json,
        } => {
            let cfg = config.load()?;
            let vopts = ValidationOptions {
                trials: *trials,
                seed: *seed,
                mu2_override: *mu2,
                ..Default::default()
            };
            cmd_validate(&cfg, vopts, json.as_deref())
        }
        Command::Eval {
            scheme,
            method,
            config,
            trials,
            seed,
        } => cmd_eval(*scheme, *method, &config.load()?, *trials, *seed, &opts),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build();
    let result = match pool {
        Ok(pool) => pool.install(|| run(cli)),
        Err(e) => Err(CliError::Config(format!("thread pool: {e}"))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fama-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
