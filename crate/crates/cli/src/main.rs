//! `rach`: outage-capacity sweeps, breaking points and model validation for
//! the LTE access reservation procedure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};

use clap::{Args, Parser, Subcommand};
use rach_core::harness::{
    cmd_breaking_point, cmd_validate, parse_engines, sweep, write_csv, write_plot_data, Engine,
    OutputFormat, SweepRow, SweepSpec,
};
use rach_core::config::ConfigFile;
use rach_core::{Error, SystemConfig};

/// Environment variable holding the worker thread count.
const THREADS_ENV: &str = "RACH_THREADS";

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "rach", version, about = "Outage capacity of the LTE access reservation procedure")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate engines over a load grid and write one row per point and engine.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// `csv` or `plot` (whitespace-separated columns).
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Find the load at which the outage probability first reaches a threshold.
    BreakingPoint {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 0.1)]
        threshold: f64,
        /// Also write the underlying sweep as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every closed form against its brute-force oracle.
    Validate,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Lowest new-arrival rate, attempts/s.
    #[arg(long, default_value_t = 500.0)]
    lambda_min: f64,
    /// Highest new-arrival rate, attempts/s.
    #[arg(long, default_value_t = 3000.0)]
    lambda_max: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 26)]
    lambda_steps: usize,
    /// Comma-separated subset of model, sim, baseline.
    #[arg(long, default_value = "model")]
    engines: String,
    /// Simulator replications per grid point.
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Simulated seconds per replication.
    #[arg(long, default_value_t = 60.0)]
    duration_s: f64,
}

/// System parameters. A `--config` file is applied first, then flags.
#[derive(Debug, Args)]
struct SystemArgs {
    /// Flat `key = value` file using the parameter names below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    delta_rao: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    mu: Option<u32>,
    #[arg(long)]
    w_c: Option<u32>,
    #[arg(long)]
    t_rar: Option<u32>,
    #[arg(long)]
    t_crt: Option<u32>,
    #[arg(long)]
    t_enb_proc: Option<u32>,
    #[arg(long)]
    t_ue_proc: Option<u32>,
}

impl SystemArgs {
    fn resolve(&self) -> Result<SystemConfig, Error> {
        let mut cfg = SystemConfig::default();
        if let Some(path) = &self.config {
            cfg = cfg.overlay_file(path)?;
        }
        let flags = ConfigFile {
            d: self.d,
            delta_rao: self.delta_rao,
            m: self.m,
            mu: self.mu,
            w_c: self.w_c,
            t_rar: self.t_rar,
            t_crt: self.t_crt,
            t_enb_proc: self.t_enb_proc,
            t_ue_proc: self.t_ue_proc,
        };
        let cfg = flags.apply(cfg);
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RunArgs {
    fn spec(&self) -> Result<SweepSpec, Error> {
        let grid = SweepSpec::linear_grid(self.lambda_min, self.lambda_max, self.lambda_steps)?;
        let mut spec = SweepSpec::new(grid, self.system.resolve()?, parse_engines(&self.engines)?);
        spec.reps = self.reps;
        spec.seed = self.seed;
        spec.duration_s = self.duration_s;
        spec.validate()?;
        Ok(spec)
    }
}

enum Failure {
    Core(Error),
    Validation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Csv(_) => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

fn progress(total: usize) -> impl Fn(&SweepRow) + Sync {
    let done = AtomicUsize::new(0);
    move |row: &SweepRow| {
        let n = done.fetch_add(1, Ordering::Relaxed) + 1;
        eprintln!(
            "[{n}/{total}] {} at {} attempts/s: outage {:.3e}",
            row.engine, row.lambda_i_per_s, row.p_outage
        );
    }
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Sweep { run, out, format } => {
            let format: OutputFormat = format.parse()?;
            let spec = run.spec()?;
            let rows = sweep(&spec, progress(spec.grid.len() * spec.engines.len()))?;
            let w = output(out.as_ref())?;
            match format {
                OutputFormat::Csv => write_csv(&rows, w)?,
                OutputFormat::PlotData => write_plot_data(&rows, w)?,
            }
        }
        Command::BreakingPoint { run, threshold, out } => {
            let spec = run.spec()?;
            let report =
                cmd_breaking_point(&spec, threshold, progress(spec.grid.len() * spec.engines.len()))?;
            if let Some(path) = &out {
                write_csv(&report.rows, output(Some(path))?)?;
            }
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "threshold {}", report.threshold)?;
            for p in &report.points {
                let how = if p.refined { "bisection-refined" } else { "grid" };
                writeln!(stdout, "{} {:.1} attempts/s ({how})", p.engine, p.lambda_star)?;
            }
            if let Some(ratio) = report.model_sim_ratio {
                writeln!(stdout, "model/sim ratio {ratio:.4}")?;
            }
            for (t, star) in &report.sensitivity {
                match star {
                    Some(x) => writeln!(stdout, "sensitivity {} threshold {t}: {x:.1} attempts/s", Engine::Model)?,
                    None => writeln!(stdout, "sensitivity {} threshold {t}: no crossing in grid", Engine::Model)?,
                }
            }
        }
        Command::Validate => {
            let report = cmd_validate()?;
            print!("{report}");
            if !report.all_passed() {
                for c in report.failures() {
                    eprintln!("failed: {} ({:.4e} > {:.4e})", c.name, c.observed, c.tolerance);
                }
                return Err(Failure::Validation);
            }
        }
    }
    Ok(())
}

fn configure_threads() -> Result<(), Error> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidConfig(format!("{THREADS_ENV} must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidConfig(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => ExitCode::from(EXIT_VALIDATION),
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
