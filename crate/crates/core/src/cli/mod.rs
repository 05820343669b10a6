//! Command-line front end. Every subcommand writes CSV into the output
//! directory; settings come from defaults, then `--config`, then flags.

mod config;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use config::{ExperimentConfig, KernelChoice, PdeSettings, RawConfig};

use crate::calibrate::{self, Calibration, CalibrationOptions, Table1Config};
use crate::csv;
use crate::error::{Error, Result};
use crate::frasca::{frasca_solve_with, FrascaOptions};
use crate::grid::{TimeGrid, Trajectory};
use crate::kernels::{self, KernelSpec, NumericKernelOptions};
use crate::oracle::{self, IvpProblem};
use crate::pdelift::{self, SpaceTimeGrid};

#[derive(Debug, Parser)]
#[command(name = "nlgreen", version, about = "Nonlinear Green's function kernels, convolution approximations and calibration")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate G(t) at t = dt, 2dt, …, T  → kernel.csv (t, G)
    Kernel,
    /// Convolution approximation  → solve.csv (t, w_app)
    Solve,
    /// Reference integration  → oracle.csv (t, w_exact)
    Oracle,
    /// Compare both, optionally optimizing s2  → calibrate.csv (t, w_app, w_exact, Er), calibrate_report.csv
    Calibrate,
    /// Per-source report for the exponential nonlinearity  → table1.csv
    Table1,
    /// Space-time lift with a Gaussian source  → pde_field.csv (x, t, w), pde_mask.csv
    Pde,
}

/// Flags override the config file, which overrides the built-in defaults.
#[derive(Debug, Args, Default)]
pub struct Flags {
    /// key = value experiment file with [experiment], [optimize], [pde], [output] sections
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// cubic | sine-gordon | quadratic | reciprocal | exponential | advective  [default: exponential]
    #[arg(long, global = true, value_name = "TAG")]
    pub nonlinearity: Option<String>,
    /// delta | heaviside | sin | exp | poly | log  [default: delta]
    #[arg(long, global = true, value_name = "TAG")]
    pub source: Option<String>,
    /// Kernel slope (amplitude for reciprocal); omitted = the catalog's standard kernel
    #[arg(long, global = true, value_name = "F", allow_negative_numbers = true)]
    pub s1: Option<f64>,
    /// Convolution scale  [default: 1]
    #[arg(long, global = true, value_name = "F", allow_negative_numbers = true)]
    pub s2: Option<f64>,
    /// Horizon T  [default: 1]
    #[arg(long = "t-max", global = true, value_name = "F")]
    pub t_max: Option<f64>,
    /// Time step  [default: 1e-3]
    #[arg(long, global = true, value_name = "F")]
    pub dt: Option<f64>,
    /// Reference integrator tolerance  [default: 1e-10]
    #[arg(long, global = true, value_name = "F")]
    pub tol: Option<f64>,
    /// Optimize s2 (calibrate)
    #[arg(long, global = true)]
    pub optimize: bool,
    /// Output directory  [default: .]
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// auto | closed | numeric  [default: auto]
    #[arg(long, global = true, value_name = "FORM")]
    pub kernel: Option<String>,
    /// Closed-form constant c1 (with --c2)
    #[arg(long, global = true, value_name = "F", allow_negative_numbers = true)]
    pub c1: Option<f64>,
    /// Closed-form constant c2 (with --c1)
    #[arg(long, global = true, value_name = "F", allow_negative_numbers = true)]
    pub c2: Option<f64>,
}

impl Flags {
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            cfg = cfg.merge(&RawConfig::load(path)?)?;
        }
        if let Some(v) = &self.nonlinearity {
            cfg.nonlinearity = v.parse()?;
        }
        if let Some(v) = &self.source {
            cfg.source = v.parse()?;
        }
        if let Some(v) = &self.kernel {
            cfg.kernel = v.parse()?;
        }
        cfg.s1 = self.s1.or(cfg.s1);
        cfg.s2 = self.s2.unwrap_or(cfg.s2);
        cfg.horizon = self.t_max.unwrap_or(cfg.horizon);
        cfg.dt = self.dt.unwrap_or(cfg.dt);
        cfg.tolerance = self.tol.unwrap_or(cfg.tolerance);
        cfg.c1 = self.c1.or(cfg.c1);
        cfg.c2 = self.c2.or(cfg.c2);
        cfg.optimize |= self.optimize;
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Caps the rayon pool from `GREENS_NL_THREADS`, if set.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("GREENS_NL_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::Config(format!("GREENS_NL_THREADS must be a positive integer, got '{value}'")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

/// Runs one subcommand and returns the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let cfg = cli.flags.resolve()?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    match cli.command {
        Command::Kernel => cmd_kernel(&cfg),
        Command::Solve => cmd_solve(&cfg),
        Command::Oracle => cmd_oracle(&cfg),
        Command::Calibrate => cmd_calibrate(&cfg),
        Command::Table1 => cmd_table1(&cfg),
        Command::Pde => cmd_pde(&cfg),
    }
}

/// The kernel selected by the config: explicit (c1, c2), else the homogeneous
/// kernel for s1 (closed form when available), else the catalog default.
pub fn kernel_spec(cfg: &ExperimentConfig) -> Result<KernelSpec> {
    let nl = cfg.nonlinearity;
    if let (Some(c1), Some(c2)) = (cfg.c1, cfg.c2) {
        if cfg.kernel == KernelChoice::Numeric {
            return Err(Error::Config("c1/c2 select a closed form; drop them for a numeric kernel".into()));
        }
        return Ok(KernelSpec::closed_form(nl, c1, c2));
    }
    let slope = cfg.s1;
    match cfg.kernel {
        KernelChoice::Numeric => Ok(KernelSpec::numeric(
            nl,
            slope.unwrap_or_else(|| KernelSpec::standard(nl).s1),
        )),
        KernelChoice::Closed => match slope {
            Some(s1) => KernelSpec::homogeneous(nl, s1),
            None => Ok(KernelSpec::standard(nl)),
        },
        KernelChoice::Auto => match slope {
            Some(s1) => KernelSpec::homogeneous(nl, s1).or_else(|_| Ok(KernelSpec::numeric(nl, s1))),
            None => Ok(KernelSpec::standard(nl)),
        },
    }
}

fn time_grid(cfg: &ExperimentConfig) -> Result<TimeGrid> {
    TimeGrid::from_horizon(cfg.horizon, cfg.dt)
}

fn frasca_options(cfg: &ExperimentConfig) -> FrascaOptions {
    FrascaOptions {
        delta_endpoint: cfg.endpoint,
        numeric: NumericKernelOptions {
            tolerance: cfg.tolerance,
            ..Default::default()
        },
        ..Default::default()
    }
}

fn calibration_options(cfg: &ExperimentConfig) -> CalibrationOptions {
    CalibrationOptions {
        tolerance: cfg.tolerance,
        skip_initial: cfg.skip_initial,
        frasca: frasca_options(cfg),
    }
}

fn output(cfg: &ExperimentConfig, name: &str) -> PathBuf {
    cfg.out_dir.join(name)
}

pub fn cmd_kernel(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let spec = kernel_spec(cfg)?;
    let grid = time_grid(cfg)?;
    let table = kernels::tabulate(&spec, &grid, &frasca_options(cfg).numeric)?;
    // rows start at the first positive lag
    let rows = TimeGrid::new(grid.dt, grid.dt, grid.n - 1)?;
    let kernel = Trajectory::new(rows, table[1..].to_vec())?;
    let path = output(cfg, "kernel.csv");
    csv::write_trajectory(&path, &kernel, "G")?;
    Ok(vec![path])
}

pub fn cmd_solve(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let w = frasca_solve_with(&kernel_spec(cfg)?, &cfg.source, cfg.s2, &time_grid(cfg)?, &frasca_options(cfg))?;
    let path = output(cfg, "solve.csv");
    csv::write_trajectory(&path, &w, "w_app")?;
    Ok(vec![path])
}

pub fn cmd_oracle(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let problem = IvpProblem::new(cfg.nonlinearity, cfg.source).with_tolerance(cfg.tolerance);
    let w = oracle::reference_solve(&problem, &time_grid(cfg)?)?;
    let path = output(cfg, "oracle.csv");
    csv::write_trajectory(&path, &w, "w_exact")?;
    Ok(vec![path])
}

pub fn cmd_calibrate(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let cal = Calibration::prepare(&kernel_spec(cfg)?, &cfg.source, &time_grid(cfg)?, &calibration_options(cfg))?;
    let report = if cfg.optimize {
        let bracket = cfg.bracket.unwrap_or_else(|| calibrate::default_bracket(cfg.s2));
        cal.optimize(bracket, &[cfg.s2])?.1
    } else {
        cal.report(cfg.s2, false)?
    };
    let app = cal.approximation(report.s2);
    let trace = cal.error_trace(report.s2)?;
    let times: Vec<f64> = app.grid.times().collect();
    let curves = csv::table_csv(
        &["t", "w_app", "w_exact", "Er"],
        &[&times, &app.values, &cal.exact.values, &trace.er.values],
    )?;
    let curves_path = output(cfg, "calibrate.csv");
    csv::write_atomic(&curves_path, &curves)?;
    let report_path = output(cfg, "calibrate_report.csv");
    let report_text = csv::report_csv(std::slice::from_ref(&report));
    csv::write_atomic(&report_path, &report_text)?;
    print!("{}", report_text.lines().nth(1).map(|l| format!("{l}\n")).unwrap_or_default());
    Ok(vec![curves_path, report_path])
}

pub fn cmd_table1(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let reports = calibrate::reproduce_table1(&Table1Config {
        horizon: cfg.horizon,
        dt: cfg.dt,
        calibration: calibration_options(cfg),
    })?;
    let path = output(cfg, "table1.csv");
    csv::write_atomic(&path, &csv::report_csv(&reports))?;
    Ok(vec![path])
}

pub fn cmd_pde(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let p = &cfg.pde;
    let pde_cfg = pdelift::PdeConfig::new(p.config.alpha, p.config.lambda, p.config.a1, p.config.a2)?;
    let grid = SpaceTimeGrid::new(p.x0, p.dx, p.nx, 0.0, p.dt, p.nt)?;
    if !(p.width > 0.0) {
        return Err(Error::Config(format!("pde source width must be positive, got {}", p.width)));
    }
    let (a, xc, tc, w2) = (p.amplitude, p.center_x, p.center_t, p.width * p.width);
    let source = move |x: f64, t: f64| a * (-((x - xc).powi(2) + (t - tc).powi(2)) / w2).exp();
    let field = pdelift::pde_solve(&source, &kernel_spec(cfg)?, &pde_cfg, p.s2, &grid, p.margin)?;
    if field.truncation_warning {
        eprintln!("warning: the source is not negligible at the edge of the spatial window; widen the margin");
    }
    let (data, mask) = (output(cfg, "pde_field.csv"), output(cfg, "pde_mask.csv"));
    csv::write_field(&data, &mask, &field)?;
    Ok(vec![data, mask])
}

/// Parses `args`, runs, and maps the outcome to a process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = configure_threads().and_then(|()| run(&cli));
    match outcome {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", display(&p));
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn display(p: &Path) -> String {
    p.display().to_string()
}
