//! Command-line front end.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 config error, 3 hypothesis failure under
//! `--strict`, 4 numerical blowup without `--allow-blowup`.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::analysis::{self, aliasing_exponent, convergence_sweep, critical_timestep, fit_rate, Axis, SweepOptions};
use crate::config::{Config, InitialKind};
use crate::error::Error;
use crate::exact::InitialData;
use crate::io::{self, OutputDir, RunManifest};
use crate::kernels::PeriodicKernel;
use crate::scheme::{self, SchemeConfig};

#[derive(Debug, Parser)]
#[command(
    name = "nonlocal-euler",
    version,
    about = "Forward-Euler solver and diagnostics for periodic nonlocal diffusion"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Periodized kernel samples, spectra and hypothesis checks.
    Kernel(CommonArgs),
    /// Run the Euler scheme and record snapshots and norms.
    Simulate(CommonArgs),
    /// Critical time steps and amplification probes.
    Stability(CommonArgs),
    /// Error sweep over grids and time steps with fitted rates.
    Converge(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML config; every key has a default.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Fail with exit code 3 if the kernel violates a hypothesis.
    #[arg(long)]
    pub strict: bool,
    /// Record blowup instead of exiting with code 4.
    #[arg(long)]
    pub allow_blowup: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Overrides scheme.snapshot_every.
    #[arg(long)]
    pub snapshot_every: Option<usize>,
    /// Override a config value, e.g. `--set kernel.c=100`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    pub set: Vec<String>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Kernel(_) => "kernel",
            Command::Simulate(_) => "simulate",
            Command::Stability(_) => "stability",
            Command::Converge(_) => "converge",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Kernel(a) | Command::Simulate(a) | Command::Stability(a) | Command::Converge(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Runtime = 1,
    Config = 2,
    Assumption = 3,
    Blowup = 4,
}

/// A failure carrying the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    fn config(e: impl std::fmt::Display) -> Self {
        CliError { exit: Exit::Config, message: e.to_string() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let exit = match e {
            Error::Config(_) => Exit::Config,
            _ => Exit::Runtime,
        };
        CliError { exit, message: e.to_string() }
    }
}

/// What a command produced, before the manifest is written.
struct Outcome {
    exit: Exit,
    blowup: bool,
    notes: Vec<String>,
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Exit::Config as i32 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(Exit::Success) => 0,
        Ok(exit) => exit as i32,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.exit as i32
        }
    }
}

/// Runs a parsed command, writing its outputs and manifest.
pub fn execute(cli: &Cli) -> Result<Exit, CliError> {
    let args = cli.command.args();
    let mut overrides = args.set.clone();
    if let Some(m) = args.snapshot_every {
        overrides.push(format!("scheme.snapshot_every={m}"));
    }
    let cfg = Config::load(args.config.as_deref(), &overrides).map_err(CliError::config)?;
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = args.jobs {
            if j == 0 {
                return Err(CliError::config("--jobs must be at least 1"));
            }
            b = b.num_threads(j);
        }
        b.build().map_err(|e| CliError { exit: Exit::Runtime, message: e.to_string() })?
    };

    let start = Instant::now();
    let mut out = OutputDir::create(&args.out)?;
    let outcome = pool.install(|| match &cli.command {
        Command::Kernel(a) => cmd_kernel(&cfg, a, &mut out),
        Command::Simulate(a) => cmd_simulate(&cfg, a, &mut out),
        Command::Stability(a) => cmd_stability(&cfg, a, &mut out),
        Command::Converge(a) => cmd_converge(&cfg, a, &mut out),
    })?;
    let manifest = RunManifest {
        command: cli.command.name().to_string(),
        config_digest: cfg.digest(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        outputs: out.written().to_vec(),
        wall_time: start.elapsed().as_secs_f64(),
        exit_code: outcome.exit as i32,
        blowup: outcome.blowup,
        notes: outcome.notes,
    };
    manifest.write(out.root())?;
    Ok(outcome.exit)
}

fn strict_check(pk: &PeriodicKernel, args: &CommonArgs) -> Result<(), CliError> {
    if pk.assumptions().overall {
        return Ok(());
    }
    let msg = format!("kernel {} fails the hypothesis checks", pk.tag());
    if args.strict {
        return Err(CliError { exit: Exit::Assumption, message: msg });
    }
    eprintln!("warning: {msg}");
    Ok(())
}

fn cmd_kernel(cfg: &Config, args: &CommonArgs, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let pk = cfg.kernel.periodic(cfg.kernel.n_points)?;
    out.csv("kernel_samples.csv", &["j", "x", "value"], io::kernel_sample_rows(&pk))?;
    out.csv("kernel_spectrum.csv", &["k", "dft", "fourier", "gap"], io::kernel_spectrum_rows(&pk)?)?;
    let report = json!({
        "kernel": pk.tag(),
        "n_points": pk.n_points(),
        "truncation_radius": pk.truncation_radius(),
        "checks": pk.assumptions(),
    });
    out.json("assumptions.json", &report)?;
    let overall = pk.assumptions().overall;
    let exit = if !overall && args.strict { Exit::Assumption } else { Exit::Success };
    if !overall {
        eprintln!("warning: kernel {} fails the hypothesis checks", pk.tag());
    }
    Ok(Outcome { exit, blowup: false, notes: vec![format!("assumptions_hold={overall}")] })
}

fn cmd_simulate(cfg: &Config, args: &CommonArgs, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let n = cfg.kernel.n_points;
    let pk = cfg.kernel.periodic(n)?;
    strict_check(&pk, args)?;
    let s = &cfg.scheme;
    let u0 = match cfg.initial.family_for(cfg.initial.family) {
        Some(f) => f.sample(n).map_err(CliError::config)?,
        None => analysis::worst_mode_data(&pk, s.dt)?,
    };
    let sc = SchemeConfig::new(n, s.dt, s.n_steps)?
        .snapshot_every(s.snapshot_every)
        .allow_blowup(true)
        .record_spectra(s.record_spectra)
        .rhs(s.rhs);
    let res = scheme::run(&u0, &pk, &sc)?;
    out.csv("snapshots.csv", &["step", "j", "x", "value", "imag"], io::snapshot_rows(&res))?;
    out.csv("norms.csv", &["step", "t", "norm"], io::norm_rows(&res))?;
    if let Some(spectra) = &res.spectral_snapshots {
        let rows = spectra.iter().flat_map(|(step, s)| {
            s.iter().map(move |(k, v)| vec![step.to_string(), k.to_string(), io::fmt_float(v.re), io::fmt_float(v.im)])
        });
        out.csv("spectra.csv", &["step", "k", "re", "im"], rows.collect::<Vec<_>>())?;
    }
    let monotone = res.norm_history.windows(2).all(|w| w[1] <= w[0] * (1.0 + analysis::MONOTONE_SLACK));
    let mut notes = vec![format!("norm_nonincreasing={monotone}")];
    let blowup = res.blew_up();
    let exit = if blowup && !args.allow_blowup { Exit::Blowup } else { Exit::Success };
    if let Some(step) = res.blowup_step {
        notes.push(format!("blowup_step={step}"));
        eprintln!("{}: non-finite state at step {step}", if args.allow_blowup { "warning" } else { "error" });
    }
    Ok(Outcome { exit, blowup, notes })
}

fn cmd_stability(cfg: &Config, args: &CommonArgs, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let pk = cfg.kernel.periodic(cfg.kernel.n_points)?;
    strict_check(&pk, args)?;
    let mut report = critical_timestep(&pk);
    let st = &cfg.stability;
    let dts: Vec<f64> =
        st.probe_factors.iter().map(|f| f * report.dt_star_sharp).chain(st.probe_dts.iter().copied()).collect();
    for dt in dts {
        report.probe(&pk, dt, st.probe_steps)?;
    }
    out.json("stability.json", &report)?;
    Ok(Outcome { exit: Exit::Success, blowup: false, notes: Vec::new() })
}

fn fit_json(fit: Result<analysis::RateFit, Error>, held: Value) -> Value {
    match fit {
        Ok(f) => json!({ "held_fixed": held, "fit": f }),
        Err(e) => json!({ "held_fixed": held, "error": e.to_string() }),
    }
}

fn cmd_converge(cfg: &Config, args: &CommonArgs, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let kernel = cfg.kernel.infinite()?.ok_or_else(|| {
        CliError::config("converge needs a kernel with a closed-form transform (gaussian or laplace)")
    })?;
    let pk = cfg.kernel.periodic(cfg.kernel.n_points)?;
    strict_check(&pk, args)?;
    let sw = &cfg.sweep;
    if sw.grids.is_empty() || sw.dts.is_empty() || sw.families.is_empty() {
        return Err(CliError::config("sweep.grids, sweep.dts and sweep.families must be nonempty"));
    }
    let options = SweepOptions {
        tail_tol: cfg.kernel.tail_tol,
        max_mode: (sw.max_mode > 0).then_some(sw.max_mode),
        coefficient_tol: cfg.initial.coefficient_tol,
        rhs: cfg.scheme.rhs,
    };
    let finest_dt = sw.dts.iter().copied().fold(f64::INFINITY, f64::min);
    let finest_n = *sw.grids.iter().max().unwrap();

    let mut records = Vec::new();
    let mut per_family = Vec::new();
    for &kind in &sw.families {
        let family = cfg
            .initial
            .family_for(kind)
            .filter(|_| kind != InitialKind::WorstMode)
            .ok_or_else(|| CliError::config("worst-mode data cannot be used in a convergence sweep"))?;
        let recs = convergence_sweep(&kernel, &family, sw.t_final, &sw.grids, &sw.dts, &options)?;
        let h_fit = fit_rate(&recs, Axis::H, |r| r.dt == finest_dt);
        let dt_fit = fit_rate(&recs, Axis::Dt, |r| r.n_points == finest_n);
        let max_mode = (8 * finest_n).max(256);
        let alias = InitialData::new(family.clone(), max_mode, cfg.initial.coefficient_tol)
            .and_then(|d| aliasing_exponent(&d, &sw.grids));
        let h_slope = h_fit.as_ref().ok().map(|f| f.slope);
        per_family.push((
            family.tag(),
            h_slope,
            json!({
                "family": family.tag(),
                "h": fit_json(h_fit, json!({ "dt": finest_dt })),
                "dt": fit_json(dt_fit, json!({ "N": finest_n })),
                "aliasing": match alias {
                    Ok(a) => serde_json::to_value(a).map_err(Error::from)?,
                    Err(e) => json!({ "error": e.to_string() }),
                },
            }),
        ));
        records.extend(recs);
    }

    out.csv("errors.csv", &io::ERRORS_HEADER, io::error_rows(&records))?;
    let slopes: Vec<Value> = per_family.iter().map(|(tag, s, _)| json!({ "family": tag, "h_slope": s })).collect();
    let rates = json!({
        "kernel": kernel.tag(),
        "t_final": sw.t_final,
        "families": per_family.into_iter().map(|(_, _, v)| v).collect::<Vec<_>>(),
        "h_slopes": slopes,
    });
    out.json("rates.json", &rates)?;

    let blowup = records.iter().any(|r| r.blowup);
    let mut notes = Vec::new();
    if blowup {
        let cells = records.iter().filter(|r| r.blowup).count();
        notes.push(format!("blowup_cells={cells}"));
        eprintln!("{}: {cells} sweep cells blew up", if args.allow_blowup { "warning" } else { "error" });
    }
    let exit = if blowup && !args.allow_blowup { Exit::Blowup } else { Exit::Success };
    Ok(Outcome { exit, blowup, notes })
}
