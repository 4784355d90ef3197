//! Command-line interface.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use geohazard_core::gauss::{cylinder_gauss_measure, DEFAULT_MAX_DIGITS, DEFAULT_PRECISION_BITS};
use geohazard_core::{words, CfDigits, Error as CoreError, Symbol};
use serde_json::json;

use crate::config::{self, ConfigErrors};
use crate::output::{self, Manifest, Payload, ReportFile, Timing, SCHEMA_VERSION, TOOL_VERSION};
use crate::runner::{self, Timed};
use crate::checks;

#[derive(Debug, Parser)]
#[command(name = "geohazard", version, about = "Hazard-stopped multiple-return simulations and bounds")]
pub struct Cli {
    /// Worker threads for simulations (default: all cores).
    #[arg(long, global = true, env = "GEOHAZARD_WORKERS")]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the hazard-stopped count and compare it with its geometric limit.
    SimulateHazard(SimArgs),
    /// Simulate the fixed-horizon count and compare it with its Poisson limit.
    SimulatePoisson(SimArgs),
    /// Print every evaluable bound for a config as JSON.
    Bounds {
        config: PathBuf,
    },
    /// Self periods, cross period and kappa of two words.
    WordStats {
        /// Digit string ("100") or comma-separated symbols ("1,0,0").
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Continued-fraction digit process.
    #[command(subcommand)]
    Gauss(GaussCommand),
    /// Run the brute-force oracle suites.
    Oracle,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    pub config: PathBuf,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
    /// Also write the histogram as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GaussCommand {
    /// Gauss measure of a cylinder.
    Measure {
        #[arg(long, value_delimiter = ',', required = true)]
        digits: Vec<u64>,
    },
    /// Hazard-stopped count of digit words, probes at `i * n` for `i = 1..=ell`.
    Simulate {
        /// Hazard word, comma-separated digits.
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<u64>,
        /// Count word.
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        ell: u64,
        #[arg(long, default_value_t = DEFAULT_PRECISION_BITS)]
        precision_bits: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_DIGITS)]
        max_digits: usize,
        #[command(flatten)]
        run: RunArgs,
    },
}

/// Failure classes and their exit codes.
#[derive(Debug)]
pub enum Failure {
    Config(ConfigErrors),
    Censoring(String),
    Other(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Censoring(_) => 2,
            _ => 1,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        Failure::Other(e.into())
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "{e}"),
            Failure::Censoring(m) => write!(f, "{m}"),
            Failure::Other(e) => write!(f, "{e:#}"),
        }
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    let workers = runner::resolve_workers(cli.workers);
    match cli.command {
        Command::SimulateHazard(a) => {
            let text = read(&a.config)?;
            simulate(&text, Mode::Hazard, "simulate-hazard", &a.run, workers)
        }
        Command::SimulatePoisson(a) => {
            let text = read(&a.config)?;
            simulate(&text, Mode::Poisson, "simulate-poisson", &a.run, workers)
        }
        Command::Bounds { config } => {
            let (_, raw) = config::parse(&read(&config)?, None, None).map_err(Failure::Config)?;
            let v = raw.validate().map_err(Failure::Config)?;
            let mut out = serde_json::to_value(v.bound_report()).context("serializing bounds")?;
            if let Some(h) = &v.hazard {
                out["rho"] = json!(h.rho()?);
            }
            if let Some(p) = &v.poisson {
                out["lambda"] = json!(p.lambda()?);
            }
            println!("{}", serde_json::to_string_pretty(&out).context("serializing bounds")?);
            Ok(())
        }
        Command::WordStats { a, b } => {
            let (a, b) = (parse_word(&a)?, parse_word(&b)?);
            let stats = json!({
                "pi_a": words::self_period(&a),
                "pi_b": words::self_period(&b),
                "pi_ab": words::cross_period(&a, &b),
                "kappa": words::kappa(&a, &b),
            });
            println!("{stats}");
            Ok(())
        }
        Command::Gauss(GaussCommand::Measure { digits }) => {
            let d = CfDigits::new(digits).map_err(|e| config_error(e.to_string()))?;
            let ((a, b), (c, e)) = d.endpoints();
            let out = json!({
                "digits": d.digits(),
                "measure": cylinder_gauss_measure(&d),
                "endpoints": [format!("{a}/{b}"), format!("{c}/{e}")],
            });
            println!("{out}");
            Ok(())
        }
        Command::Gauss(GaussCommand::Simulate {
            a,
            b,
            ell,
            precision_bits,
            max_digits,
            run,
        }) => {
            if ell == 0 {
                return Err(config_error("--ell must be at least 1".into()));
            }
            let cfg = json!({
                "model": {"variant": "gauss", "precision_bits": precision_bits, "max_digits": max_digits},
                "schedule": {"kind": "linear_multiples", "coeffs": (1..=ell).collect::<Vec<_>>()},
                "targets": {"hazard_word": a, "count_word": b},
            });
            simulate(&cfg.to_string(), Mode::Hazard, "gauss simulate", &run, workers)
        }
        Command::Oracle => {
            let results = checks::all();
            let mut failed = 0;
            for r in &results {
                println!("{} {:<20} {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
                failed += usize::from(!r.passed);
            }
            if failed > 0 {
                return Err(Failure::Other(anyhow::anyhow!("{failed} oracle suite(s) failed")));
            }
            Ok(())
        }
    }
}

fn config_error(msg: String) -> Failure {
    Failure::Config(ConfigErrors(vec![msg]))
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))
}

fn parse_word(s: &str) -> Result<Vec<Symbol>, Failure> {
    let bad = || config_error(format!("{s:?} is not a word of nonnegative integers"));
    let w: Vec<Symbol> = if s.contains(',') {
        s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    } else {
        s.chars()
            .map(|c| c.to_digit(10).map(Symbol::from).ok_or_else(bad))
            .collect::<Result<_, _>>()?
    };
    if w.is_empty() {
        return Err(bad());
    }
    Ok(w)
}

#[derive(Clone, Copy)]
enum Mode {
    Hazard,
    Poisson,
}

fn simulate(text: &str, mode: Mode, subcommand: &str, args: &RunArgs, workers: usize) -> Result<(), Failure> {
    let started_at = output::unix_now();
    let (value, raw) = config::parse(text, args.seed, args.trials).map_err(Failure::Config)?;
    let v = raw.validate().map_err(Failure::Config)?;
    let Timed {
        report,
        wall_time_seconds,
        workers,
    } = match mode {
        Mode::Hazard => {
            let cfg = v
                .hazard
                .as_ref()
                .ok_or_else(|| config_error("simulate-hazard needs \"targets\"".into()))?;
            runner::run_hazard(cfg, workers)?
        }
        Mode::Poisson => {
            let cfg = v
                .poisson
                .as_ref()
                .ok_or_else(|| config_error("simulate-poisson needs \"poisson\" and \"horizon\"".into()))?;
            runner::run_poisson(cfg, workers)?
        }
    };
    let bounds = v.bound_report();
    let mut warnings = v.warnings.clone();
    warnings.extend(report.warnings.iter().cloned());
    let file = ReportFile {
        manifest: Manifest {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.into(),
            subcommand: subcommand.into(),
            config_hash: config::config_hash(&value),
            seed: raw.seed,
            config: value,
            started_at,
            finished_at: output::unix_now(),
        },
        payload: Payload {
            report,
            bounds,
            warnings,
        },
        timing: Timing {
            wall_time_seconds,
            workers,
        },
    };
    output::write_report(&args.out, &file)?;
    if let Some(csv) = &args.csv {
        output::write_atomic(csv, &output::histogram_csv(&file.payload.report)?)?;
    }
    let report = &file.payload.report;
    print!("{}", output::summary(report, &file.payload.bounds));
    println!("  {:<22} {:.3}s on {workers} worker(s)", "wall time", wall_time_seconds);
    println!("  {:<22} {}", "report", args.out.display());
    for w in &file.payload.warnings {
        eprintln!("warning: {w}");
    }
    if matches!(mode, Mode::Hazard) && v.strict && report.budget_violated(v.censor_budget) {
        return Err(Failure::Censoring(format!(
            "censored fraction {} exceeds the budget {} (strict mode)",
            report.censored_fraction, v.censor_budget
        )));
    }
    Ok(())
}
