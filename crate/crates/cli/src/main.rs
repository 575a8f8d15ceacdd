use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use lz_tunneling::model::{Basis, LzParams};
use lz_tunneling::propagator::{propagate, IntegrationConfig};
use lz_tunneling::tunneling_time::tunneling_time;
use lz_tunneling::LzError;
use lz_tunneling_cli::format::{error_json, json, write_curve_csv, write_sweep_csv};
use lz_tunneling_cli::record::{curve_for, ErrorRecord};
use lz_tunneling_cli::{evaluate, limits, run_sweep, LimitsRecord, RunRecord, Spacing, SweepSpec};
use serde::Serialize;

/// Landau-Zener tunneling times: propagation, estimators and closed-form limits.
#[derive(Parser)]
#[command(name = "lztime", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write P(t) and dP/dt on a uniform grid as CSV, plus a JSON summary next to it.
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        integration: IntegrationArgs,
        #[arg(long, default_value_t = Basis::Diabatic)]
        basis: Basis,
        /// Uniform grid points over the window; t = 0 is always added.
        #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(2000..))]
        points: u64,
        /// CSV destination (stdout if omitted, in which case no summary is written).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print one run record as JSON.
    Tau {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        integration: IntegrationArgs,
        #[arg(long, default_value_t = Basis::Diabatic)]
        basis: Basis,
    },
    /// Evaluate a grid of sweep rates and write one CSV row per point.
    Sweep {
        /// Smallest sweep rate, in units of Δ²/(2ħ).
        #[arg(long)]
        alpha_min: f64,
        /// Largest sweep rate, in units of Δ²/(2ħ).
        #[arg(long)]
        alpha_max: f64,
        #[arg(long)]
        points: usize,
        #[arg(long, default_value_t = Spacing::Log)]
        spacing: Spacing,
        #[arg(long, default_value_t = Basis::Diabatic)]
        basis: Basis,
        #[command(flatten)]
        integration: IntegrationArgs,
        /// Worker threads (default: one per core).
        #[arg(long)]
        jobs: Option<usize>,
        /// CSV destination (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the closed-form limiting times as JSON.
    Limits {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = Basis::Diabatic)]
        basis: Basis,
    },
    /// Print a run record and the closed-form times side by side as JSON.
    Compare {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        integration: IntegrationArgs,
        #[arg(long, default_value_t = Basis::Diabatic)]
        basis: Basis,
    },
}

#[derive(Args)]
struct ParamArgs {
    /// Sweep rate in units of Δ²/(2ħ), i.e. the quickness η (Δ = ħ = 1).
    #[arg(long, required_unless_present = "physical", conflicts_with = "physical")]
    alpha: Option<f64>,
    /// Take Δ, α and ħ in user units; times are reported in the same units.
    #[arg(long, requires_all = ["delta", "alpha_phys"])]
    physical: bool,
    #[arg(long, requires = "physical")]
    delta: Option<f64>,
    #[arg(long, requires = "physical")]
    alpha_phys: Option<f64>,
    #[arg(long, requires = "physical", default_value_t = 1.0)]
    hbar: f64,
}

impl ParamArgs {
    fn resolve(&self) -> Result<LzParams, LzError> {
        match (self.physical, self.alpha) {
            (true, _) => LzParams::new(
                self.delta.unwrap_or(f64::NAN),
                self.alpha_phys.unwrap_or(f64::NAN),
                self.hbar,
            ),
            (false, Some(eta)) => LzParams::from_eta(eta),
            (false, None) => Err(LzError::InvalidParams("either --alpha or --physical is required".into())),
        }
    }
}

#[derive(Args)]
struct IntegrationArgs {
    /// Window half-width in units of max(Δ/α, sqrt(ħ/α)).
    #[arg(long)]
    window_factor: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Skip the doubled-window convergence run.
    #[arg(long)]
    no_convergence_check: bool,
}

impl IntegrationArgs {
    fn config(&self) -> IntegrationConfig {
        let mut config = IntegrationConfig::default();
        if let Some(c) = self.window_factor {
            config = config.with_window_factor(c);
        }
        if let Some(r) = self.rel_tol {
            config = config.with_rel_tol(r);
        }
        if self.no_convergence_check {
            config = config.without_convergence_check();
        }
        config
    }
}

#[derive(Serialize)]
struct SimulationSummary {
    eta: f64,
    alpha: f64,
    basis: String,
    t_start: f64,
    t_end: f64,
    rows: usize,
    norm_drift: f64,
    run: Option<RunRecord>,
    error: Option<ErrorRecord>,
}

#[derive(Serialize)]
struct Comparison {
    run: RunRecord,
    limits: LimitsRecord,
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn simulate(
    params: &ParamArgs,
    integration: &IntegrationArgs,
    basis: Basis,
    points: u64,
    out: Option<&Path>,
) -> Result<()> {
    let params = params.resolve()?;
    let traj = propagate(&params, &integration.config())?;
    let curve = curve_for(basis, &traj);
    let (t0, t1) = (traj.t_start(), traj.t_end());
    let n = points as usize - 1;
    let mut times: Vec<f64> = (0..=n)
        .map(|i| if i == n { t1 } else { t0 + (t1 - t0) * i as f64 / n as f64 })
        .collect();
    times.push(0.0);
    times.sort_by(f64::total_cmp);
    times.dedup();
    let rows = times
        .iter()
        .map(|&t| Ok((t, curve.p(t)?, curve.dp_dt(t)?)))
        .collect::<Result<Vec<_>, LzError>>()?;

    match out {
        Some(path) => {
            let mut w = create(path)?;
            write_curve_csv(&mut w, &rows)?;
            w.flush()?;
            let report = tunneling_time(&curve);
            let summary = SimulationSummary {
                eta: params.eta(),
                alpha: params.eta(),
                basis: basis.as_str().to_string(),
                t_start: t0,
                t_end: t1,
                rows: rows.len(),
                norm_drift: traj.norm_drift(),
                run: report.as_ref().ok().map(RunRecord::from_report),
                error: report.as_ref().err().map(ErrorRecord::from),
            };
            let side = sidecar_path(path);
            let mut w = create(&side)?;
            writeln!(w, "{}", json(&summary))?;
            w.flush()?;
        }
        None => write_curve_csv(io::stdout().lock(), &rows)?,
    }
    Ok(())
}

/// Prints either the JSON value or an error object; the exit code reflects which.
fn emit_json<T: Serialize>(result: Result<T, LzError>) -> ExitCode {
    match result {
        Ok(value) => {
            println!("{}", json(&value));
            ExitCode::SUCCESS
        }
        Err(e) => {
            println!("{}", error_json(&e));
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate { params, integration, basis, points, out } => {
            simulate(&params, &integration, basis, points, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Tau { params, integration, basis } => Ok(emit_json(
            params.resolve().and_then(|p| evaluate(&p, basis, &integration.config())).map(|e| e.record),
        )),
        Command::Limits { params, basis } => Ok(emit_json(params.resolve().map(|p| limits(&p, basis)))),
        Command::Compare { params, integration, basis } => Ok(emit_json(params.resolve().and_then(|p| {
            let run = evaluate(&p, basis, &integration.config())?.record;
            Ok(Comparison { run, limits: limits(&p, basis) })
        }))),
        Command::Sweep { alpha_min, alpha_max, points, spacing, basis, integration, jobs, out } => {
            let spec = SweepSpec { alpha_min, alpha_max, points, spacing, basis };
            let rows = run_sweep(&spec, &integration.config(), jobs)?;
            match out {
                Some(path) => {
                    let mut w = create(&path)?;
                    write_sweep_csv(&mut w, &rows)?;
                    w.flush()?;
                }
                None => write_sweep_csv(io::stdout().lock(), &rows)?,
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
