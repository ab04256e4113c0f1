//! `thermocast` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error,
//! 3 numeric failure (non-finite loss, failed gradient check).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::data::{
    emit_plot_svg, read_column_csv, read_series_csv, split_series, synth_load_series,
    write_series_csv, SynthLoadConfig, TimeSeries,
};
use crate::error::{Error, Result};
use crate::forecast::{
    fit, forecast_closed_loop, forecast_one_step, write_forecast_csv, ForecastMode, ForecastResult,
};
use crate::lstm::{gradient_check, ModelDocument, TrainingConfig};
use crate::thermal::{
    average_power, generate_disturbances, simulate, DisturbanceConfig, RelayConfig, ThermalModel,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

const DAY: f64 = 86_400.0;
const GRADCHECK_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub model: ThermalModel,
    pub relay: RelayConfig,
    pub disturbances: DisturbanceConfig,
    /// Integration step, s.
    pub dt: f64,
    /// Simulated horizon, s.
    pub duration: f64,
    /// Averaging window for the load profile, s.
    pub window: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            model: ThermalModel::default(),
            relay: RelayConfig::default(),
            disturbances: DisturbanceConfig::default(),
            dt: 1.0,
            duration: 7.0 * DAY,
            window: 100.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForecastConfig {
    pub mode: ForecastMode,
    /// Closed-loop horizon in steps; defaults to the length of the held-out part.
    pub horizon: Option<usize>,
}

impl Default for ForecastConfig {
    fn default() -> Self {
        Self {
            mode: ForecastMode::ClosedLoop,
            horizon: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IoConfig {
    /// Seed for the disturbance and synthetic load generators.
    pub seed: u64,
    /// When set, subcommands also write SVG charts into this directory.
    pub plot_dir: Option<PathBuf>,
}

impl Default for IoConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            plot_dir: None,
        }
    }
}

/// Configuration file schema. Every field is optional; unknown keys are errors.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub sim: SimConfig,
    pub train: TrainingConfig,
    pub forecast: ForecastConfig,
    pub synth: SynthLoadConfig,
    pub io: IoConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "thermocast",
    version,
    about = "Thermostatic load simulation and LSTM load forecasting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Closed,
    Onestep,
}

impl From<ModeArg> for ForecastMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Closed => ForecastMode::ClosedLoop,
            ModeArg::Onestep => ForecastMode::OneStep,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate the relay-controlled house and export the trace and averaged load.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        avg_out: PathBuf,
    },
    /// Generate a synthetic hourly aggregate load series.
    GenData {
        #[arg(long, default_value_t = 365)]
        days: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train on the leading days of a series and save the model.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        train_days: f64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        model: PathBuf,
    },
    /// Forecast the held-out part of a series with a trained model.
    Forecast {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the training length recorded in the model.
        #[arg(long)]
        train_days: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        horizon: Option<i64>,
    },
    /// RMSE between a prediction file and an observation file.
    Evaluate {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        obs: PathBuf,
    },
    /// Check BPTT gradients against central finite differences.
    Gradcheck {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Numeric(_) => EXIT_NUMERIC,
        _ => EXIT_DATA,
    }
}

/// Parses `argv` (including the program name) and runs the subcommand,
/// writing results to stdout and diagnostics to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_output(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with_output<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Simulate {
            config,
            out: trace_path,
            avg_out,
        } => cmd_simulate(config.as_deref(), &trace_path, &avg_out, out),
        Command::GenData {
            days,
            seed,
            config,
            out: path,
        } => cmd_gen_data(days, seed, config.as_deref(), &path, out),
        Command::Train {
            data,
            train_days,
            config,
            model,
        } => cmd_train(&data, train_days, config.as_deref(), &model, out),
        Command::Forecast {
            model,
            data,
            mode,
            out: path,
            config,
            train_days,
            horizon,
        } => cmd_forecast(
            &model,
            &data,
            mode.map(Into::into),
            &path,
            config.as_deref(),
            train_days,
            horizon,
            out,
        ),
        Command::Evaluate { pred, obs } => cmd_evaluate(&pred, &obs, out),
        Command::Gradcheck { seed } => cmd_gradcheck(seed, out),
    }
}

fn print(out: &mut dyn Write, line: &str) -> Result<()> {
    writeln!(out, "{line}").map_err(|e| Error::io("<stdout>", e))
}

fn plot(cfg: &RunConfig, name: &str, series: &[TimeSeries], labels: &[&str]) -> Result<()> {
    if let Some(dir) = &cfg.io.plot_dir {
        emit_plot_svg(series, labels, &dir.join(name))?;
    }
    Ok(())
}

fn cmd_simulate(
    config: Option<&Path>,
    trace_path: &Path,
    avg_path: &Path,
    out: &mut dyn Write,
) -> Result<i32> {
    let cfg = RunConfig::load_or_default(config)?;
    let sim = &cfg.sim;
    let disturbances = generate_disturbances(&sim.disturbances, cfg.io.seed, sim.duration, sim.dt)?;
    let trace = simulate(&sim.model, &sim.relay, &disturbances, sim.dt)?;
    let load = average_power(&trace, sim.window)?;
    trace.write_csv(trace_path)?;
    write_series_csv(&load, avg_path)?;

    if cfg.io.plot_dir.is_some() {
        let temp = TimeSeries::new(trace.dt, 0.0, trace.indoor_temp.clone())?;
        let power = TimeSeries::new(trace.dt, 0.0, trace.heater_power.clone())?;
        plot(
            &cfg,
            "indoor_temperature.svg",
            &[temp],
            &["indoor temperature (°C)"],
        )?;
        plot(
            &cfg,
            "heater_power.svg",
            &[power, load.clone()],
            &["switching (W)", "average (W)"],
        )?;
    }

    let mean_power = load.values.iter().sum::<f64>() / load.len() as f64;
    let summary = serde_json::json!({
        "samples": trace.len(),
        "load_samples": load.len(),
        "duty_cycle": trace.duty_cycle(),
        "mean_power": mean_power,
    });
    print(out, &summary.to_string())?;
    Ok(EXIT_OK)
}

fn cmd_gen_data(
    days: usize,
    seed: Option<u64>,
    config: Option<&Path>,
    path: &Path,
    out: &mut dyn Write,
) -> Result<i32> {
    let cfg = RunConfig::load_or_default(config)?;
    let series = synth_load_series(&cfg.synth, seed.unwrap_or(cfg.io.seed), days)?;
    write_series_csv(&series, path)?;
    plot(
        &cfg,
        "synthetic_load.svg",
        std::slice::from_ref(&series),
        &["load"],
    )?;
    print(
        out,
        &serde_json::json!({ "samples": series.len() }).to_string(),
    )?;
    Ok(EXIT_OK)
}

fn train_count(series: &TimeSeries, train_days: f64, flag: &str) -> Result<usize> {
    if !(train_days.is_finite() && train_days > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "{flag} must be positive, got {train_days}"
        )));
    }
    let n = series.samples_in(train_days * DAY).map_err(|_| {
        Error::InvalidArgument(format!(
            "{flag} {train_days} is not a whole number of {} s samples",
            series.step
        ))
    })?;
    if n == 0 || n >= series.len() {
        return Err(Error::InvalidArgument(format!(
            "{flag} {train_days} leaves no held-out samples in a series of {} samples",
            series.len()
        )));
    }
    Ok(n)
}

fn cmd_train(
    data: &Path,
    train_days: f64,
    config: Option<&Path>,
    model: &Path,
    out: &mut dyn Write,
) -> Result<i32> {
    let cfg = RunConfig::load_or_default(config)?;
    let series = read_series_csv(data)?;
    let n = train_count(&series, train_days, "--train-days")?;
    let (train, _) = split_series(&series, n, series.len() - n)?;
    let (net, history) = fit(&train.values, &cfg.train)?;
    ModelDocument::new(&net, cfg.train.clone(), Some(n)).save(model)?;
    let summary = serde_json::json!({
        "train_samples": n,
        "epochs": history.len(),
        "first_loss": history.first(),
        "final_loss": history.last(),
    });
    print(out, &summary.to_string())?;
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_forecast(
    model: &Path,
    data: &Path,
    mode: Option<ForecastMode>,
    path: &Path,
    config: Option<&Path>,
    train_days: Option<f64>,
    horizon: Option<i64>,
    out: &mut dyn Write,
) -> Result<i32> {
    let cfg = RunConfig::load_or_default(config)?;
    let doc = ModelDocument::load(model)?;
    let net = doc.network()?;
    let series = read_series_csv(data)?;
    let n = match (train_days, doc.train_samples) {
        (Some(days), _) => train_count(&series, days, "--train-days")?,
        (None, Some(n)) if n < series.len() => n,
        (None, Some(n)) => {
            return Err(Error::InvalidArgument(format!(
                "{}: model was trained on {n} samples but {} has only {}",
                model.display(),
                data.display(),
                series.len()
            )))
        }
        (None, None) => {
            return Err(Error::InvalidArgument(format!(
                "{} does not record its training length; pass --train-days",
                model.display()
            )))
        }
    };
    let (history, test) = split_series(&series, n, series.len() - n)?;
    let mode = mode.unwrap_or(cfg.forecast.mode);

    let (predictions, observations) = match mode {
        ForecastMode::ClosedLoop => {
            let horizon = match horizon {
                Some(h) if h < 0 => {
                    return Err(Error::InvalidArgument(format!(
                        "--horizon must be non-negative, got {h}"
                    )))
                }
                Some(h) => h as usize,
                None => cfg.forecast.horizon.unwrap_or(test.len()),
            };
            let preds = forecast_closed_loop(&net, &history.values, horizon)?;
            let obs = test.values[..horizon.min(test.len())].to_vec();
            (preds, obs)
        }
        ForecastMode::OneStep => {
            let preds = forecast_one_step(&net, &history.values, &test.values)?;
            (preds, test.values.clone())
        }
    };
    if predictions.iter().any(|p| !p.is_finite()) {
        return Err(Error::Numeric("forecast produced non-finite values".into()));
    }
    write_forecast_csv(path, test.start, test.step, &predictions, &observations)?;
    if predictions.is_empty() {
        print(
            out,
            &serde_json::json!({ "mode": mode, "steps": 0, "rmse": null }).to_string(),
        )?;
        return Ok(EXIT_OK);
    }

    let scored = predictions.len().min(observations.len());
    let result = ForecastResult::new(
        mode,
        test.step,
        test.start,
        predictions[..scored].to_vec(),
        observations[..scored].to_vec(),
    )?;
    if cfg.io.plot_dir.is_some() {
        let obs = TimeSeries::new(test.step, test.start, result.observations.clone())?;
        let pred = TimeSeries::new(test.step, test.start, result.predictions.clone())?;
        plot(
            &cfg,
            "forecast.svg",
            &[obs, pred],
            &["observed", "forecast"],
        )?;
    }
    print(out, &result.summary_json())?;
    Ok(EXIT_OK)
}

fn cmd_evaluate(pred: &Path, obs: &Path, out: &mut dyn Write) -> Result<i32> {
    let p = read_column_csv(pred, &["prediction", "value"])?;
    let o = read_column_csv(obs, &["observation", "value"])?;
    if p.len() != o.len() {
        return Err(Error::InvalidArgument(format!(
            "length mismatch: {} has {} predictions, {} has {} observations",
            pred.display(),
            p.len(),
            obs.display(),
            o.len()
        )));
    }
    let r = crate::forecast::rmse(&p, &o)?;
    print(out, &r.to_string())?;
    Ok(EXIT_OK)
}

fn cmd_gradcheck(seed: u64, out: &mut dyn Write) -> Result<i32> {
    let report = gradient_check(seed, 10, 4, 20, 1e-5)?;
    for (s, e) in &report.cases {
        print(out, &format!("seed {s}: max relative error {e:.3e}"))?;
    }
    let max = report.max_error();
    print(
        out,
        &format!("max relative error {max:.3e} (tolerance {GRADCHECK_TOLERANCE:e})"),
    )?;
    if !report.passed(GRADCHECK_TOLERANCE) {
        return Err(Error::Numeric(format!(
            "gradient check failed: {max:e} >= {GRADCHECK_TOLERANCE:e}"
        )));
    }
    Ok(EXIT_OK)
}
