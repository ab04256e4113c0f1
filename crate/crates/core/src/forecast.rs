//! Standardization, closed-loop and one-step-ahead forecasting, and RMSE.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::lstm::{train, LstmNetwork, LstmState, TrainingConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForecastMode {
    /// Each prediction is fed back as the next input.
    ClosedLoop,
    /// The state advances on the observed value after every prediction.
    OneStep,
}

impl std::fmt::Display for ForecastMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            ForecastMode::ClosedLoop => "closed_loop",
            ForecastMode::OneStep => "one_step",
        })
    }
}

/// Mean and sample standard deviation (n − 1 denominator).
pub fn standardize(series: &[f64]) -> Result<(Vec<f64>, f64, f64)> {
    if series.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "standardization needs at least 2 samples, got {}",
            series.len()
        )));
    }
    ensure_finite("series", series)?;
    let n = series.len() as f64;
    let mu = series.iter().sum::<f64>() / n;
    let var = series.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / (n - 1.0);
    let sigma = var.sqrt();
    if sigma == 0.0 {
        return Err(Error::ConstantSeries);
    }
    Ok((standardize_with(series, mu, sigma), mu, sigma))
}

pub fn standardize_with(series: &[f64], mu: f64, sigma: f64) -> Vec<f64> {
    series.iter().map(|v| (v - mu) / sigma).collect()
}

pub fn destandardize(z: &[f64], mu: f64, sigma: f64) -> Vec<f64> {
    z.iter().map(|v| v * sigma + mu).collect()
}

pub fn rmse(preds: &[f64], obs: &[f64]) -> Result<f64> {
    if preds.len() != obs.len() {
        return Err(Error::LengthMismatch {
            left: preds.len(),
            right: obs.len(),
        });
    }
    if preds.is_empty() {
        return Err(Error::InvalidArgument("RMSE of an empty series".into()));
    }
    let sum: f64 = preds.iter().zip(obs).map(|(p, o)| (p - o) * (p - o)).sum();
    Ok((sum / preds.len() as f64).sqrt())
}

fn check_scalar_net(net: &LstmNetwork) -> Result<()> {
    if net.input_size() != 1 || net.output_size() != 1 {
        return Err(Error::InvalidArgument(format!(
            "forecasting needs a 1-in/1-out network, got {}-in/{}-out",
            net.input_size(),
            net.output_size()
        )));
    }
    net.validate()
}

/// Runs the network from a zero state over the whole history; returns the
/// warmed state and the standardized prediction for the step after it.
fn warm_up(net: &LstmNetwork, history: &[f64]) -> Result<(LstmState, f64)> {
    if history.is_empty() {
        return Err(Error::InvalidArgument("forecast history is empty".into()));
    }
    ensure_finite("forecast history", history)?;
    let mut state = LstmState::zeros(net.hidden_size());
    let mut y = 0.0;
    for z in standardize_with(history, net.mu, net.sigma) {
        y = net.step(&[z], &mut state)?[0];
    }
    Ok((state, y))
}

/// Closed-loop forecast in standardized units. Every prediction is mapped
/// to original units and back before being fed in, which is the same path
/// an observation takes in [`forecast_one_step`].
pub fn forecast_closed_loop_standardized(
    net: &LstmNetwork,
    history: &[f64],
    horizon: usize,
) -> Result<Vec<f64>> {
    check_scalar_net(net)?;
    if horizon == 0 {
        return Ok(Vec::new());
    }
    let (mut state, mut y) = warm_up(net, history)?;
    let mut out = Vec::with_capacity(horizon);
    out.push(y);
    while out.len() < horizon {
        let original = y * net.sigma + net.mu;
        let z = (original - net.mu) / net.sigma;
        y = net.step(&[z], &mut state)?[0];
        out.push(y);
    }
    Ok(out)
}

/// Multi-step forecast of `horizon` values following `history` (original units).
pub fn forecast_closed_loop(
    net: &LstmNetwork,
    history: &[f64],
    horizon: usize,
) -> Result<Vec<f64>> {
    let z = forecast_closed_loop_standardized(net, history, horizon)?;
    Ok(destandardize(&z, net.mu, net.sigma))
}

pub fn forecast_one_step_standardized(
    net: &LstmNetwork,
    history: &[f64],
    observations: &[f64],
) -> Result<Vec<f64>> {
    check_scalar_net(net)?;
    if observations.is_empty() {
        return Err(Error::InvalidArgument("no observations to forecast".into()));
    }
    ensure_finite("observations", observations)?;
    let (mut state, mut y) = warm_up(net, history)?;
    let mut out = Vec::with_capacity(observations.len());
    out.push(y);
    for obs in &observations[..observations.len() - 1] {
        let z = (obs - net.mu) / net.sigma;
        y = net.step(&[z], &mut state)?[0];
        out.push(y);
    }
    Ok(out)
}

/// One-step-ahead forecast: prediction `k` is made after the network has
/// seen the history and `observations[..k]`.
pub fn forecast_one_step(
    net: &LstmNetwork,
    history: &[f64],
    observations: &[f64],
) -> Result<Vec<f64>> {
    let z = forecast_one_step_standardized(net, history, observations)?;
    Ok(destandardize(&z, net.mu, net.sigma))
}

/// Standardizes a raw training series, trains on it, and stores the
/// statistics in the returned network.
pub fn fit(train_series: &[f64], cfg: &TrainingConfig) -> Result<(LstmNetwork, Vec<f64>)> {
    let (z, mu, sigma) = standardize(train_series)?;
    let (mut net, history) = train(&z, cfg)?;
    net.mu = mu;
    net.sigma = sigma;
    Ok((net, history))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult {
    pub mode: ForecastMode,
    /// Seconds between consecutive predictions.
    pub step: f64,
    /// Time of the first prediction, s.
    pub start: f64,
    pub predictions: Vec<f64>,
    pub observations: Vec<f64>,
    pub rmse: f64,
}

#[derive(Serialize)]
struct Summary {
    mode: ForecastMode,
    steps: usize,
    rmse: f64,
}

impl ForecastResult {
    pub fn new(
        mode: ForecastMode,
        step: f64,
        start: f64,
        predictions: Vec<f64>,
        observations: Vec<f64>,
    ) -> Result<Self> {
        let rmse = rmse(&predictions, &observations)?;
        Ok(Self {
            mode,
            step,
            start,
            predictions,
            observations,
            rmse,
        })
    }

    /// RMSE divided by a scale, typically the training series' standard deviation.
    pub fn normalized_rmse(&self, sigma: f64) -> f64 {
        self.rmse / sigma
    }

    /// `{"mode": ..., "steps": ..., "rmse": ...}` on one line.
    pub fn summary_json(&self) -> String {
        serde_json::to_string(&Summary {
            mode: self.mode,
            steps: self.predictions.len(),
            rmse: self.rmse,
        })
        .expect("summary serializes")
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_forecast_csv(
            path,
            self.start,
            self.step,
            &self.predictions,
            &self.observations,
        )
    }
}

/// Writes `t,prediction,observation`. Rows past the end of `observations`
/// leave the observation cell empty.
pub fn write_forecast_csv(
    path: &Path,
    start: f64,
    step: f64,
    predictions: &[f64],
    observations: &[f64],
) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(out, "t,prediction,observation").map_err(io)?;
    for (k, p) in predictions.iter().enumerate() {
        let t = start + k as f64 * step;
        match observations.get(k) {
            Some(o) => writeln!(out, "{t},{p},{o}"),
            None => writeln!(out, "{t},{p},"),
        }
        .map_err(io)?;
    }
    out.flush().map_err(io)
}
