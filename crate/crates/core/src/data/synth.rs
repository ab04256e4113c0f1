//! Hourly aggregate residential load with daily and weekly structure.

use std::f64::consts::TAU;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::TimeSeries;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthLoadConfig {
    /// Mean load level.
    pub base: f64,
    /// Amplitude of the 24 h fundamental.
    pub daily_amplitude: f64,
    /// Hour at which the fundamental peaks.
    pub daily_peak_hour: f64,
    /// Amplitude of the 12 h harmonic (morning/evening double peak).
    pub harmonic_amplitude: f64,
    pub harmonic_peak_hour: f64,
    /// Amplitude of the 168 h modulation.
    pub weekly_amplitude: f64,
    /// Standard deviation of white measurement noise.
    pub noise_sd: f64,
}

impl Default for SynthLoadConfig {
    fn default() -> Self {
        Self {
            base: 1.0,
            daily_amplitude: 0.4,
            daily_peak_hour: 18.0,
            harmonic_amplitude: 0.1,
            harmonic_peak_hour: 8.0,
            weekly_amplitude: 0.03,
            noise_sd: 0.01,
        }
    }
}

/// `days · 24` hourly samples starting at t = 0.
pub fn synth_load_series(cfg: &SynthLoadConfig, seed: u64, days: usize) -> Result<TimeSeries> {
    if days == 0 {
        return Err(Error::InvalidArgument("days must be at least 1".into()));
    }
    if !(cfg.noise_sd.is_finite() && cfg.noise_sd >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "noise standard deviation must be non-negative, got {}",
            cfg.noise_sd
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise =
        Normal::new(0.0, cfg.noise_sd).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let n = days * 24;
    let values = (0..n)
        .map(|k| {
            // Phases are taken modulo the period so that noise-free output
            // is exactly periodic.
            let hour = (k % 24) as f64;
            let week_hour = (k % 168) as f64;
            let daily = cfg.daily_amplitude * (TAU * (hour - cfg.daily_peak_hour) / 24.0).cos();
            let harmonic =
                cfg.harmonic_amplitude * (2.0 * TAU * (hour - cfg.harmonic_peak_hour) / 24.0).cos();
            let weekly = cfg.weekly_amplitude * (TAU * week_hour / 168.0).cos();
            let eps = if cfg.noise_sd > 0.0 {
                noise.sample(&mut rng)
            } else {
                0.0
            };
            cfg.base + daily + harmonic + weekly + eps
        })
        .collect();
    TimeSeries::new(3600.0, 0.0, values)
}
