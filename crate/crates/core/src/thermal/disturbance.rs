//! Seeded synthetic disturbance profiles for a winter week.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::model::DisturbanceSample;
use crate::error::{Error, Result};

const DAY: f64 = 86_400.0;
const HOUR: f64 = 3_600.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DisturbanceConfig {
    /// Daily mean of the external temperature, °C.
    pub t_ext_mean: f64,
    /// Amplitude of the 24 h external temperature sinusoid, °C.
    pub t_ext_amplitude: f64,
    /// Hour of day at which the sinusoid peaks.
    pub t_ext_peak_hour: f64,
    /// Standard deviation of the external temperature noise, °C. The noise
    /// is clipped at ±3 standard deviations.
    pub t_ext_noise_sd: f64,
    /// Spacing of the noise knots, s; noise is linearly interpolated between them.
    pub noise_interval: f64,
    /// Lower bound of the occupancy heat gain, W.
    pub q_min: f64,
    /// Upper bound of the occupancy heat gain, W.
    pub q_max: f64,
    /// Duration of each piecewise-constant occupancy segment, s.
    pub q_interval: f64,
    pub solar_enabled: bool,
    /// Solar gain at solar noon, W-equivalent.
    pub solar_peak: f64,
    pub sunrise_hour: f64,
    pub sunset_hour: f64,
}

impl Default for DisturbanceConfig {
    fn default() -> Self {
        Self {
            t_ext_mean: -6.0,
            t_ext_amplitude: 3.0,
            t_ext_peak_hour: 15.0,
            t_ext_noise_sd: 0.5,
            noise_interval: 600.0,
            q_min: 0.0,
            q_max: 1000.0,
            q_interval: HOUR,
            solar_enabled: true,
            solar_peak: 800.0,
            sunrise_hour: 8.0,
            sunset_hour: 16.0,
        }
    }
}

impl DisturbanceConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.t_ext_mean,
            self.t_ext_amplitude,
            self.t_ext_peak_hour,
            self.t_ext_noise_sd,
            self.noise_interval,
            self.q_min,
            self.q_max,
            self.q_interval,
            self.solar_peak,
            self.sunrise_hour,
            self.sunset_hour,
        ];
        if !finite.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("disturbance config"));
        }
        if self.t_ext_amplitude < 0.0 || self.t_ext_noise_sd < 0.0 {
            return Err(Error::InvalidArgument(
                "temperature amplitude and noise must be non-negative".into(),
            ));
        }
        if self.noise_interval <= 0.0 || self.q_interval <= 0.0 {
            return Err(Error::InvalidArgument(
                "noise and occupancy intervals must be positive".into(),
            ));
        }
        if !(0.0 <= self.q_min && self.q_min <= self.q_max) {
            return Err(Error::InvalidArgument(format!(
                "occupancy bounds must satisfy 0 <= q_min <= q_max, got [{}, {}]",
                self.q_min, self.q_max
            )));
        }
        if self.solar_enabled
            && self.sunrise_hour.partial_cmp(&self.sunset_hour) != Some(std::cmp::Ordering::Less)
        {
            return Err(Error::InvalidArgument("sunrise must precede sunset".into()));
        }
        Ok(())
    }

    /// Closed interval that every emitted external temperature lies in.
    pub fn t_ext_bounds(&self) -> (f64, f64) {
        let spread = self.t_ext_amplitude + 3.0 * self.t_ext_noise_sd;
        (self.t_ext_mean - spread, self.t_ext_mean + spread)
    }

    fn solar_at(&self, t: f64) -> f64 {
        if !self.solar_enabled {
            return 0.0;
        }
        let hour = (t % DAY) / HOUR;
        if hour <= self.sunrise_hour || hour >= self.sunset_hour {
            return 0.0;
        }
        let phase = (hour - self.sunrise_hour) / (self.sunset_hour - self.sunrise_hour);
        self.solar_peak * (PI * phase).sin()
    }
}

/// Number of whole steps in `duration`, rejecting non-divisible inputs.
fn step_count(duration: f64, dt: f64) -> Result<usize> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "duration must be positive, got {duration}"
        )));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let n = (duration / dt).round();
    if n < 1.0 || ((n * dt - duration) / duration).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "duration {duration} is not a whole multiple of dt {dt}"
        )));
    }
    Ok(n as usize)
}

/// Generates `duration / dt` disturbance samples at `t = k·dt`.
pub fn generate_disturbances(
    cfg: &DisturbanceConfig,
    seed: u64,
    duration: f64,
    dt: f64,
) -> Result<Vec<DisturbanceSample>> {
    cfg.validate()?;
    let n = step_count(duration, dt)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let noise_knots = (duration / cfg.noise_interval).ceil() as usize + 1;
    let bound = 3.0 * cfg.t_ext_noise_sd;
    let noise: Vec<f64> = if cfg.t_ext_noise_sd > 0.0 {
        let normal = Normal::new(0.0, cfg.t_ext_noise_sd)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        (0..noise_knots)
            .map(|_| normal.sample(&mut rng).clamp(-bound, bound))
            .collect()
    } else {
        vec![0.0; noise_knots]
    };

    let q_segments = (duration / cfg.q_interval).ceil() as usize + 1;
    let occupancy: Vec<f64> = (0..q_segments)
        .map(|_| {
            if cfg.q_max > cfg.q_min {
                rng.random_range(cfg.q_min..=cfg.q_max)
            } else {
                cfg.q_min
            }
        })
        .collect();

    let omega = 2.0 * PI / DAY;
    let peak = cfg.t_ext_peak_hour * HOUR;
    let samples = (0..n)
        .map(|k| {
            let t = k as f64 * dt;
            let pos = t / cfg.noise_interval;
            let knot = (pos.floor() as usize).min(noise_knots - 2);
            let frac = pos - knot as f64;
            let eps = noise[knot] + frac * (noise[knot + 1] - noise[knot]);
            let diurnal = cfg.t_ext_amplitude * (omega * (t - peak)).cos();
            let segment = ((t / cfg.q_interval).floor() as usize).min(q_segments - 1);
            DisturbanceSample {
                t_ext: cfg.t_ext_mean + diurnal + eps,
                q_other: occupancy[segment],
                solar: cfg.solar_at(t),
            }
        })
        .collect();
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_generator_is_constant() {
        let cfg = DisturbanceConfig {
            t_ext_mean: -6.0,
            t_ext_amplitude: 0.0,
            t_ext_noise_sd: 0.0,
            q_min: 500.0,
            q_max: 500.0,
            solar_enabled: false,
            ..Default::default()
        };
        let d = generate_disturbances(&cfg, 1, 7200.0, 1.0).unwrap();
        assert_eq!(d.len(), 7200);
        assert!(d
            .iter()
            .all(|s| *s == DisturbanceSample::new(-6.0, 500.0, 0.0)));
    }

    #[test]
    fn same_seed_same_profile() {
        let cfg = DisturbanceConfig::default();
        let a = generate_disturbances(&cfg, 9, DAY, 10.0).unwrap();
        let b = generate_disturbances(&cfg, 9, DAY, 10.0).unwrap();
        assert_eq!(a, b);
        let c = generate_disturbances(&cfg, 10, DAY, 10.0).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn week_at_one_second_stays_in_bounds() {
        let cfg = DisturbanceConfig::default();
        let d = generate_disturbances(&cfg, 42, 7.0 * DAY, 1.0).unwrap();
        assert_eq!(d.len(), 604_800);
        let (lo, hi) = cfg.t_ext_bounds();
        assert!(d.iter().all(|s| (lo..=hi).contains(&s.t_ext)));
        assert!(d
            .iter()
            .all(|s| (cfg.q_min..=cfg.q_max).contains(&s.q_other)));
        assert!(d.iter().all(|s| (0.0..=cfg.solar_peak).contains(&s.solar)));
        // Night is dark, midday is not.
        assert_eq!(d[2 * 3600].solar, 0.0);
        assert!(d[12 * 3600].solar > 0.9 * cfg.solar_peak);
        let mean_t = d.iter().map(|s| s.t_ext).sum::<f64>() / d.len() as f64;
        assert!((mean_t - cfg.t_ext_mean).abs() < 0.5, "{mean_t}");
    }

    #[test]
    fn rejects_bad_durations() {
        let cfg = DisturbanceConfig::default();
        assert!(generate_disturbances(&cfg, 0, 0.0, 1.0).is_err());
        assert!(generate_disturbances(&cfg, 0, -10.0, 1.0).is_err());
        assert!(generate_disturbances(&cfg, 0, 10.0, 0.0).is_err());
        assert!(generate_disturbances(&cfg, 0, 10.0, 3.0).is_err());
    }
}
