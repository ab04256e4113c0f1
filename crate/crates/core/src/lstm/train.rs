use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamState};
use super::backward::bptt_gradients;
use super::forward::{as_sequence, LstmState};
use super::params::{init_params, LstmNetwork};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainingConfig {
    pub hidden_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Global L2 norm the gradient is clipped to before each update.
    pub clip_threshold: f64,
    pub seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            hidden_size: 200,
            epochs: 250,
            learning_rate: 0.005,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            clip_threshold: 1.0,
            seed: 0,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_size == 0 {
            return Err(Error::InvalidArgument(
                "hidden_size must be at least 1".into(),
            ));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be at least 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must lie in (0, 1), got {b}"
                )));
            }
        }
        if !(self.epsilon > 0.0 && self.clip_threshold > 0.0) {
            return Err(Error::InvalidArgument(
                "epsilon and clip_threshold must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Trains a fresh network for next-step regression on `series`: inputs are
/// `series[..n−1]`, targets `series[1..]`. Each epoch is one forward and
/// backward pass over the whole sequence from a zero state followed by one
/// Adam update. Returns the network (with `mu = 0`, `sigma = 1`) and the
/// loss measured at each epoch before its update.
pub fn train(series: &[f64], cfg: &TrainingConfig) -> Result<(LstmNetwork, Vec<f64>)> {
    let net = init_params(cfg.hidden_size, 1, 1, cfg.seed)?;
    train_from(net, series, cfg)
}

/// Continues training an existing network; see [`train`].
pub fn train_from(
    mut net: LstmNetwork,
    series: &[f64],
    cfg: &TrainingConfig,
) -> Result<(LstmNetwork, Vec<f64>)> {
    cfg.validate()?;
    if series.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "training needs at least 2 samples, got {}",
            series.len()
        )));
    }
    crate::error::ensure_finite("training series", series)?;
    let inputs = as_sequence(&series[..series.len() - 1]);
    let targets = as_sequence(&series[1..]);
    let initial = LstmState::zeros(net.hidden_size());
    let mut adam = AdamState::new(&net);
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 1..=cfg.epochs {
        let (loss, grads) = bptt_gradients(&net, &inputs, &targets, &initial)?;
        if !loss.is_finite() {
            return Err(Error::Numeric(format!("non-finite loss at epoch {epoch}")));
        }
        history.push(loss);
        adam_step(&mut net, &grads, &mut adam, cfg, epoch as u64)?;
    }
    Ok((net, history))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(epochs: usize) -> TrainingConfig {
        TrainingConfig {
            hidden_size: 6,
            epochs,
            seed: 3,
            ..Default::default()
        }
    }

    #[test]
    fn zero_series_is_fit_immediately() {
        let (_, history) = train(&[0.0; 50], &small(3)).unwrap();
        assert!(history[0] < 1e-4);
    }

    #[test]
    fn constant_series_is_learned() {
        let (_, history) = train(&[0.3; 40], &small(600)).unwrap();
        assert!(history[0] > 1e-2);
        assert!(*history.last().unwrap() < 1e-4, "{:?}", history.last());
    }

    #[test]
    fn sine_loss_drops() {
        let s: Vec<f64> = (0..120).map(|k| (k as f64 * 0.3).sin()).collect();
        let (_, history) = train(&s, &small(150)).unwrap();
        assert!(history.last().unwrap() < &(0.2 * history[0]), "{history:?}");
    }

    #[test]
    fn deterministic_history() {
        let s: Vec<f64> = (0..60).map(|k| (k as f64 * 0.5).cos()).collect();
        let (a, ha) = train(&s, &small(20)).unwrap();
        let (b, hb) = train(&s, &small(20)).unwrap();
        assert_eq!(ha, hb);
        assert_eq!(a, b);
    }

    #[test]
    fn short_series_rejected() {
        assert!(train(&[1.0], &small(1)).is_err());
        assert!(train(&[1.0, f64::NAN], &small(1)).is_err());
        let bad = TrainingConfig {
            epochs: 0,
            ..small(1)
        };
        assert!(train(&[1.0, 2.0], &bad).is_err());
    }
}
