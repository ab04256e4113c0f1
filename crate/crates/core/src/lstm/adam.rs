use super::params::{LstmNetwork, ParamSet, Tensors};
use super::train::TrainingConfig;
use crate::error::{Error, Result};

/// First and second moment estimates, shaped like the parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub m: ParamSet,
    pub v: ParamSet,
}

impl AdamState {
    pub fn new(net: &LstmNetwork) -> Self {
        Self {
            m: ParamSet::zeros_like(net),
            v: ParamSet::zeros_like(net),
        }
    }
}

/// Factor that brings `norm` down to `threshold`, or 1 when already within it.
pub fn clip_factor(norm: f64, threshold: f64) -> f64 {
    if norm > threshold && norm > 0.0 {
        threshold / norm
    } else {
        1.0
    }
}

/// One Adam update with bias correction. The gradient is first rescaled
/// so that its global L2 norm does not exceed `cfg.clip_threshold`.
/// Returns the gradient norm before clipping.
pub fn adam_step(
    net: &mut LstmNetwork,
    grads: &ParamSet,
    state: &mut AdamState,
    cfg: &TrainingConfig,
    t: u64,
) -> Result<f64> {
    if t == 0 {
        return Err(Error::InvalidArgument("Adam step index starts at 1".into()));
    }
    let norm = grads.l2_norm();
    if !norm.is_finite() {
        return Err(Error::Numeric("non-finite gradient norm".into()));
    }
    let clip = clip_factor(norm, cfg.clip_threshold);
    let (b1, b2) = (cfg.beta1, cfg.beta2);
    let correction1 = 1.0 - b1.powf(t as f64);
    let correction2 = 1.0 - b2.powf(t as f64);

    let params = net.tensors_mut();
    let g = grads.tensors();
    let m = state.m.tensors_mut();
    let v = state.v.tensors_mut();
    if params.len() != g.len() || g.len() != m.len() {
        return Err(Error::ShapeMismatch {
            what: "gradient tensors",
            expected: params.len(),
            actual: g.len(),
        });
    }
    for (((p, g), m), v) in params.into_iter().zip(g).zip(m).zip(v) {
        if p.len() != g.len() {
            return Err(Error::ShapeMismatch {
                what: "gradient tensor",
                expected: p.len(),
                actual: g.len(),
            });
        }
        for k in 0..p.len() {
            let gk = clip * g[k];
            m[k] = b1 * m[k] + (1.0 - b1) * gk;
            v[k] = b2 * v[k] + (1.0 - b2) * gk * gk;
            let m_hat = m[k] / correction1;
            let v_hat = v[k] / correction2;
            p[k] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
        }
    }
    Ok(norm)
}
