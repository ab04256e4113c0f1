//! Backpropagation through time and its finite-difference oracle.

use super::forward::{mse_loss, network_forward, ForwardCache, LstmState};
use super::params::{Gate, LstmNetwork, ParamSet, Tensors};
use crate::error::{Error, Result};

/// Denominator floor for [`max_relative_error`], so that entries that are
/// both essentially zero compare on absolute error instead.
pub const RELATIVE_ERROR_FLOOR: f64 = 1e-6;

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Accumulates `dz ⊗ x`, `dz ⊗ h_prev` and `dz` into the gate gradient and
/// adds `Rᵀ·dz` into `dh_prev`.
fn accumulate_gate(
    gate: &Gate,
    grad: &mut Gate,
    dz: &[f64],
    x: &[f64],
    h_prev: &[f64],
    dh_prev: &mut [f64],
) {
    for (j, &d) in dz.iter().enumerate() {
        if d == 0.0 {
            continue;
        }
        axpy(d, x, grad.w.row_mut(j));
        axpy(d, h_prev, grad.r.row_mut(j));
        grad.b[j] += d;
        axpy(d, gate.r.row(j), dh_prev);
    }
}

/// Reverse-mode gradients of the mean squared error over a cached forward pass.
pub fn backward(net: &LstmNetwork, cache: &ForwardCache, targets: &[Vec<f64>]) -> Result<ParamSet> {
    let steps = cache.outputs.len();
    if targets.len() != steps {
        return Err(Error::LengthMismatch {
            left: steps,
            right: targets.len(),
        });
    }
    let out_dim = net.output_size();
    if targets.iter().any(|t| t.len() != out_dim) {
        return Err(Error::ShapeMismatch {
            what: "targets",
            expected: out_dim,
            actual: targets
                .iter()
                .map(Vec::len)
                .find(|&l| l != out_dim)
                .unwrap_or(0),
        });
    }
    let hidden = net.hidden_size();
    let scale = 2.0 / (steps * out_dim) as f64;
    let mut grads = ParamSet::zeros_like(net);

    let mut dh_next = vec![0.0; hidden];
    let mut dc_next = vec![0.0; hidden];
    let mut dh = vec![0.0; hidden];
    let mut dz_f = vec![0.0; hidden];
    let mut dz_g = vec![0.0; hidden];
    let mut dz_i = vec![0.0; hidden];
    let mut dz_o = vec![0.0; hidden];

    for t in (0..steps).rev() {
        let gates = &cache.gates[t];
        let prev = &cache.states[t];
        let h = &cache.states[t + 1].h;
        let x = &cache.inputs[t];

        dh.copy_from_slice(&dh_next);
        for (k, (y, target)) in cache.outputs[t].iter().zip(&targets[t]).enumerate() {
            let dy = scale * (y - target);
            axpy(dy, h, grads.dense.w.row_mut(k));
            grads.dense.b[k] += dy;
            axpy(dy, net.dense.w.row(k), &mut dh);
        }

        for k in 0..hidden {
            let (f, g, i, o, tc) = (
                gates.f[k],
                gates.g[k],
                gates.i[k],
                gates.o[k],
                gates.tanh_c[k],
            );
            let dc = dh[k] * o * (1.0 - tc * tc) + dc_next[k];
            dz_o[k] = dh[k] * tc * o * (1.0 - o);
            dz_f[k] = dc * prev.c[k] * f * (1.0 - f);
            dz_i[k] = dc * g * i * (1.0 - i);
            dz_g[k] = dc * i * (1.0 - g * g);
            dc_next[k] = dc * f;
        }

        dh_next.iter_mut().for_each(|v| *v = 0.0);
        let lstm = &net.lstm;
        let g = &mut grads.lstm;
        accumulate_gate(&lstm.forget, &mut g.forget, &dz_f, x, &prev.h, &mut dh_next);
        accumulate_gate(
            &lstm.candidate,
            &mut g.candidate,
            &dz_g,
            x,
            &prev.h,
            &mut dh_next,
        );
        accumulate_gate(
            &lstm.input_gate,
            &mut g.input_gate,
            &dz_i,
            x,
            &prev.h,
            &mut dh_next,
        );
        accumulate_gate(&lstm.output, &mut g.output, &dz_o, x, &prev.h, &mut dh_next);
    }
    Ok(grads)
}

/// Loss and exact gradients of `mse_loss ∘ network_forward` with respect
/// to every parameter, backpropagated through the full sequence.
pub fn bptt_gradients(
    net: &LstmNetwork,
    sequence: &[Vec<f64>],
    targets: &[Vec<f64>],
    initial: &LstmState,
) -> Result<(f64, ParamSet)> {
    let (outputs, cache) = network_forward(net, sequence, initial)?;
    let loss = mse_loss(&outputs, targets)?;
    let grads = backward(net, &cache, targets)?;
    Ok((loss, grads))
}

/// `(f(θ + ε) − f(θ − ε)) / 2ε`.
pub fn central_difference(f: impl Fn(f64) -> f64, theta: f64, eps: f64) -> f64 {
    (f(theta + eps) - f(theta - eps)) / (2.0 * eps)
}

/// Central-difference estimate of every parameter gradient of the loss.
pub fn finite_diff_gradients(
    net: &LstmNetwork,
    sequence: &[Vec<f64>],
    targets: &[Vec<f64>],
    initial: &LstmState,
    eps: f64,
) -> Result<ParamSet> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step must be positive, got {eps}"
        )));
    }
    let loss_of = |probe: &LstmNetwork| -> Result<f64> {
        let (out, _) = network_forward(probe, sequence, initial)?;
        mse_loss(&out, targets)
    };
    let mut probe = net.clone();
    let mut grads = ParamSet::zeros_like(net);
    let sizes: Vec<usize> = net.tensors().iter().map(|t| t.len()).collect();
    for (ti, &len) in sizes.iter().enumerate() {
        for k in 0..len {
            let original = probe.tensors()[ti][k];
            probe.tensors_mut()[ti][k] = original + eps;
            let up = loss_of(&probe)?;
            probe.tensors_mut()[ti][k] = original - eps;
            let down = loss_of(&probe)?;
            probe.tensors_mut()[ti][k] = original;
            grads.tensors_mut()[ti][k] = (up - down) / (2.0 * eps);
        }
    }
    Ok(grads)
}

/// Largest `|a − b| / max(|a|, |b|, RELATIVE_ERROR_FLOOR)` over all entries.
pub fn max_relative_error(a: &ParamSet, b: &ParamSet) -> f64 {
    a.tensors()
        .iter()
        .zip(b.tensors())
        .flat_map(|(x, y)| x.iter().zip(y.iter()))
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(RELATIVE_ERROR_FLOOR))
        .fold(0.0, f64::max)
}
