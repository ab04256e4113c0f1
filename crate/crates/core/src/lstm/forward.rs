//! LSTM cell and sequence-to-sequence forward pass.

use serde::{Deserialize, Serialize};

use super::params::{DenseParams, Gate, LstmNetwork, LstmParams};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LstmState {
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

impl LstmState {
    pub fn zeros(hidden: usize) -> Self {
        Self {
            h: vec![0.0; hidden],
            c: vec![0.0; hidden],
        }
    }
}

/// Gate activations of one step, kept for the backward pass.
#[derive(Clone, Debug, PartialEq)]
pub struct GateCache {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub i: Vec<f64>,
    pub o: Vec<f64>,
    pub c: Vec<f64>,
    pub tanh_c: Vec<f64>,
}

/// Everything the backward pass needs from an unrolled forward pass.
#[derive(Clone, Debug)]
pub struct ForwardCache {
    pub inputs: Vec<Vec<f64>>,
    /// `states[t]` is the state entering step `t`; the last entry is the final state.
    pub states: Vec<LstmState>,
    pub gates: Vec<GateCache>,
    pub outputs: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn final_state(&self) -> &LstmState {
        self.states.last().expect("cache holds the initial state")
    }
}

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Dot product with four independent accumulators; the summation order is
/// fixed, so results are reproducible bit for bit.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks_a = a.chunks_exact(4);
    let chunks_b = b.chunks_exact(4);
    let tail: f64 = chunks_a
        .remainder()
        .iter()
        .zip(chunks_b.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (ca, cb) in chunks_a.zip(chunks_b) {
        acc[0] += ca[0] * cb[0];
        acc[1] += ca[1] * cb[1];
        acc[2] += ca[2] * cb[2];
        acc[3] += ca[3] * cb[3];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn preactivation(gate: &Gate, x: &[f64], h: &[f64], out: &mut [f64]) {
    for (j, z) in out.iter_mut().enumerate() {
        *z = gate.b[j] + dot(gate.w.row(j), x) + dot(gate.r.row(j), h);
    }
}

fn check_step(params: &LstmParams, x: &[f64], state: &LstmState) -> Result<()> {
    if x.len() != params.input {
        return Err(Error::ShapeMismatch {
            what: "LSTM input",
            expected: params.input,
            actual: x.len(),
        });
    }
    if state.h.len() != params.hidden || state.c.len() != params.hidden {
        return Err(Error::ShapeMismatch {
            what: "LSTM state",
            expected: params.hidden,
            actual: state.h.len().min(state.c.len()),
        });
    }
    Ok(())
}

fn cell_unchecked(params: &LstmParams, x: &[f64], state: &LstmState) -> (LstmState, GateCache) {
    let hidden = params.hidden;
    let mut f = vec![0.0; hidden];
    let mut g = vec![0.0; hidden];
    let mut i = vec![0.0; hidden];
    let mut o = vec![0.0; hidden];
    preactivation(&params.forget, x, &state.h, &mut f);
    preactivation(&params.candidate, x, &state.h, &mut g);
    preactivation(&params.input_gate, x, &state.h, &mut i);
    preactivation(&params.output, x, &state.h, &mut o);
    f.iter_mut().for_each(|v| *v = sigmoid(*v));
    g.iter_mut().for_each(|v| *v = v.tanh());
    i.iter_mut().for_each(|v| *v = sigmoid(*v));
    o.iter_mut().for_each(|v| *v = sigmoid(*v));

    let c: Vec<f64> = (0..hidden)
        .map(|k| f[k] * state.c[k] + i[k] * g[k])
        .collect();
    let tanh_c: Vec<f64> = c.iter().map(|v| v.tanh()).collect();
    let h: Vec<f64> = o.iter().zip(&tanh_c).map(|(o, t)| o * t).collect();
    (
        LstmState { h, c: c.clone() },
        GateCache {
            f,
            g,
            i,
            o,
            c,
            tanh_c,
        },
    )
}

/// One LSTM step:
///
/// ```text
/// f = σ(W_f x + R_f h + b_f)    g = tanh(W_g x + R_g h + b_g)
/// i = σ(W_i x + R_i h + b_i)    o = σ(W_o x + R_o h + b_o)
/// c' = f ∘ c + i ∘ g            h' = o ∘ tanh(c')
/// ```
pub fn lstm_cell_forward(
    params: &LstmParams,
    x: &[f64],
    state: &LstmState,
) -> Result<(LstmState, GateCache)> {
    check_step(params, x, state)?;
    Ok(cell_unchecked(params, x, state))
}

pub(crate) fn dense_forward(dense: &DenseParams, h: &[f64]) -> Vec<f64> {
    dense
        .b
        .iter()
        .enumerate()
        .map(|(k, b)| b + dot(dense.w.row(k), h))
        .collect()
}

impl LstmNetwork {
    /// Advances `state` by one input and returns the dense output.
    pub fn step(&self, x: &[f64], state: &mut LstmState) -> Result<Vec<f64>> {
        check_step(&self.lstm, x, state)?;
        let (next, _) = cell_unchecked(&self.lstm, x, state);
        *state = next;
        Ok(dense_forward(&self.dense, &state.h))
    }
}

/// Unrolls the cell over `sequence` and applies the dense head at every
/// step, returning one output per input.
pub fn network_forward(
    net: &LstmNetwork,
    sequence: &[Vec<f64>],
    initial: &LstmState,
) -> Result<(Vec<Vec<f64>>, ForwardCache)> {
    if sequence.is_empty() {
        return Err(Error::InvalidArgument("input sequence is empty".into()));
    }
    if net.dense.w.cols != net.lstm.hidden {
        return Err(Error::ShapeMismatch {
            what: "dense weights",
            expected: net.lstm.hidden,
            actual: net.dense.w.cols,
        });
    }
    let n = sequence.len();
    let mut cache = ForwardCache {
        inputs: sequence.to_vec(),
        states: Vec::with_capacity(n + 1),
        gates: Vec::with_capacity(n),
        outputs: Vec::with_capacity(n),
    };
    cache.states.push(initial.clone());
    for x in sequence {
        let state = cache.states.last().expect("non-empty");
        check_step(&net.lstm, x, state)?;
        let (next, gates) = cell_unchecked(&net.lstm, x, state);
        cache.outputs.push(dense_forward(&net.dense, &next.h));
        cache.states.push(next);
        cache.gates.push(gates);
    }
    Ok((cache.outputs.clone(), cache))
}

/// Mean squared error over every time step and output component.
pub fn mse_loss(preds: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<f64> {
    if preds.len() != targets.len() {
        return Err(Error::LengthMismatch {
            left: preds.len(),
            right: targets.len(),
        });
    }
    if preds.is_empty() {
        return Err(Error::InvalidArgument("loss over an empty sequence".into()));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for (p, t) in preds.iter().zip(targets) {
        if p.len() != t.len() {
            return Err(Error::LengthMismatch {
                left: p.len(),
                right: t.len(),
            });
        }
        sum += p.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        count += p.len();
    }
    Ok(sum / count as f64)
}

/// Wraps a scalar series as a sequence of one-element vectors.
pub fn as_sequence(values: &[f64]) -> Vec<Vec<f64>> {
    values.iter().map(|v| vec![*v]).collect()
}
