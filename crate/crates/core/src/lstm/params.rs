use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                what: "matrix data",
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    fn glorot(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Self {
        let limit = (6.0 / (rows + cols) as f64).sqrt();
        let dist = Uniform::new_inclusive(-limit, limit).expect("finite Glorot limit");
        Self {
            rows,
            cols,
            data: (0..rows * cols).map(|_| dist.sample(rng)).collect(),
        }
    }
}

/// Weights of one gate: `z = W·x + R·h + b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    /// Input weights, H×I.
    pub w: Matrix,
    /// Recurrent weights, H×H.
    pub r: Matrix,
    /// Bias, length H.
    pub b: Vec<f64>,
}

impl Gate {
    fn zeros(hidden: usize, input: usize) -> Self {
        Self {
            w: Matrix::zeros(hidden, input),
            r: Matrix::zeros(hidden, hidden),
            b: vec![0.0; hidden],
        }
    }

    fn check(&self, hidden: usize, input: usize) -> Result<()> {
        check_shape("gate input weights", &self.w, hidden, input)?;
        check_shape("gate recurrent weights", &self.r, hidden, hidden)?;
        check_len("gate bias", &self.b, hidden)
    }
}

fn check_shape(what: &'static str, m: &Matrix, rows: usize, cols: usize) -> Result<()> {
    if m.rows != rows || m.cols != cols || m.data.len() != rows * cols {
        return Err(Error::ShapeMismatch {
            what,
            expected: rows * cols,
            actual: m.data.len(),
        });
    }
    Ok(())
}

fn check_len(what: &'static str, v: &[f64], len: usize) -> Result<()> {
    if v.len() != len {
        return Err(Error::ShapeMismatch {
            what,
            expected: len,
            actual: v.len(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LstmParams {
    pub hidden: usize,
    pub input: usize,
    pub forget: Gate,
    pub candidate: Gate,
    pub input_gate: Gate,
    pub output: Gate,
}

impl LstmParams {
    pub fn zeros(hidden: usize, input: usize) -> Self {
        Self {
            hidden,
            input,
            forget: Gate::zeros(hidden, input),
            candidate: Gate::zeros(hidden, input),
            input_gate: Gate::zeros(hidden, input),
            output: Gate::zeros(hidden, input),
        }
    }

    pub fn gates(&self) -> [&Gate; 4] {
        [
            &self.forget,
            &self.candidate,
            &self.input_gate,
            &self.output,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for g in self.gates() {
            g.check(self.hidden, self.input)?;
        }
        Ok(())
    }
}

/// Fully connected output layer, `y = W·h + b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseParams {
    /// O×H.
    pub w: Matrix,
    pub b: Vec<f64>,
}

impl DenseParams {
    pub fn zeros(output: usize, hidden: usize) -> Self {
        Self {
            w: Matrix::zeros(output, hidden),
            b: vec![0.0; output],
        }
    }

    pub fn output_size(&self) -> usize {
        self.w.rows
    }

    pub fn validate(&self, hidden: usize) -> Result<()> {
        check_shape("dense weights", &self.w, self.w.rows, hidden)?;
        check_len("dense bias", &self.b, self.w.rows)
    }
}

/// Flat access to every trainable tensor in a fixed order: forget,
/// candidate, input and output gates (each `W`, `R`, `b`), then the dense
/// weights and bias.
pub trait Tensors {
    fn tensors(&self) -> Vec<&[f64]>;
    fn tensors_mut(&mut self) -> Vec<&mut [f64]>;

    fn num_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    /// All parameters concatenated in tensor order.
    fn flatten(&self) -> Vec<f64> {
        self.tensors().concat()
    }
}

impl Tensors for LstmParams {
    fn tensors(&self) -> Vec<&[f64]> {
        self.gates()
            .into_iter()
            .flat_map(|g| [g.w.data.as_slice(), g.r.data.as_slice(), g.b.as_slice()])
            .collect()
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let Self {
            forget,
            candidate,
            input_gate,
            output,
            ..
        } = self;
        [forget, candidate, input_gate, output]
            .into_iter()
            .flat_map(|g| {
                [
                    g.w.data.as_mut_slice(),
                    g.r.data.as_mut_slice(),
                    g.b.as_mut_slice(),
                ]
            })
            .collect()
    }
}

impl Tensors for DenseParams {
    fn tensors(&self) -> Vec<&[f64]> {
        vec![&self.w.data, &self.b]
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        vec![&mut self.w.data, &mut self.b]
    }
}

/// A full set of trainable values. Also used to hold gradients and
/// optimizer moments, which share the parameter shapes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub lstm: LstmParams,
    pub dense: DenseParams,
}

impl ParamSet {
    pub fn zeros(hidden: usize, input: usize, output: usize) -> Self {
        Self {
            lstm: LstmParams::zeros(hidden, input),
            dense: DenseParams::zeros(output, hidden),
        }
    }

    pub fn zeros_like(net: &LstmNetwork) -> Self {
        Self::zeros(net.hidden_size(), net.input_size(), net.output_size())
    }

    pub fn scale(&mut self, factor: f64) {
        for t in self.tensors_mut() {
            t.iter_mut().for_each(|v| *v *= factor);
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.tensors()
            .iter()
            .flat_map(|t| t.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }
}

impl Tensors for ParamSet {
    fn tensors(&self) -> Vec<&[f64]> {
        let mut t = self.lstm.tensors();
        t.extend(self.dense.tensors());
        t
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut t = self.lstm.tensors_mut();
        t.extend(self.dense.tensors_mut());
        t
    }
}

/// LSTM layer, dense regression head, and the standardization statistics
/// of the series the network was trained on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LstmNetwork {
    pub lstm: LstmParams,
    pub dense: DenseParams,
    pub mu: f64,
    pub sigma: f64,
}

impl LstmNetwork {
    pub fn hidden_size(&self) -> usize {
        self.lstm.hidden
    }

    pub fn input_size(&self) -> usize {
        self.lstm.input
    }

    pub fn output_size(&self) -> usize {
        self.dense.output_size()
    }

    /// Network with every weight and bias zero and identity statistics.
    pub fn zeros(hidden: usize, input: usize, output: usize) -> Self {
        Self {
            lstm: LstmParams::zeros(hidden, input),
            dense: DenseParams::zeros(output, hidden),
            mu: 0.0,
            sigma: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.lstm.validate()?;
        self.dense.validate(self.lstm.hidden)?;
        if !(self.sigma.is_finite() && self.sigma > 0.0) || !self.mu.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "standardization statistics must be finite with sigma > 0, got mu={} sigma={}",
                self.mu, self.sigma
            )));
        }
        if !self
            .tensors()
            .iter()
            .all(|t| t.iter().all(|v| v.is_finite()))
        {
            return Err(Error::NonFinite("network parameters"));
        }
        Ok(())
    }

    pub fn params(&self) -> ParamSet {
        ParamSet {
            lstm: self.lstm.clone(),
            dense: self.dense.clone(),
        }
    }
}

impl Tensors for LstmNetwork {
    fn tensors(&self) -> Vec<&[f64]> {
        let mut t = self.lstm.tensors();
        t.extend(self.dense.tensors());
        t
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut t = self.lstm.tensors_mut();
        t.extend(self.dense.tensors_mut());
        t
    }
}

/// Glorot-uniform weights, zero biases except a forget-gate bias of one.
/// Statistics are left at `mu = 0`, `sigma = 1`.
pub fn init_params(hidden: usize, input: usize, output: usize, seed: u64) -> Result<LstmNetwork> {
    if hidden == 0 || input == 0 || output == 0 {
        return Err(Error::InvalidArgument(format!(
            "layer sizes must be at least 1, got H={hidden} I={input} O={output}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gate = |rng: &mut ChaCha8Rng, bias: f64| Gate {
        w: Matrix::glorot(hidden, input, rng),
        r: Matrix::glorot(hidden, hidden, rng),
        b: vec![bias; hidden],
    };
    let forget = gate(&mut rng, 1.0);
    let candidate = gate(&mut rng, 0.0);
    let input_gate = gate(&mut rng, 0.0);
    let output_gate = gate(&mut rng, 0.0);
    let dense = DenseParams {
        w: Matrix::glorot(output, hidden, &mut rng),
        b: vec![0.0; output],
    };
    Ok(LstmNetwork {
        lstm: LstmParams {
            hidden,
            input,
            forget,
            candidate,
            input_gate,
            output: output_gate,
        },
        dense,
        mu: 0.0,
        sigma: 1.0,
    })
}
