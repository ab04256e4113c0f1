//! JSON model documents.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::params::{DenseParams, Gate, LstmNetwork, LstmParams, Matrix};
use super::train::TrainingConfig;
use crate::error::{Error, Result};

pub const MODEL_FORMAT: &str = "thermocast-lstm/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateDoc {
    w: Vec<f64>,
    r: Vec<f64>,
    b: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GatesDoc {
    forget: GateDoc,
    candidate: GateDoc,
    input: GateDoc,
    output: GateDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DenseDoc {
    w: Vec<f64>,
    b: Vec<f64>,
}

/// On-disk form of a trained network. Weight matrices are stored as flat
/// row-major arrays whose shapes follow from `hidden`, `input` and `output`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    format: String,
    hidden: usize,
    input: usize,
    output: usize,
    gates: GatesDoc,
    dense: DenseDoc,
    mu: f64,
    sigma: f64,
    pub training: TrainingConfig,
    /// Number of leading samples of the dataset the network was trained on.
    pub train_samples: Option<usize>,
}

fn gate_doc(g: &Gate) -> GateDoc {
    GateDoc {
        w: g.w.data.clone(),
        r: g.r.data.clone(),
        b: g.b.clone(),
    }
}

fn gate_from(doc: GateDoc, hidden: usize, input: usize) -> Result<Gate> {
    Ok(Gate {
        w: Matrix::from_vec(hidden, input, doc.w)?,
        r: Matrix::from_vec(hidden, hidden, doc.r)?,
        b: doc.b,
    })
}

impl ModelDocument {
    pub fn new(net: &LstmNetwork, training: TrainingConfig, train_samples: Option<usize>) -> Self {
        let l = &net.lstm;
        Self {
            format: MODEL_FORMAT.into(),
            hidden: l.hidden,
            input: l.input,
            output: net.output_size(),
            gates: GatesDoc {
                forget: gate_doc(&l.forget),
                candidate: gate_doc(&l.candidate),
                input: gate_doc(&l.input_gate),
                output: gate_doc(&l.output),
            },
            dense: DenseDoc {
                w: net.dense.w.data.clone(),
                b: net.dense.b.clone(),
            },
            mu: net.mu,
            sigma: net.sigma,
            training,
            train_samples,
        }
    }

    pub fn network(&self) -> Result<LstmNetwork> {
        if self.format != MODEL_FORMAT {
            return Err(Error::InvalidArgument(format!(
                "unsupported model format `{}`, expected `{MODEL_FORMAT}`",
                self.format
            )));
        }
        let (h, i, o) = (self.hidden, self.input, self.output);
        let g = self.gates.clone();
        let net = LstmNetwork {
            lstm: LstmParams {
                hidden: h,
                input: i,
                forget: gate_from(g.forget, h, i)?,
                candidate: gate_from(g.candidate, h, i)?,
                input_gate: gate_from(g.input, h, i)?,
                output: gate_from(g.output, h, i)?,
            },
            dense: DenseParams {
                w: Matrix::from_vec(o, h, self.dense.w.clone())?,
                b: self.dense.b.clone(),
            },
            mu: self.mu,
            sigma: self.sigma,
        };
        net.validate()?;
        Ok(net)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model document serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lstm::{init_params, Tensors};

    #[test]
    fn json_round_trip_is_bit_exact() {
        let mut net = init_params(7, 1, 1, 21).unwrap();
        net.mu = 1234.5678901234567;
        net.sigma = 0.1 + 0.2;
        let doc = ModelDocument::new(&net, TrainingConfig::default(), Some(5184));
        let back: ModelDocument = serde_json::from_str(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        let restored = back.network().unwrap();
        let bits = |n: &LstmNetwork| n.flatten().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&restored), bits(&net));
        assert_eq!(restored.mu.to_bits(), net.mu.to_bits());
        assert_eq!(restored.sigma.to_bits(), net.sigma.to_bits());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        let net = init_params(3, 1, 1, 0).unwrap();
        let doc = ModelDocument::new(&net, TrainingConfig::default(), None);
        doc.save(&p).unwrap();
        assert_eq!(ModelDocument::load(&p).unwrap().network().unwrap(), net);
    }

    #[test]
    fn bad_documents_rejected() {
        let net = init_params(3, 1, 1, 0).unwrap();
        let json = ModelDocument::new(&net, TrainingConfig::default(), None).to_json();
        let extra = json.replacen('{', "{\n  \"bogus\": 1,", 1);
        assert!(serde_json::from_str::<ModelDocument>(&extra).is_err());
        let wrong_h = json.replacen("\"hidden\": 3", "\"hidden\": 4", 1);
        let doc: ModelDocument = serde_json::from_str(&wrong_h).unwrap();
        assert!(doc.network().is_err());
    }
}
