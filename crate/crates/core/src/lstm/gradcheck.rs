use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::backward::{bptt_gradients, finite_diff_gradients, max_relative_error};
use super::forward::{as_sequence, LstmState};
use super::params::init_params;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct GradCheckReport {
    /// `(seed, max relative error)` per random instance.
    pub cases: Vec<(u64, f64)>,
}

impl GradCheckReport {
    pub fn max_error(&self) -> f64 {
        self.cases.iter().map(|(_, e)| *e).fold(0.0, f64::max)
    }

    pub fn passed(&self, tolerance: f64) -> bool {
        self.max_error() < tolerance
    }
}

/// Compares BPTT against central differences on `cases` random networks
/// (seeds `seed, seed + 1, …`) with `hidden` units and `steps`-long
/// random input and target sequences.
pub fn gradient_check(
    seed: u64,
    cases: usize,
    hidden: usize,
    steps: usize,
    eps: f64,
) -> Result<GradCheckReport> {
    let mut out = Vec::with_capacity(cases);
    for case in 0..cases as u64 {
        let s = seed.wrapping_add(case);
        let net = init_params(hidden, 1, 1, s)?;
        let mut rng = ChaCha8Rng::seed_from_u64(s.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let xs: Vec<f64> = (0..steps).map(|_| rng.random_range(-2.0..2.0)).collect();
        let ys: Vec<f64> = (0..steps).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (xs, ys) = (as_sequence(&xs), as_sequence(&ys));
        let init = LstmState::zeros(hidden);
        let (_, exact) = bptt_gradients(&net, &xs, &ys, &init)?;
        let approx = finite_diff_gradients(&net, &xs, &ys, &init, eps)?;
        out.push((s, max_relative_error(&exact, &approx)));
    }
    Ok(GradCheckReport { cases: out })
}
