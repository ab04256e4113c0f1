//! Backpropagation through time against central differences.
//!
//! cargo run --release --example gradient_check -- [seed] [hidden] [steps]

use thermocast::lstm::{
    as_sequence, bptt_gradients, finite_diff_gradients, gradient_check, init_params,
    max_relative_error, LstmState, Tensors, RELATIVE_ERROR_FLOOR,
};

fn main() -> thermocast::Result<()> {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .map(|s| s.parse().expect("integer"))
        .collect();
    let seed = args.first().copied().unwrap_or(7);
    let hidden = args.get(1).copied().unwrap_or(4) as usize;
    let steps = args.get(2).copied().unwrap_or(20) as usize;

    let report = gradient_check(seed, 10, hidden, steps, 1e-5)?;
    for (s, err) in &report.cases {
        println!("seed {s:>3}: {err:.2e}");
    }
    println!(
        "max {:.2e}, pass at 1e-4: {}",
        report.max_error(),
        report.passed(1e-4)
    );

    // The same comparison by hand, tensor by tensor.
    let net = init_params(hidden, 1, 1, seed)?;
    let xs: Vec<f64> = (0..steps).map(|k| (k as f64 * 0.4).sin()).collect();
    let ys: Vec<f64> = (0..steps).map(|k| (k as f64 * 0.4 + 0.4).sin()).collect();
    let (seq, targets) = (as_sequence(&xs), as_sequence(&ys));
    let zero = LstmState::zeros(hidden);
    let (loss, analytic) = bptt_gradients(&net, &seq, &targets, &zero)?;
    let numeric = finite_diff_gradients(&net, &seq, &targets, &zero, 1e-5)?;
    println!(
        "loss {loss:.6}, overall {:.2e}",
        max_relative_error(&analytic, &numeric)
    );
    let names = [
        "W_f", "R_f", "b_f", "W_g", "R_g", "b_g", "W_i", "R_i", "b_i", "W_o", "R_o", "b_o", "W_y",
        "b_y",
    ];
    for ((name, a), n) in names.iter().zip(analytic.tensors()).zip(numeric.tensors()) {
        let err = a
            .iter()
            .zip(n)
            .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(RELATIVE_ERROR_FLOOR))
            .fold(0.0, f64::max);
        println!("{name:>4}: {err:.2e}");
    }
    Ok(())
}
