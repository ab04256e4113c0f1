//! A year of synthetic hourly aggregate load and its daily structure.
//!
//! cargo run --release --example synthetic_load -- [seed] [out.csv]

use thermocast::data::{split_series, synth_load_series, write_series_csv, SynthLoadConfig};

fn autocorrelation(x: &[f64], lag: usize) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    let cov: f64 = x
        .iter()
        .zip(&x[lag..])
        .map(|(a, b)| (a - mean) * (b - mean))
        .sum();
    cov / var
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(42, |s| s.parse().expect("seed"));
    let series = synth_load_series(&SynthLoadConfig::default(), seed, 365)?;

    for lag in [1, 12, 24, 168] {
        println!(
            "lag {lag:>3} h autocorrelation {:+.3}",
            autocorrelation(&series.values, lag)
        );
    }

    let (train, test) = split_series(&series, 8592, 168)?;
    println!(
        "train {} h, test {} h starting at day {}",
        train.len(),
        test.len(),
        test.start / 86_400.0
    );

    if let Some(path) = args.next() {
        write_series_csv(&series, path.as_ref())?;
        println!("wrote {path}");
    }
    Ok(())
}
