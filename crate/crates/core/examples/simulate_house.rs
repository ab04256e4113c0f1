//! One winter week of the relay-controlled house.
//!
//! cargo run --release --example simulate_house -- [seed] [out_dir]

use std::path::PathBuf;

use thermocast::data::write_series_csv;
use thermocast::thermal::{
    average_power, generate_disturbances, simulate, DisturbanceConfig, RelayConfig, ThermalModel,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(42, |s| s.parse().expect("seed"));
    let out = PathBuf::from(args.next().unwrap_or_else(|| "out".into()));
    std::fs::create_dir_all(&out)?;

    let model = ThermalModel::default();
    let relay = RelayConfig::default();
    let weather = generate_disturbances(&DisturbanceConfig::default(), seed, 7.0 * 86_400.0, 1.0)?;
    let trace = simulate(&model, &relay, &weather, 1.0)?;
    let load = average_power(&trace, 100.0)?;

    let settled = &trace.indoor_temp[12 * 3600..];
    let lo = settled.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = settled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    println!(
        "{} s simulated, indoor {lo:.2}..{hi:.2} °C after 12 h",
        trace.len()
    );
    let mean = load.values.iter().sum::<f64>() / load.len() as f64;
    println!(
        "duty cycle {:.3}, mean load {mean:.0} W",
        trace.duty_cycle()
    );

    // Passive drift with the heater off, for comparison.
    let free = model.steady_state(0.0, &weather[0])?;
    println!("unheated steady state at t=0 weather: {:.1} °C", free[3]);

    trace.write_csv(&out.join("trace.csv"))?;
    write_series_csv(&load, &out.join("load.csv"))?;
    println!("wrote {}", out.display());
    Ok(())
}
