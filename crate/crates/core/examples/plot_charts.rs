//! SVG charts of a simulated day and a synthetic fortnight.
//!
//! cargo run --release --example plot_charts -- [out_dir]

use std::path::PathBuf;

use thermocast::data::{emit_plot_svg, synth_load_series, SynthLoadConfig, TimeSeries};
use thermocast::thermal::{
    average_power, generate_disturbances, simulate, DisturbanceConfig, RelayConfig, ThermalModel,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    std::fs::create_dir_all(&out)?;

    let weather = generate_disturbances(&DisturbanceConfig::default(), 1, 86_400.0, 1.0)?;
    let trace = simulate(
        &ThermalModel::default(),
        &RelayConfig::default(),
        &weather,
        1.0,
    )?;
    let temp = TimeSeries::new(1.0, 0.0, trace.indoor_temp.clone())?;
    let outside = TimeSeries::new(1.0, 0.0, weather.iter().map(|d| d.t_ext).collect())?;
    emit_plot_svg(
        &[temp, outside],
        &["indoor (°C)", "outdoor (°C)"],
        &out.join("temperatures.svg"),
    )?;

    let power = TimeSeries::new(1.0, 0.0, trace.heater_power.clone())?;
    let avg = average_power(&trace, 100.0)?;
    emit_plot_svg(
        &[power, avg],
        &["heater (W)", "100 s average (W)"],
        &out.join("power.svg"),
    )?;

    let synth = synth_load_series(&SynthLoadConfig::default(), 1, 14)?;
    emit_plot_svg(
        std::slice::from_ref(&synth),
        &["hourly load"],
        &out.join("synthetic.svg"),
    )?;

    println!(
        "wrote temperatures.svg, power.svg, synthetic.svg to {}",
        out.display()
    );
    Ok(())
}
