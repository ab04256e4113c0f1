//! Train on six days of simulated heating load and forecast the seventh,
//! closed loop and one step ahead.
//!
//! cargo run --release --example train_and_forecast -- [seed] [hidden] [out_dir]

use std::path::PathBuf;

use thermocast::data::split_series;
use thermocast::forecast::{
    fit, forecast_closed_loop, forecast_one_step, ForecastMode, ForecastResult,
};
use thermocast::lstm::{ModelDocument, TrainingConfig};
use thermocast::thermal::{
    average_power, generate_disturbances, simulate, DisturbanceConfig, RelayConfig, ThermalModel,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(0, |s| s.parse().expect("seed"));
    let hidden: usize = args.next().map_or(32, |s| s.parse().expect("hidden size"));
    let out = PathBuf::from(args.next().unwrap_or_else(|| "out".into()));
    std::fs::create_dir_all(&out)?;

    let weather = generate_disturbances(&DisturbanceConfig::default(), seed, 7.0 * 86_400.0, 1.0)?;
    let trace = simulate(
        &ThermalModel::default(),
        &RelayConfig::default(),
        &weather,
        1.0,
    )?;
    let load = average_power(&trace, 100.0)?;
    let (train, test) = split_series(&load, 5184, 864)?;

    let cfg = TrainingConfig {
        hidden_size: hidden,
        seed,
        ..Default::default()
    };
    let (net, losses) = fit(&train.values, &cfg)?;
    for (epoch, loss) in losses.iter().enumerate().step_by(50) {
        println!("epoch {epoch:>3}  loss {loss:.4}");
    }
    println!(
        "epoch {:>3}  loss {:.4}",
        losses.len() - 1,
        losses[losses.len() - 1]
    );
    ModelDocument::new(&net, cfg, Some(train.len())).save(&out.join("model.json"))?;

    let closed = forecast_closed_loop(&net, &train.values, test.len())?;
    let one = forecast_one_step(&net, &train.values, &test.values)?;
    for (mode, preds, file) in [
        (ForecastMode::ClosedLoop, closed, "closed_loop.csv"),
        (ForecastMode::OneStep, one, "one_step.csv"),
    ] {
        let result = ForecastResult::new(mode, test.step, test.start, preds, test.values.clone())?;
        println!(
            "{mode:>11}: RMSE {:.1} W ({:.3} of train sd)",
            result.rmse,
            result.normalized_rmse(net.sigma)
        );
        result.write_csv(&out.join(file))?;
    }
    Ok(())
}
