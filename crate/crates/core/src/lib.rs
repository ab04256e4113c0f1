//! Thermostatic load simulation and LSTM short-term load forecasting.
//!
//! The crate is organised along the pipeline it implements:
//!
//! - [`thermal`]: a four-state linear house model heated by a relay-controlled,
//!   ramp-limited heater under seeded weather and occupancy disturbances,
//!   plus window averaging of the heater power into a load profile.
//! - [`lstm`]: an LSTM regression network written from scratch, with
//!   backpropagation through time, a finite-difference gradient oracle and Adam.
//! - [`forecast`]: standardization, closed-loop and one-step-ahead
//!   forecasting, and RMSE.
//! - [`data`]: fixed-step series, CSV exchange, a synthetic hourly load
//!   generator and SVG line charts.
//! - [`cli`]: the `thermocast` command-line front end.
//!
//! ```no_run
//! use thermocast::{data, forecast, lstm, thermal};
//!
//! let model = thermal::ThermalModel::default();
//! let relay = thermal::RelayConfig::default();
//! let weather = thermal::generate_disturbances(
//!     &thermal::DisturbanceConfig::default(), 42, 7.0 * 86_400.0, 1.0)?;
//! let trace = thermal::simulate(&model, &relay, &weather, 1.0)?;
//! let load = thermal::average_power(&trace, 100.0)?;
//!
//! let (train, test) = data::split_series(&load, 5184, 864)?;
//! let cfg = lstm::TrainingConfig { hidden_size: 32, ..Default::default() };
//! let (net, _losses) = forecast::fit(&train.values, &cfg)?;
//! let day7 = forecast::forecast_closed_loop(&net, &train.values, test.len())?;
//! println!("RMSE {}", forecast::rmse(&day7, &test.values)?);
//! # Ok::<(), thermocast::Error>(())
//! ```

pub mod cli;
pub mod data;
mod error;
pub mod forecast;
pub mod lstm;
pub mod thermal;

pub use error::{Error, Result};
