//! Relay-controlled, ramp-limited electric heating of a four-state house model.

mod disturbance;
mod model;
mod relay;
mod simulate;

pub use disturbance::{generate_disturbances, DisturbanceConfig};
pub use model::{DisturbanceSample, State, ThermalModel};
pub use relay::{heater_step, relay_command, RelayCommand, RelayConfig};
pub use simulate::{average_power, simulate, SimulationTrace};
