use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{DisturbanceSample, ThermalModel};
use super::relay::{heater_step, relay_command, RelayCommand, RelayConfig};
use crate::data::TimeSeries;
use crate::error::{Error, Result};

/// Time-aligned record of a closed-loop run. Index `k` holds the indoor
/// temperature read at `t = k·dt`, the relay decision and heater power
/// applied over `[t, t + dt)`, and the disturbance acting over that step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub dt: f64,
    pub times: Vec<f64>,
    pub indoor_temp: Vec<f64>,
    pub heater_power: Vec<f64>,
    pub relay_cmd: Vec<RelayCommand>,
    pub disturbances: Vec<DisturbanceSample>,
}

impl SimulationTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Fraction of steps during which the relay commanded ON.
    pub fn duty_cycle(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let on = self
            .relay_cmd
            .iter()
            .filter(|c| **c == RelayCommand::On)
            .count();
        on as f64 / self.len() as f64
    }

    /// Writes the trace as CSV with header
    /// `t,indoor_temp,heater_power,relay,t_ext,q_other,solar`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        let mut line = String::with_capacity(128);
        writeln!(out, "t,indoor_temp,heater_power,relay,t_ext,q_other,solar")
            .map_err(|e| Error::io(path, e))?;
        for k in 0..self.len() {
            let d = &self.disturbances[k];
            line.clear();
            let _ = writeln!(
                line,
                "{},{},{},{},{},{},{}",
                self.times[k],
                self.indoor_temp[k],
                self.heater_power[k],
                self.relay_cmd[k].as_bit(),
                d.t_ext,
                d.q_other,
                d.solar
            );
            out.write_all(line.as_bytes())
                .map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }
}

/// Closed-loop simulation: per step read `T = C·x`, update the relay
/// (starting from OFF), ramp the heater, then integrate one Euler step.
pub fn simulate(
    model: &ThermalModel,
    cfg: &RelayConfig,
    disturbances: &[DisturbanceSample],
    dt: f64,
) -> Result<SimulationTrace> {
    if disturbances.is_empty() {
        return Err(Error::InvalidArgument(
            "simulation needs at least one disturbance sample".into(),
        ));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "time step must be positive, got {dt}"
        )));
    }
    model.validate()?;
    cfg.validate()?;

    let n = disturbances.len();
    let mut trace = SimulationTrace {
        dt,
        times: Vec::with_capacity(n),
        indoor_temp: Vec::with_capacity(n),
        heater_power: Vec::with_capacity(n),
        relay_cmd: Vec::with_capacity(n),
        disturbances: disturbances.to_vec(),
    };
    let mut x = model.x0;
    let mut cmd = RelayCommand::Off;
    let mut power = 0.0;
    for (k, d) in disturbances.iter().enumerate() {
        let temp = model.output(&x);
        cmd = relay_command(temp, cfg, cmd)?;
        power = heater_step(power, cmd, cfg, dt);
        trace.times.push(k as f64 * dt);
        trace.indoor_temp.push(temp);
        trace.heater_power.push(power);
        trace.relay_cmd.push(cmd);
        x = model.step_state(&x, power, d, dt)?;
    }
    Ok(trace)
}

/// Mean heater power over consecutive non-overlapping windows of
/// `window` seconds, stamped at each window's start time.
pub fn average_power(trace: &SimulationTrace, window: f64) -> Result<TimeSeries> {
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "averaging window must be positive, got {window}"
        )));
    }
    let per_window = (window / trace.dt).round();
    if per_window < 1.0 || ((per_window * trace.dt - window) / window).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "window {window} s is not a whole multiple of dt {} s",
            trace.dt
        )));
    }
    let per_window = per_window as usize;
    if trace.is_empty() || !trace.len().is_multiple_of(per_window) {
        return Err(Error::InvalidArgument(format!(
            "trace length {} is not a whole number of {per_window}-sample windows",
            trace.len()
        )));
    }
    let values = trace
        .heater_power
        .chunks_exact(per_window)
        .map(|w| w.iter().sum::<f64>() / per_window as f64)
        .collect();
    TimeSeries::new(window, 0.0, values)
}
