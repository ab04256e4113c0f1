use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hysteresis relay and heater ramp-limiter settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RelayConfig {
    /// Temperature setpoint `s`, °C.
    pub setpoint: f64,
    /// Half-width `γ` of the deadband, °C.
    pub tolerance: f64,
    /// Heater power when ON, W.
    pub on_power: f64,
    /// Maximum heater slew, W/s.
    pub ramp_rate: f64,
}

impl Default for RelayConfig {
    fn default() -> Self {
        Self {
            setpoint: 21.0,
            tolerance: 1.0,
            on_power: 4000.0,
            ramp_rate: 100.0,
        }
    }
}

impl RelayConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.setpoint.is_finite() {
            return Err(Error::NonFinite("relay setpoint"));
        }
        for (name, v) in [
            ("tolerance", self.tolerance),
            ("on_power", self.on_power),
            ("ramp_rate", self.ramp_rate),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "relay {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn lower(&self) -> f64 {
        self.setpoint - self.tolerance
    }

    pub fn upper(&self) -> f64 {
        self.setpoint + self.tolerance
    }

    pub fn target_power(&self, cmd: RelayCommand) -> f64 {
        match cmd {
            RelayCommand::On => self.on_power,
            RelayCommand::Off => 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelayCommand {
    On,
    #[default]
    Off,
}

impl RelayCommand {
    pub fn as_bit(self) -> u8 {
        match self {
            RelayCommand::On => 1,
            RelayCommand::Off => 0,
        }
    }
}

/// Heating hysteresis: switch ON below `s − γ`, OFF above `s + γ`, hold
/// the previous command anywhere in the closed band `[s − γ, s + γ]`.
pub fn relay_command(temp: f64, cfg: &RelayConfig, prev: RelayCommand) -> Result<RelayCommand> {
    if !temp.is_finite() {
        return Err(Error::NonFinite("indoor temperature"));
    }
    Ok(if temp < cfg.lower() {
        RelayCommand::On
    } else if temp > cfg.upper() {
        RelayCommand::Off
    } else {
        prev
    })
}

/// Moves the heater power toward the commanded target by at most
/// `ramp_rate · dt`, landing on the target exactly when it is within reach.
pub fn heater_step(current: f64, cmd: RelayCommand, cfg: &RelayConfig, dt: f64) -> f64 {
    let target = cfg.target_power(cmd);
    let max_delta = cfg.ramp_rate * dt;
    let delta = (target - current).clamp(-max_delta, max_delta);
    (current + delta).clamp(0.0, cfg.on_power)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use RelayCommand::{Off, On};

    #[test]
    fn switching_examples() {
        let cfg = RelayConfig::default();
        assert_eq!(relay_command(19.0, &cfg, Off).unwrap(), On);
        assert_eq!(relay_command(21.5, &cfg, On).unwrap(), On);
        assert_eq!(relay_command(21.5, &cfg, Off).unwrap(), Off);
        assert_eq!(relay_command(22.5, &cfg, On).unwrap(), Off);
    }

    #[test]
    fn band_edges_hold() {
        let cfg = RelayConfig::default();
        assert_eq!(relay_command(22.0, &cfg, Off).unwrap(), Off);
        assert_eq!(relay_command(22.0, &cfg, On).unwrap(), On);
        assert_eq!(relay_command(20.0, &cfg, Off).unwrap(), Off);
        assert_eq!(relay_command(20.0, &cfg, On).unwrap(), On);
    }

    #[test]
    fn non_finite_temperature_rejected() {
        let cfg = RelayConfig::default();
        assert!(relay_command(f64::NAN, &cfg, Off).is_err());
    }

    #[test]
    fn heater_ramp_examples() {
        let cfg = RelayConfig::default();
        assert_eq!(heater_step(0.0, On, &cfg, 1.0), 100.0);
        assert_eq!(heater_step(4000.0, On, &cfg, 1.0), 4000.0);
        assert_eq!(heater_step(50.0, Off, &cfg, 1.0), 0.0);
        assert_eq!(heater_step(3950.0, On, &cfg, 1.0), 4000.0);
    }

    #[test]
    fn config_validation() {
        assert!(RelayConfig::default().validate().is_ok());
        let bad = RelayConfig {
            tolerance: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    proptest! {
        #[test]
        fn heater_respects_bounds_and_slew(
            current in 0.0f64..=4000.0,
            on in any::<bool>(),
            dt in 0.01f64..10.0,
        ) {
            let cfg = RelayConfig::default();
            let cmd = if on { On } else { Off };
            let next = heater_step(current, cmd, &cfg, dt);
            prop_assert!((0.0..=cfg.on_power).contains(&next));
            prop_assert!((next - current).abs() <= cfg.ramp_rate * dt + 1e-9);
            let target = cfg.target_power(cmd);
            prop_assert!((target - next).abs() <= (target - current).abs());
        }
    }
}
