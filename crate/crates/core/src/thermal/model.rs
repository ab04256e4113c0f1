//! Four-state linear thermal model of a single-zone house.
//!
//! The state holds, in order, the floor temperature, the internal façade
//! temperature, the external façade temperature and the indoor air
//! temperature (all °C). The dynamics are
//!
//! ```text
//! dx/dt = A·x + B·u + E·d
//!     T = C·x
//! ```
//!
//! with `u` the heater heat flow (W) and `d` the disturbance vector
//! (external temperature, internal gains, solar gains).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type State = [f64; 4];

/// Exogenous inputs acting on the house at one instant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceSample {
    /// External temperature, °C (absolute).
    pub t_ext: f64,
    /// Heat from occupants and appliances, W.
    pub q_other: f64,
    /// Solar heat gain, W-equivalent.
    pub solar: f64,
}

impl DisturbanceSample {
    pub const fn new(t_ext: f64, q_other: f64, solar: f64) -> Self {
        Self {
            t_ext,
            q_other,
            solar,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.t_ext, self.q_other, self.solar]
    }

    pub fn is_finite(&self) -> bool {
        self.t_ext.is_finite() && self.q_other.is_finite() && self.solar.is_finite()
    }
}

impl std::ops::Add for DisturbanceSample {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.t_ext + rhs.t_ext,
            self.q_other + rhs.q_other,
            self.solar + rhs.solar,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThermalModel {
    /// State rate matrix, 1/s.
    pub a: [[f64; 4]; 4],
    /// Heater input column, °C/(s·W).
    pub b: [f64; 4],
    /// Disturbance matrix, columns ordered as [`DisturbanceSample`].
    pub e: [[f64; 3]; 4],
    /// Output selector.
    pub c: [f64; 4],
    /// Initial state, °C.
    pub x0: State,
}

impl Default for ThermalModel {
    fn default() -> Self {
        Self {
            a: [
                [-2.0e-5, 0.0, 0.0, 2.0e-5],
                [0.0, -2.0e-5, 1.0e-6, 2.0e-5],
                [0.0, 1.0e-6, -5.6e-5, 0.0],
                [1.234e-3, 2.987e-3, 0.0, -4.548e-3],
            ],
            b: [0.0, 0.0, 0.0, 3.0e-6],
            e: [
                [0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0],
                [5.5e-5, 0.0, 0.0],
                [3.27e-4, 3.0e-6, 1.0e-6],
            ],
            c: [0.0, 0.0, 0.0, 1.0],
            x0: [21.0; 4],
        }
    }
}

impl ThermalModel {
    /// Checks the structural invariants: finite entries, `C` selecting the
    /// indoor temperature, and a strictly negative diagonal of `A`.
    pub fn validate(&self) -> Result<()> {
        let finite = self.a.iter().flatten().all(|v| v.is_finite())
            && self.b.iter().all(|v| v.is_finite())
            && self.e.iter().flatten().all(|v| v.is_finite())
            && self.x0.iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::NonFinite("thermal model"));
        }
        if self.c != [0.0, 0.0, 0.0, 1.0] {
            return Err(Error::InvalidArgument(
                "output selector C must be [0, 0, 0, 1]".into(),
            ));
        }
        if (0..4).any(|i| self.a[i][i] >= 0.0) {
            return Err(Error::InvalidArgument(
                "diagonal entries of A must be strictly negative".into(),
            ));
        }
        Ok(())
    }

    /// `A·x + B·u + E·d` in °C/s.
    pub fn derivative(&self, x: &State, u: f64, d: &DisturbanceSample) -> State {
        let d = d.as_array();
        let mut dx = [0.0; 4];
        for (i, out) in dx.iter_mut().enumerate() {
            let ax: f64 = self.a[i].iter().zip(x).map(|(a, x)| a * x).sum();
            let ed: f64 = self.e[i].iter().zip(&d).map(|(e, d)| e * d).sum();
            *out = ax + self.b[i] * u + ed;
        }
        dx
    }

    pub fn output(&self, x: &State) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// One forward-Euler step of length `dt` seconds.
    pub fn step_state(&self, x: &State, u: f64, d: &DisturbanceSample, dt: f64) -> Result<State> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "time step must be positive and finite, got {dt}"
            )));
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("thermal state"));
        }
        if !u.is_finite() {
            return Err(Error::NonFinite("heater power"));
        }
        if !d.is_finite() {
            return Err(Error::NonFinite("disturbance sample"));
        }
        let dx = self.derivative(x, u, d);
        Ok(std::array::from_fn(|i| x[i] + dt * dx[i]))
    }

    /// Equilibrium state under constant heater power and disturbances,
    /// i.e. the solution of `A·x = −(B·u + E·d)`.
    pub fn steady_state(&self, u: f64, d: &DisturbanceSample) -> Result<State> {
        let forcing = self.derivative(&[0.0; 4], u, d);
        let rhs = forcing.map(|f| -f);
        solve4(self.a, rhs)
    }
}

/// Gaussian elimination with partial pivoting on a 4×4 system.
#[allow(clippy::needless_range_loop)]
fn solve4(mut m: [[f64; 4]; 4], mut rhs: [f64; 4]) -> Result<State> {
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap_or(col);
        if m[pivot][col].abs() < 1e-300 {
            return Err(Error::Numeric("singular rate matrix".into()));
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..4 {
            let factor = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= factor * m[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let tail: f64 = (row + 1..4).map(|k| m[row][k] * x[k]).sum();
        x[row] = (rhs[row] - tail) / m[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_model_is_valid() {
        let m = ThermalModel::default();
        m.validate().unwrap();
        assert_eq!(m.x0, [21.0; 4]);
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let m = ThermalModel::default();
        let x = m
            .step_state(&[0.0; 4], 0.0, &DisturbanceSample::default(), 1.0)
            .unwrap();
        assert_eq!(x, [0.0; 4]);
    }

    #[test]
    fn indoor_equilibrium_derivative() {
        // Rows 1, 3 and 4 cancel against the external-temperature column.
        let m = ThermalModel::default();
        let d = DisturbanceSample::new(21.0, 0.0, 0.0);
        let dx = m.derivative(&[21.0; 4], 0.0, &d);
        let expected = [0.0, 2.1e-5, 0.0, 0.0];
        for (a, b) in dx.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{dx:?}");
        }
        let x = m.step_state(&[21.0; 4], 0.0, &d, 1.0).unwrap();
        assert!((x[1] - 21.000021).abs() < 1e-12);
    }

    #[test]
    fn heating_step_row_four() {
        // 21·(1.234 + 2.987 − 4.548) + 0.003·4000 + 0.327·(−6) + 0.003·500 + 0.001·500
        // = −6.867 + 12 − 1.962 + 1.5 + 0.5 = 5.171 (×1e-3)
        let hand: f64 = (21.0 * (1.234 + 2.987 - 4.548)
            + 0.003 * 4000.0
            + 0.327 * -6.0
            + 0.003 * 500.0
            + 0.001 * 500.0)
            * 1e-3;
        assert!((hand - 5.171e-3).abs() < 1e-15);
        let m = ThermalModel::default();
        let x = m
            .step_state(
                &[21.0; 4],
                4000.0,
                &DisturbanceSample::new(-6.0, 500.0, 500.0),
                1.0,
            )
            .unwrap();
        assert!((x[3] - 21.005171).abs() < 1e-12, "{}", x[3]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = ThermalModel::default();
        let d = DisturbanceSample::default();
        assert!(m
            .step_state(&[f64::NAN, 0.0, 0.0, 0.0], 0.0, &d, 1.0)
            .is_err());
        assert!(m.step_state(&[0.0; 4], f64::INFINITY, &d, 1.0).is_err());
        assert!(m
            .step_state(
                &[0.0; 4],
                0.0,
                &DisturbanceSample::new(f64::NAN, 0.0, 0.0),
                1.0
            )
            .is_err());
        assert!(m.step_state(&[0.0; 4], 0.0, &d, 0.0).is_err());
        assert!(m.step_state(&[0.0; 4], 0.0, &d, -1.0).is_err());
    }

    #[test]
    fn validate_catches_broken_structure() {
        let mut m = ThermalModel::default();
        m.a[2][2] = 0.0;
        assert!(m.validate().is_err());
        let m = ThermalModel {
            c: [1.0, 0.0, 0.0, 0.0],
            ..Default::default()
        };
        assert!(m.validate().is_err());
    }

    #[test]
    fn steady_states_bracket_the_deadband() {
        let m = ThermalModel::default();
        let d = DisturbanceSample::new(-6.0, 500.0, 500.0);
        let hot = m.steady_state(4000.0, &d).unwrap();
        let cold = m.steady_state(0.0, &d).unwrap();
        assert!((hot[3] - 34.4).abs() < 0.1, "{hot:?}");
        assert!((cold[3] + 2.6).abs() < 0.1, "{cold:?}");
        let residual = m.derivative(&hot, 4000.0, &d);
        assert!(residual.iter().all(|r| r.abs() < 1e-12));
    }
}
