//! Fixed-step time series, CSV exchange, synthetic load data and SVG charts.

mod csv_io;
mod plot;
mod synth;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use csv_io::{read_column_csv, read_series_csv, write_series_csv};
pub use plot::{emit_plot_svg, render_svg};
pub use synth::{synth_load_series, SynthLoadConfig};

/// Uniformly sampled scalar series. Sample `k` sits at `start + k·step` seconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub step: f64,
    pub start: f64,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(step: f64, start: f64, values: Vec<f64>) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "series step must be positive, got {step}"
            )));
        }
        if !start.is_finite() {
            return Err(Error::NonFinite("series start"));
        }
        if values.is_empty() {
            return Err(Error::InvalidArgument("series must not be empty".into()));
        }
        crate::error::ensure_finite("series values", &values)?;
        Ok(Self {
            step,
            start,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    /// Time just past the last sample, i.e. where a continuation would start.
    pub fn end(&self) -> f64 {
        self.time(self.len())
    }

    /// Number of samples covering `seconds`, if it is a whole multiple of the step.
    pub fn samples_in(&self, seconds: f64) -> Result<usize> {
        let n = (seconds / self.step).round();
        if n < 0.0 || ((n * self.step - seconds).abs() > 1e-9 * seconds.abs().max(1.0)) {
            return Err(Error::InvalidArgument(format!(
                "{seconds} s is not a whole number of {} s steps",
                self.step
            )));
        }
        Ok(n as usize)
    }
}

/// Prefix/suffix split. The test part keeps the step and continues the
/// time axis where the training part ends.
pub fn split_series(
    series: &TimeSeries,
    train_count: usize,
    test_count: usize,
) -> Result<(TimeSeries, TimeSeries)> {
    if train_count == 0 || test_count == 0 || train_count + test_count != series.len() {
        return Err(Error::InvalidArgument(format!(
            "split {train_count} + {test_count} does not partition a series of length {}",
            series.len()
        )));
    }
    let (head, tail) = series.values.split_at(train_count);
    let train = TimeSeries {
        step: series.step,
        start: series.start,
        values: head.to_vec(),
    };
    let test = TimeSeries {
        step: series.step,
        start: series.time(train_count),
        values: tail.to_vec(),
    };
    Ok((train, test))
}

/// Joins two series that share a step and abut on the time axis.
pub fn concat_series(first: &TimeSeries, second: &TimeSeries) -> Result<TimeSeries> {
    if first.step != second.step {
        return Err(Error::InvalidArgument(format!(
            "cannot join series with steps {} and {}",
            first.step, second.step
        )));
    }
    let gap = second.start - first.end();
    if gap.abs() > 1e-9 * first.step {
        return Err(Error::InvalidArgument(format!(
            "series are not contiguous: first ends at {}, second starts at {}",
            first.end(),
            second.start
        )));
    }
    let mut values = first.values.clone();
    values.extend_from_slice(&second.values);
    Ok(TimeSeries {
        step: first.step,
        start: first.start,
        values,
    })
}
