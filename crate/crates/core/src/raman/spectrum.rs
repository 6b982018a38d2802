use std::fmt::Write as _;

use crate::error::{invalid, Result};

/// Raman signal sampled on a detuning grid (Hz).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Spectrum {
    pub detunings: Vec<f64>,
    pub signal: Vec<f64>,
    /// `key=value` metadata written as `#` lines ahead of the CSV header.
    pub metadata: Vec<(String, String)>,
}

/// Symmetric grid −span..=span in steps of `step` Hz, always containing 0.
pub fn detuning_grid(span_hz: f64, step_hz: f64) -> Result<Vec<f64>> {
    if !(step_hz > 0.0) || !(span_hz >= 0.0) || !span_hz.is_finite() {
        return Err(invalid(
            "grid",
            format!("need step > 0 and span >= 0, got {span_hz}/{step_hz}"),
        ));
    }
    let n = (span_hz / step_hz + 1e-9).floor() as i64;
    if n > 50_000_000 {
        return Err(invalid("grid", "too many points"));
    }
    Ok((-n..=n).map(|i| i as f64 * step_hz).collect())
}

impl Spectrum {
    pub fn new(detunings: Vec<f64>, signal: Vec<f64>) -> Result<Self> {
        if detunings.len() != signal.len() {
            return Err(invalid("spectrum", "detuning and signal lengths differ"));
        }
        Ok(Self {
            detunings,
            signal,
            metadata: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.signal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signal.is_empty()
    }

    pub fn push_metadata(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    /// Index and value of the largest signal.
    pub fn peak(&self) -> Option<(usize, f64)> {
        self.signal
            .iter()
            .copied()
            .enumerate()
            .fold(None, |best, (i, v)| match best {
                Some((_, b)) if b >= v => best,
                _ => Some((i, v)),
            })
    }

    /// Full width at half maximum of the highest peak, with linear
    /// interpolation of both half-maximum crossings.
    pub fn fwhm(&self) -> Option<f64> {
        let (imax, vmax) = self.peak()?;
        if !(vmax > 0.0) {
            return None;
        }
        let half = 0.5 * vmax;
        let x = &self.detunings;
        let y = &self.signal;
        let left = (1..=imax)
            .rev()
            .find(|&i| y[i - 1] < half)
            .map(|i| x[i - 1] + (half - y[i - 1]) / (y[i] - y[i - 1]) * (x[i] - x[i - 1]))?;
        let right = (imax..y.len() - 1)
            .find(|&i| y[i + 1] < half)
            .map(|i| x[i] + (y[i] - half) / (y[i] - y[i + 1]) * (x[i + 1] - x[i]))?;
        Some(right - left)
    }

    /// Trapezoidal area.
    pub fn area(&self) -> f64 {
        self.detunings
            .windows(2)
            .zip(self.signal.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str("detuning_hz, signal\n");
        for (d, s) in self.detunings.iter().zip(&self.signal) {
            let _ = writeln!(out, "{d:.6}, {s:.16e}");
        }
        out
    }
}
