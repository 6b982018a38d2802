use super::integrate::PopulationTrajectory;
use crate::error::{invalid, Result};

/// Summary of a pumping run.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpMetrics {
    /// (g,4,0) population over all ground-state atoms, per sample.
    pub m0_fraction: Vec<f64>,
    /// First time the fraction reaches 0.5, linearly interpolated.
    pub tau_50: Option<f64>,
    /// Scattered photons per atom at `tau_50`.
    pub photons_to_tau50: Option<f64>,
}

/// First crossing of `threshold` by `values`, returned as the fractional
/// sample position.
fn first_crossing(values: &[f64], threshold: f64) -> Option<(usize, f64)> {
    if values.first()? >= &threshold {
        return Some((0, 0.0));
    }
    values.windows(2).enumerate().find_map(|(i, w)| {
        (w[1] >= threshold).then(|| {
            let frac = if w[1] > w[0] {
                (threshold - w[0]) / (w[1] - w[0])
            } else {
                1.0
            };
            (i, frac)
        })
    })
}

fn lerp(series: &[f64], (i, frac): (usize, f64)) -> f64 {
    if frac == 0.0 {
        series[i]
    } else {
        series[i] + frac * (series[i + 1] - series[i])
    }
}

impl PopulationTrajectory {
    /// Time and photon count at which the m=0 fraction first reaches
    /// `threshold`, interpolated linearly between samples.
    pub fn crossing(&self, threshold: f64) -> Option<(f64, f64)> {
        let pos = first_crossing(&self.m0_fraction(), threshold)?;
        Some((lerp(&self.times, pos), lerp(&self.scattered_photons, pos)))
    }
}

pub fn pump_metrics(trajectory: &PopulationTrajectory) -> Result<PumpMetrics> {
    if trajectory.is_empty() {
        return Err(invalid("trajectory", "empty trajectory"));
    }
    let crossing = trajectory.crossing(0.5);
    Ok(PumpMetrics {
        m0_fraction: trajectory.m0_fraction(),
        tau_50: crossing.map(|c| c.0),
        photons_to_tau50: crossing.map(|c| c.1),
    })
}
