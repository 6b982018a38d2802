//! Rate equations for optical pumping into (g, F=4, m=0).

mod beam;
mod integrate;
mod matrix;
mod metrics;

pub use beam::{
    chi, chi_raw, polarization_weights, stimulated_rate, stimulated_rate_si, BeamSpec,
    PolarizationWeights, Transition,
};
pub use integrate::{
    ground_fraction, integrate_rk4, step_index, PopulationTrajectory, Rk4Propagator,
    STABILITY_LIMIT,
};
pub use matrix::{active_labels, RateMatrix, StimulatedTerm};
pub use metrics::{pump_metrics, PumpMetrics};

use crate::atomic::{Sublevel, NUM_STATES};
use crate::constants::AtomConstants;
use crate::error::{invalid, Result};

/// Polarizing-beam intensity I/I_s of the reference pumping runs.
pub const REFERENCE_PB_INTENSITY: f64 = 0.019;
/// Repumper intensity I/I_s of the reference pumping runs.
pub const REFERENCE_REPUMPER_INTENSITY: f64 = 0.023;
/// Best-fit polarization contamination of the reference runs.
pub const REFERENCE_ALPHA: f64 = 0.013;
/// Relative χ cutoff of the reduced equation set.
pub const DEFAULT_PRUNE_THRESHOLD: f64 = 1e-3;
/// Default step, Γ·dt.
pub const DEFAULT_DT_GAMMA: f64 = 0.01;

/// 1/9 in each F=4 ground sublevel.
pub fn uniform_f4() -> Vec<f64> {
    let mut n = vec![0.0; NUM_STATES];
    for m in -4..=4 {
        n[Sublevel::ground(4, m).index().unwrap()] = 1.0 / 9.0;
    }
    n
}

/// All population in one sublevel.
pub fn single_sublevel(level: Sublevel) -> Result<Vec<f64>> {
    let mut n = vec![0.0; NUM_STATES];
    n[level.try_index()?] = 1.0;
    Ok(n)
}

/// Beams, constants and integration step of one pumping configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpingSetup {
    pub constants: AtomConstants,
    pub beams: Vec<BeamSpec>,
    /// Relative χ cutoff; `None` keeps every stimulated term.
    pub prune_threshold: Option<f64>,
    pub dt_gamma: f64,
}

impl PumpingSetup {
    pub fn new(beams: Vec<BeamSpec>) -> Self {
        Self {
            constants: AtomConstants::cesium_d2(),
            beams,
            prune_threshold: None,
            dt_gamma: DEFAULT_DT_GAMMA,
        }
    }

    /// π-polarized beam on 4→4' plus a repumper on 3→4' sharing the same
    /// contamination α, at the reference intensities.
    pub fn polarizer_with_repumper(pb_detuning_gamma: f64, alpha: f64) -> Result<Self> {
        Ok(Self::new(vec![
            BeamSpec::new(
                Transition::new(4, 4)?,
                REFERENCE_PB_INTENSITY,
                pb_detuning_gamma,
                alpha,
            )?,
            BeamSpec::new(
                Transition::new(3, 4)?,
                REFERENCE_REPUMPER_INTENSITY,
                0.0,
                alpha,
            )?,
        ]))
    }

    pub fn pruned(mut self, threshold: Option<f64>) -> Self {
        self.prune_threshold = threshold;
        self
    }

    /// Same beams with every polarization contamination set to `alpha`.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        let mut out = self.clone();
        out.beams = self
            .beams
            .iter()
            .cloned()
            .map(|b| b.with_alpha(alpha))
            .collect::<Result<_>>()?;
        Ok(out)
    }

    /// Same configuration with all intensities multiplied by `factor`.
    pub fn with_intensity_scale(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for b in &mut out.beams {
            b.intensity_ratio *= factor;
        }
        out
    }

    pub fn dt(&self) -> f64 {
        self.dt_gamma / self.constants.gamma()
    }

    /// Generator, pruned when a threshold is set.
    pub fn rate_matrix(&self) -> Result<RateMatrix> {
        let full = RateMatrix::assemble(&self.beams, &self.constants)?;
        match self.prune_threshold {
            Some(th) => Ok(full.prune(th)?.0),
            None => Ok(full),
        }
    }

    pub fn propagator(&self) -> Result<Rk4Propagator> {
        if !(self.dt_gamma > 0.0) {
            return Err(invalid(
                "dt_gamma",
                format!("must be > 0, got {}", self.dt_gamma),
            ));
        }
        Rk4Propagator::new(&self.rate_matrix()?, self.dt())
    }

    /// Integrate over [0, t_end] with samples every `sample_interval` seconds.
    pub fn run(
        &self,
        n0: &[f64],
        t_end: f64,
        sample_interval: f64,
    ) -> Result<PopulationTrajectory> {
        if !(sample_interval > 0.0) {
            return Err(invalid("sample_interval", "must be > 0"));
        }
        let dt = self.dt();
        let every = step_index(sample_interval, dt).max(1);
        integrate_rk4(&self.rate_matrix()?, n0, dt, t_end, every)
    }

    /// Populations at the given (nondecreasing) times, each rounded to the
    /// nearest step.
    pub fn sample_at(&self, n0: &[f64], times: &[f64]) -> Result<PopulationTrajectory> {
        let dt = self.dt();
        let steps: Vec<u64> = times.iter().map(|&t| step_index(t, dt)).collect();
        self.propagator()?.sample_at_steps(n0, &steps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::dark_state_index;

    #[test]
    fn uniform_initial_condition() {
        let n = uniform_f4();
        assert!((n.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(n.iter().filter(|&&v| v > 0.0).count(), 9);
        assert!((n[dark_state_index()] - 1.0 / 9.0).abs() < 1e-16);
    }

    #[test]
    fn with_alpha_touches_every_beam() {
        let s = PumpingSetup::polarizer_with_repumper(-0.5, 0.0).unwrap();
        let t = s.with_alpha(0.05).unwrap();
        assert!(t.beams.iter().all(|b| b.polarization.plus > 0.0));
        assert!(s.with_alpha(-1.0).is_err());
    }
}
