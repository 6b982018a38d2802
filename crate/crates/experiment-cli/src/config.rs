//! Scenario files: TOML documents with one table per concern.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use pumpsim_core::atomic::{Sublevel, ZeemanParams};
use pumpsim_core::constants::{AtomConstants, ATOMIC_MASS_UNIT, CESIUM_MASS_AMU};
use pumpsim_core::heating::{
    HeatingOptions, RecoilGeometry, DEFAULT_CYCLE_THRESHOLD, DEFAULT_SAMPLES,
};
use pumpsim_core::kinetics::{
    single_sublevel, uniform_f4, BeamSpec, PumpingSetup, DEFAULT_DT_GAMMA,
};
use pumpsim_core::raman::{Geometry, RamanLines, RamanPulse, VelocityDistribution};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub constants: ConstantsSection,
    /// Beams keyed by name; iteration order is by name.
    #[serde(default)]
    pub beams: BTreeMap<String, BeamSection>,
    pub pulse: Option<PulseSection>,
    #[serde(default)]
    pub field: FieldSection,
    pub velocity: Option<VelocitySection>,
    #[serde(default)]
    pub integration: IntegrationSection,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    #[serde(default)]
    pub heating: HeatingSection,
    #[serde(default)]
    pub fit: FitSection,
    #[serde(default)]
    pub mc: McSection,
    #[serde(default)]
    pub output: OutputSection,
    /// Directory of the scenario file; relative data paths resolve here.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSection {
    pub gamma_hz: f64,
    pub wavelength_m: f64,
    pub mass_amu: f64,
}

impl Default for ConstantsSection {
    fn default() -> Self {
        let c = AtomConstants::cesium_d2();
        Self {
            gamma_hz: c.gamma_hz,
            wavelength_m: c.wavelength_m,
            mass_amu: CESIUM_MASS_AMU,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSection {
    pub target: String,
    pub intensity_ratio: f64,
    pub detuning_gamma: f64,
    #[serde(default)]
    pub alpha: f64,
    pub linewidth_hz: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSection {
    pub tau_s: f64,
    pub geometry: String,
    /// Defaults to a π pulse.
    pub rabi_rad_s: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    #[serde(default)]
    pub bias_gauss: f64,
    #[serde(default)]
    pub rms_fluct_gauss: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VelocitySection {
    pub sigma_vr: f64,
    #[serde(default)]
    pub mean_vr: f64,
    /// Extra σ values synthesized one after another.
    #[serde(default)]
    pub sweep_sigma_vr: Vec<f64>,
    /// Measured FWHM (kHz) to compare against, one per sweep entry.
    #[serde(default)]
    pub measured_fwhm_khz: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationSection {
    pub dt_gamma: f64,
    pub t_end_s: f64,
    pub sample_interval_s: f64,
    pub prune_threshold: Option<f64>,
    /// `uniform_f4` or a sublevel label such as `g4_m2`.
    pub initial: String,
}

impl Default for IntegrationSection {
    fn default() -> Self {
        Self {
            dt_gamma: DEFAULT_DT_GAMMA,
            t_end_s: 5e-3,
            sample_interval_s: 1e-5,
            prune_threshold: None,
            initial: "uniform_f4".into(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    /// `pumped` (run the beams first), `uniform_f4` or a sublevel label.
    pub populations: String,
    pub span_hz: Option<f64>,
    pub step_hz: Option<f64>,
    /// Line width whose velocity resolution is reported.
    pub resolution_fwhm_hz: Option<f64>,
    /// Measured FWHM·τ product printed next to the model value.
    pub measured_fwhm_tau: Option<f64>,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self {
            populations: "pumped".into(),
            span_hz: None,
            step_hz: None,
            resolution_fwhm_hz: None,
            measured_fwhm_tau: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatingSection {
    pub initial_vrms: f64,
    /// Dark-state fraction at which cycles are counted.
    pub threshold: f64,
    /// Further thresholds reported for comparison.
    #[serde(default)]
    pub compare_thresholds: Vec<f64>,
    pub t_end_s: f64,
    pub pb_axis: [f64; 3],
    pub detection_axis: [f64; 3],
    pub backreflected: bool,
    pub measured_final_vrms: Option<f64>,
    pub histogram_bins: usize,
}

impl Default for HeatingSection {
    fn default() -> Self {
        let g = RecoilGeometry::default();
        Self {
            initial_vrms: 0.0,
            threshold: DEFAULT_CYCLE_THRESHOLD,
            compare_thresholds: Vec::new(),
            t_end_s: 20e-3,
            pb_axis: g.pb_axis,
            detection_axis: g.detection_axis,
            backreflected: g.backreflected,
            measured_final_vrms: None,
            histogram_bins: 81,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub alpha_max: f64,
    pub amplitude_scale: bool,
    pub max_iterations: usize,
    #[serde(default)]
    pub data: Vec<DataRef>,
}

impl Default for FitSection {
    fn default() -> Self {
        Self {
            alpha_max: pumpsim_core::fitting::DEFAULT_ALPHA_MAX,
            amplitude_scale: false,
            max_iterations: pumpsim_core::fitting::DEFAULT_MAX_ITERATIONS,
            data: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataRef {
    pub sublevel: String,
    pub file: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub samples: usize,
    pub seed: u64,
}

impl Default for McSection {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub directory: Option<PathBuf>,
}

fn config_err(msg: impl std::fmt::Display) -> CliError {
    CliError::Config(msg.to_string())
}

fn require_positive(name: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_err(format!("`{name}` must be > 0, got {v}")))
    }
}

fn with_field<T>(field: &str, r: pumpsim_core::Result<T>) -> CliResult<T> {
    r.map_err(|e| config_err(format!("`{field}`: {e}")))
}

/// Parse `uniform_f4` or a sublevel label into a population vector.
pub fn initial_populations(spec: &str, field: &str) -> CliResult<Vec<f64>> {
    if spec == "uniform_f4" {
        return Ok(uniform_f4());
    }
    let level: Sublevel = with_field(field, spec.parse())?;
    with_field(field, single_sublevel(level))
}

impl ScenarioConfig {
    pub fn parse(text: &str, source: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| config_err(format!("{source}: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text, &path.display().to_string())?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn constants(&self) -> CliResult<AtomConstants> {
        let c = &self.constants;
        require_positive("constants.gamma_hz", c.gamma_hz)?;
        require_positive("constants.wavelength_m", c.wavelength_m)?;
        require_positive("constants.mass_amu", c.mass_amu)?;
        Ok(AtomConstants {
            gamma_hz: c.gamma_hz,
            wavelength_m: c.wavelength_m,
            mass_kg: c.mass_amu * ATOMIC_MASS_UNIT,
        })
    }

    pub fn beam_specs(&self) -> CliResult<Vec<BeamSpec>> {
        self.beams
            .iter()
            .map(|(name, b)| {
                let field = format!("beams.{name}");
                let target = with_field(&format!("{field}.target"), b.target.parse())?;
                let mut spec = with_field(
                    &field,
                    BeamSpec::new(target, b.intensity_ratio, b.detuning_gamma, b.alpha),
                )?;
                if let Some(lw) = b.linewidth_hz {
                    require_positive(&format!("{field}.linewidth_hz"), lw)?;
                    spec.linewidth_hz = lw;
                }
                with_field(&field, spec.validate())?;
                Ok(spec)
            })
            .collect()
    }

    /// Pumping setup; `force_prune` applies the default threshold when the
    /// scenario does not set one.
    pub fn pumping_setup(&self, force_prune: bool) -> CliResult<PumpingSetup> {
        let integ = &self.integration;
        require_positive("integration.dt_gamma", integ.dt_gamma)?;
        let threshold = match (integ.prune_threshold, force_prune) {
            (Some(t), _) => Some(t),
            (None, true) => Some(pumpsim_core::kinetics::DEFAULT_PRUNE_THRESHOLD),
            (None, false) => None,
        };
        if let Some(t) = threshold {
            if !(t > 0.0 && t <= 1.0) {
                return Err(config_err(format!(
                    "`integration.prune_threshold` must lie in (0, 1], got {t}"
                )));
            }
        }
        let mut setup = PumpingSetup::new(self.beam_specs()?).pruned(threshold);
        setup.constants = self.constants()?;
        setup.dt_gamma = integ.dt_gamma;
        Ok(setup)
    }

    pub fn initial(&self) -> CliResult<Vec<f64>> {
        initial_populations(&self.integration.initial, "integration.initial")
    }

    pub fn integration_window(&self) -> CliResult<(f64, f64)> {
        let i = &self.integration;
        require_positive("integration.t_end_s", i.t_end_s)?;
        require_positive("integration.sample_interval_s", i.sample_interval_s)?;
        Ok((i.t_end_s, i.sample_interval_s))
    }

    pub fn pulse(&self) -> CliResult<RamanPulse> {
        let p = self
            .pulse
            .as_ref()
            .ok_or_else(|| config_err("missing `[pulse]` table"))?;
        let geometry: Geometry = with_field("pulse.geometry", p.geometry.parse())?;
        require_positive("pulse.tau_s", p.tau_s)?;
        match p.rabi_rad_s {
            Some(r) => with_field("pulse.rabi_rad_s", RamanPulse::new(p.tau_s, r, geometry)),
            None => with_field("pulse.tau_s", RamanPulse::pi_pulse(p.tau_s, geometry)),
        }
    }

    pub fn raman_lines(&self) -> CliResult<RamanLines> {
        let f = &self.field;
        if !(f.rms_fluct_gauss >= 0.0) {
            return Err(config_err("`field.rms_fluct_gauss` must be >= 0"));
        }
        if !f.bias_gauss.is_finite() {
            return Err(config_err("`field.bias_gauss` must be finite"));
        }
        Ok(RamanLines::new(ZeemanParams::cesium(f.bias_gauss)).with_field_noise(f.rms_fluct_gauss))
    }

    /// Velocity distributions to synthesize: the main σ, then the sweep.
    pub fn velocity_distributions(&self) -> CliResult<Vec<VelocityDistribution>> {
        let v = self
            .velocity
            .as_ref()
            .ok_or_else(|| config_err("missing `[velocity]` table"))?;
        if !v.measured_fwhm_khz.is_empty() && v.measured_fwhm_khz.len() != v.sweep_sigma_vr.len() {
            return Err(config_err(
                "`velocity.measured_fwhm_khz` must have one entry per `sweep_sigma_vr` value",
            ));
        }
        let sigmas: Vec<f64> = if v.sweep_sigma_vr.is_empty() {
            vec![v.sigma_vr]
        } else {
            v.sweep_sigma_vr.clone()
        };
        sigmas
            .into_iter()
            .map(|s| {
                with_field(
                    "velocity.sigma_vr",
                    VelocityDistribution::gaussian(s, v.mean_vr),
                )
            })
            .collect()
    }

    pub fn geometry(&self) -> CliResult<RecoilGeometry> {
        let h = &self.heating;
        with_field(
            "heating",
            RecoilGeometry::new(h.pb_axis, h.detection_axis, h.backreflected),
        )
    }

    pub fn heating_options(&self, seed: u64) -> CliResult<HeatingOptions> {
        let h = &self.heating;
        if !(h.threshold > 0.0 && h.threshold < 1.0) {
            return Err(config_err(format!(
                "`heating.threshold` must lie in (0, 1), got {}",
                h.threshold
            )));
        }
        require_positive("heating.t_end_s", h.t_end_s)?;
        if !(h.initial_vrms >= 0.0) {
            return Err(config_err("`heating.initial_vrms` must be >= 0"));
        }
        if self.mc.samples == 0 {
            return Err(config_err("`mc.samples` must be >= 1"));
        }
        if h.histogram_bins == 0 {
            return Err(config_err("`heating.histogram_bins` must be >= 1"));
        }
        Ok(HeatingOptions {
            threshold: h.threshold,
            t_end: h.t_end_s,
            samples: self.mc.samples,
            seed,
        })
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }
}
