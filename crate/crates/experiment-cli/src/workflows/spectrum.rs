use std::fmt::Write as _;

use pumpsim_core::raman::{
    detuning_grid, fit_gaussian, synth_copropagating, synth_counterpropagating,
    velocity_resolution, Geometry, Spectrum, PI_PULSE_FWHM_TAU,
};

use super::{pump, RunContext, Workflow};
use crate::config::{initial_populations, ScenarioConfig};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_num, Report};

/// Co- or counterpropagating Raman spectrum, with a Gaussian fit for the
/// latter.
pub struct SpectrumWorkflow;

const CO_SPAN_HZ: f64 = 2_000.0;
const CO_STEP_HZ: f64 = 1.0;
const COUNTER_SPAN_HZ: f64 = 250_000.0;
const COUNTER_STEP_HZ: f64 = 250.0;

fn populations(cfg: &ScenarioConfig, prune: bool) -> CliResult<Vec<f64>> {
    match cfg.spectrum.populations.as_str() {
        "pumped" => {
            let (_, traj) = pump::simulate(cfg, prune)?;
            Ok(traj.last().unwrap_or_default().to_vec())
        }
        other => initial_populations(other, "spectrum.populations"),
    }
}

fn grid(cfg: &ScenarioConfig, geometry: Geometry) -> CliResult<Vec<f64>> {
    let (span, step) = match geometry {
        Geometry::Copropagating => (CO_SPAN_HZ, CO_STEP_HZ),
        Geometry::Counterpropagating => (COUNTER_SPAN_HZ, COUNTER_STEP_HZ),
    };
    let span = cfg.spectrum.span_hz.unwrap_or(span);
    let step = cfg.spectrum.step_hz.unwrap_or(step);
    detuning_grid(span, step).map_err(|e| CliError::Config(format!("`spectrum`: {e}")))
}

fn with_preamble(report: &Report, spectrum: &Spectrum) -> String {
    report.to_comments() + &spectrum.to_csv()
}

impl Workflow for SpectrumWorkflow {
    fn name(&self) -> &'static str {
        "spectrum"
    }

    fn about(&self) -> &'static str {
        "synthesize a Raman spectrum; counterpropagating spectra are fitted to a Gaussian"
    }

    fn run(&self, ctx: &RunContext) -> CliResult<Report> {
        let cfg = ctx.config()?;
        let constants = cfg.constants()?;
        let pulse = cfg.pulse()?;
        let lines = cfg.raman_lines()?;
        let pops = populations(cfg, ctx.prune)?;
        let grid = grid(cfg, pulse.geometry)?;

        let mut report = Report::new();
        report
            .put("populations", &cfg.spectrum.populations)
            .num("tau_s", pulse.duration_s)
            .num("rabi_rad_s", pulse.rabi_rad_s)
            .num("doppler_hz_per_vr", constants.doppler_hz_per_recoil())
            .num("recoil_velocity_m_s", constants.recoil_velocity());
        if let Some(fwhm) = cfg.spectrum.resolution_fwhm_hz {
            let r = velocity_resolution(fwhm, &constants)?;
            report
                .num("resolution_fwhm_hz", fwhm)
                .num("resolution_vr", r.recoil_units)
                .num("resolution_um_s", r.meters_per_second * 1e6)
                .num("resolution_vr_fraction_inverse", 1.0 / r.recoil_units);
        }

        match pulse.geometry {
            Geometry::Copropagating => {
                report.put("geometry", "copropagating");
                let s = synth_copropagating(&pops, &lines, &pulse, &grid)?;
                let fwhm = s.fwhm();
                report
                    .opt("fwhm_hz", fwhm)
                    .opt("fwhm_tau", fwhm.map(|w| w * pulse.duration_s))
                    .num("fourier_limit_fwhm_tau", PI_PULSE_FWHM_TAU)
                    .opt("measured_fwhm_tau", cfg.spectrum.measured_fwhm_tau)
                    .num("peak_signal", s.peak().map_or(0.0, |p| p.1));
                ctx.out.write("spectrum.csv", &with_preamble(&report, &s))?;
            }
            Geometry::Counterpropagating => {
                report.put("geometry", "counterpropagating");
                let distributions = cfg.velocity_distributions()?;
                let measured = cfg
                    .velocity
                    .as_ref()
                    .map(|v| v.measured_fwhm_khz.clone())
                    .unwrap_or_default();
                let single = distributions.len() == 1;
                let mut table = String::from(
                    "sigma_vr, fwhm_khz, fit_fwhm_khz, fit_sigma_vr, v_rms_um_s, temperature_uk, measured_fwhm_khz, relative_deviation\n",
                );
                for (i, vd) in distributions.iter().enumerate() {
                    let key = |k: &str| {
                        if single {
                            k.to_string()
                        } else {
                            format!("row{i}_{k}")
                        }
                    };
                    let s = synth_counterpropagating(&pops, &lines, vd, &pulse, &grid, &constants)?;
                    let fit = fit_gaussian(&s)?;
                    let sigma_vr = fit.sigma_vr(&constants);
                    let v_um = sigma_vr * constants.recoil_velocity() * 1e6;
                    let t_uk = fit.temperature_k(&constants) * 1e6;
                    report
                        .num(key("sigma_vr_input"), vd.sigma_vr)
                        .opt(key("fwhm_hz"), s.fwhm())
                        .num(key("fit_center_hz"), fit.center_hz)
                        .num(key("fit_fwhm_hz"), fit.fwhm_hz())
                        .num(key("fit_sigma_vr"), sigma_vr)
                        .num(key("v_rms_um_s"), v_um)
                        .num(key("temperature_uk"), t_uk)
                        .num(key("fit_rms_residual"), fit.rms_residual)
                        .put(key("fit_converged"), fit.converged);
                    report.converged &= fit.converged;
                    let (m, dev) = match measured.get(i) {
                        Some(&m) => (fmt_num(m), fmt_num(fit.fwhm_hz() / 1e3 / m - 1.0)),
                        None => ("none".into(), "none".into()),
                    };
                    let _ = writeln!(
                        table,
                        "{}, {}, {}, {}, {}, {}, {m}, {dev}",
                        fmt_num(vd.sigma_vr),
                        s.fwhm().map_or("none".into(), |w| fmt_num(w / 1e3)),
                        fmt_num(fit.fwhm_hz() / 1e3),
                        fmt_num(sigma_vr),
                        fmt_num(v_um),
                        fmt_num(t_uk),
                    );
                    let name = if single {
                        "spectrum.csv".to_string()
                    } else {
                        format!("spectrum_row{i}.csv")
                    };
                    ctx.out.write(&name, &s.to_csv())?;
                }
                ctx.out.write("widths.csv", &table)?;
            }
        }
        ctx.out.write("spectrum_summary.txt", &report.to_text())?;
        Ok(report)
    }
}
