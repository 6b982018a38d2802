use std::fmt::Write as _;

use pumpsim_core::kinetics::{pump_metrics, PopulationTrajectory, PumpingSetup};

use super::{RunContext, Workflow};
use crate::config::ScenarioConfig;
use crate::error::CliResult;
use crate::output::{fmt_num, Report};

/// Population dynamics under the configured beams.
pub struct PumpWorkflow;

/// Run the configured pumping scenario.
pub fn simulate(
    cfg: &ScenarioConfig,
    prune: bool,
) -> CliResult<(PumpingSetup, PopulationTrajectory)> {
    let setup = cfg.pumping_setup(prune)?;
    let (t_end, every) = cfg.integration_window()?;
    let traj = setup.run(&cfg.initial()?, t_end, every)?;
    Ok((setup, traj))
}

fn m0_curve(traj: &PopulationTrajectory) -> String {
    let mut out = String::from("time_s, m0_fraction, scattered_photons\n");
    for ((t, f), n) in traj
        .times
        .iter()
        .zip(traj.m0_fraction())
        .zip(&traj.scattered_photons)
    {
        let _ = writeln!(out, "{}, {}, {}", fmt_num(*t), fmt_num(f), fmt_num(*n));
    }
    out
}

impl Workflow for PumpWorkflow {
    fn name(&self) -> &'static str {
        "pump"
    }

    fn about(&self) -> &'static str {
        "integrate the rate equations and report the m=0 fraction, tau_50 and photon count"
    }

    fn run(&self, ctx: &RunContext) -> CliResult<Report> {
        let cfg = ctx.config()?;
        let (setup, traj) = simulate(cfg, ctx.prune)?;
        let metrics = pump_metrics(&traj)?;
        let matrix = setup.rate_matrix()?;

        let mut report = Report::new();
        report
            .put("beams", setup.beams.len())
            .opt("prune_threshold", setup.prune_threshold)
            .put("active_sublevels", matrix.active_count())
            .num("dt_s", setup.dt())
            .num("t_end_s", *traj.times.last().unwrap_or(&0.0))
            .num("m0_fraction_initial", metrics.m0_fraction[0])
            .num(
                "m0_fraction_final",
                *metrics.m0_fraction.last().unwrap_or(&0.0),
            )
            .opt("tau_50_s", metrics.tau_50)
            .opt("photons_to_tau50", metrics.photons_to_tau50)
            .num(
                "photons_total",
                *traj.scattered_photons.last().unwrap_or(&0.0),
            );

        ctx.out.write("pump_trajectory.csv", &traj.to_csv())?;
        ctx.out
            .write("pump_m0.csv", &(report.to_comments() + &m0_curve(&traj)))?;
        ctx.out.write("pump_metrics.txt", &report.to_text())?;
        Ok(report)
    }
}
