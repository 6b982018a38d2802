use std::fmt::Write as _;

use pumpsim_core::heating::{expected_cycles, heating_summary, histogram, CycleCounts};

use super::{RunContext, Workflow};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_num, Report};

/// Fluorescence-cycle count and recoil Monte Carlo.
pub struct HeatWorkflow;

fn put_cycles(report: &mut Report, prefix: &str, c: &CycleCounts) {
    for (m, run) in (-4..=4).zip(&c.per_sublevel) {
        report.num(format!("{prefix}cycles_m{m}"), run.photons);
    }
    report
        .num(format!("{prefix}cycles_sublevel_mean"), c.sublevel_mean())
        .num(format!("{prefix}cycles_uniform_start"), c.uniform.photons)
        .opt(format!("{prefix}time_uniform_start_s"), c.uniform.time)
        .put(format!("{prefix}threshold_reached"), c.all_reached());
}

impl Workflow for HeatWorkflow {
    fn name(&self) -> &'static str {
        "heat"
    }

    fn about(&self) -> &'static str {
        "count fluorescence cycles and random-walk the recoil kicks"
    }

    fn run(&self, ctx: &RunContext) -> CliResult<Report> {
        let cfg = ctx.config()?;
        if cfg.beams.is_empty() {
            return Err(CliError::Config(
                "`heat` needs at least one `[beams.*]` table".into(),
            ));
        }
        let setup = cfg.pumping_setup(ctx.prune)?;
        let geometry = cfg.geometry()?;
        let options = cfg.heating_options(ctx.seed()?)?;
        let h = &cfg.heating;
        let summary = heating_summary(h.initial_vrms, &setup, &geometry, &options)?;

        let mut report = Report::new();
        report
            .opt("prune_threshold", setup.prune_threshold)
            .num("threshold", options.threshold)
            .put("samples", options.samples)
            .put("seed", options.seed);
        put_cycles(&mut report, "", &summary.cycles);
        report
            .num("mean_cycles_drawn", summary.walk.mean_cycles)
            .num("delta_vrms_vr", summary.delta_vrms)
            .num("delta_vrms_standard_error_vr", summary.walk.standard_error)
            .num(
                "delta_vrms_closed_form_vr",
                (summary.cycles.sublevel_mean() / 3.0).sqrt(),
            )
            .num("initial_vrms_vr", summary.initial_vrms)
            .num("final_vrms_quadrature_vr", summary.final_vrms_quadrature)
            .num("final_vrms_additive_vr", summary.final_vrms_additive)
            .opt("measured_final_vrms_vr", h.measured_final_vrms);

        for (k, &th) in h.compare_thresholds.iter().enumerate() {
            let c = expected_cycles(&setup, th, options.t_end)?;
            let prefix = format!("compare{k}_");
            report.num(format!("{prefix}threshold"), th);
            put_cycles(&mut report, &prefix, &c);
            let delta = (c.sublevel_mean() / 3.0).sqrt();
            report
                .num(format!("{prefix}delta_vrms_closed_form_vr"), delta)
                .num(
                    format!("{prefix}final_vrms_quadrature_vr"),
                    h.initial_vrms.hypot(delta),
                )
                .num(
                    format!("{prefix}final_vrms_additive_vr"),
                    h.initial_vrms + delta,
                );
        }

        let projections = summary.walk.projections(&geometry.detection_axis);
        let half_range = projections
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
            .max(1.0)
            .ceil();
        let mut hist = String::from("v_over_vr, count\n");
        for (centre, count) in histogram(&projections, h.histogram_bins, half_range) {
            let _ = writeln!(hist, "{}, {count}", fmt_num(centre));
        }
        ctx.out.write("heat_histogram.csv", &hist)?;
        ctx.out.write("heat_summary.txt", &report.to_text())?;
        Ok(report)
    }
}
