use pumpsim_core::atomic::Sublevel;
use pumpsim_core::fitting::{fit_alpha, residual_report, FitConfig, ObservationSeries};

use super::{RunContext, Workflow};
use crate::error::{CliError, CliResult};
use crate::output::Report;

/// Least-squares α from observed sublevel populations.
pub struct FitWorkflow;

impl Workflow for FitWorkflow {
    fn name(&self) -> &'static str {
        "fit"
    }

    fn about(&self) -> &'static str {
        "fit the polarization contamination alpha to observed population curves"
    }

    fn run(&self, ctx: &RunContext) -> CliResult<Report> {
        let cfg = ctx.config()?;
        let mut sources: Vec<(Sublevel, std::path::PathBuf)> = Vec::new();
        for d in &cfg.fit.data {
            let level: Sublevel = d
                .sublevel
                .parse()
                .map_err(|e| CliError::Config(format!("`fit.data.sublevel`: {e}")))?;
            sources.push((level, cfg.resolve(&d.file)));
        }
        sources.extend(ctx.data.iter().cloned());
        if sources.is_empty() {
            return Err(CliError::Config(
                "no observation data: add `[[fit.data]]` entries or pass --data".into(),
            ));
        }
        let series: Vec<ObservationSeries> = sources
            .iter()
            .map(|(level, path)| ObservationSeries::load(path, *level))
            .collect::<Result<_, _>>()?;

        if !(cfg.fit.alpha_max > 0.0) {
            return Err(CliError::Config("`fit.alpha_max` must be > 0".into()));
        }
        let mut fc = FitConfig::new(cfg.pumping_setup(ctx.prune)?);
        fc.initial = cfg.initial()?;
        fc.alpha_max = cfg.fit.alpha_max;
        fc.amplitude_scale = cfg.fit.amplitude_scale;
        fc.max_iterations = cfg.fit.max_iterations;

        let fit = fit_alpha(&series, &fc)?;
        let residuals = residual_report(&series, &fc, fit.alpha_hat)?;

        let mut report = Report::new();
        report
            .put("series", series.len())
            .put(
                "points",
                series.iter().map(ObservationSeries::len).sum::<usize>(),
            )
            .num("alpha_max", fc.alpha_max)
            .num("alpha_tolerance", fc.tolerance())
            .num("alpha_hat", fit.alpha_hat)
            .num("sse", fit.sse)
            .put("iterations", fit.iterations)
            .put("evaluations", fit.evaluations)
            .put("converged", fit.converged)
            .put("weakly_identified", fit.weakly_identified);
        for (s, scale) in series.iter().zip(&fit.scales) {
            report.num(format!("scale_{}", s.level.label()), *scale);
        }
        report.converged = fit.converged;

        ctx.out.write("fit_report.txt", &report.to_text())?;
        ctx.out.write(
            "fit_residuals.csv",
            &(report.to_comments() + &residuals.to_csv()),
        )?;
        Ok(report)
    }
}
