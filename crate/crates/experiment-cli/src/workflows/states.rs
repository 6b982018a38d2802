use std::fmt::Write as _;

use pumpsim_core::atomic::{enumerate_states, BranchingTable, Manifold, NUM_STATES};
use pumpsim_core::kinetics::active_labels;

use super::{RunContext, Workflow};
use crate::error::CliResult;
use crate::output::Report;

/// Sublevel table, optional branching ratios and active-equation counts.
pub struct StatesWorkflow;

pub fn state_table() -> String {
    let mut out = String::from("index, label, manifold, f, m\n");
    for (i, s) in enumerate_states().iter().enumerate() {
        let manifold = match s.manifold {
            Manifold::Ground => "ground",
            Manifold::Excited => "excited",
        };
        let _ = writeln!(out, "{i}, {}, {manifold}, {}, {}", s.label(), s.f, s.m);
    }
    out
}

impl Workflow for StatesWorkflow {
    fn name(&self) -> &'static str {
        "states"
    }

    fn about(&self) -> &'static str {
        "list the 43 sublevels and, with beams configured, the active equation count"
    }

    fn needs_config(&self) -> bool {
        false
    }

    fn run(&self, ctx: &RunContext) -> CliResult<Report> {
        let mut report = Report::new();
        ctx.out.write("states.csv", &state_table())?;
        report.put("states", NUM_STATES);
        if ctx.branching {
            ctx.out
                .write("branching.csv", &BranchingTable::get().to_csv())?;
            report.put("branching_file", "branching.csv");
        }
        if let Some(cfg) = &ctx.config {
            if !cfg.beams.is_empty() {
                let full = cfg.pumping_setup(false)?;
                report.put("active_sublevels_full", full.rate_matrix()?.active_count());
                let setup = cfg.pumping_setup(ctx.prune)?;
                if let Some(th) = setup.prune_threshold {
                    let pruned = setup.rate_matrix()?;
                    report
                        .num("prune_threshold", th)
                        .put("active_sublevels", pruned.active_count())
                        .put("active_labels", active_labels(&pruned).join(" "));
                }
            }
        }
        ctx.out.write("states_summary.txt", &report.to_text())?;
        Ok(report)
    }
}
