//! The batch workflows, registered by name.

mod fit;
mod heat;
mod pump;
mod spectrum;
mod states;

pub use fit::FitWorkflow;
pub use heat::HeatWorkflow;
pub use pump::PumpWorkflow;
pub use spectrum::SpectrumWorkflow;
pub use states::StatesWorkflow;

use std::path::PathBuf;

use pumpsim_core::atomic::Sublevel;

use crate::config::ScenarioConfig;
use crate::error::{CliError, CliResult};
use crate::output::{OutputDir, Report};

/// Everything a workflow needs from the command line.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub config: Option<ScenarioConfig>,
    pub out: OutputDir,
    pub seed: Option<u64>,
    pub prune: bool,
    /// Extra observation files given on the command line.
    pub data: Vec<(Sublevel, PathBuf)>,
    pub branching: bool,
}

impl RunContext {
    pub fn config(&self) -> CliResult<&ScenarioConfig> {
        self.config
            .as_ref()
            .ok_or_else(|| CliError::Config("this command needs --config".into()))
    }

    pub fn seed(&self) -> CliResult<u64> {
        Ok(self.seed.unwrap_or(self.config()?.mc.seed))
    }
}

pub trait Workflow: Send + Sync {
    fn name(&self) -> &'static str;

    fn about(&self) -> &'static str;

    fn needs_config(&self) -> bool {
        true
    }

    /// Write artifacts into `ctx.out` and return the summary.
    fn run(&self, ctx: &RunContext) -> CliResult<Report>;
}

#[derive(Default)]
pub struct Registry {
    workflows: Vec<Box<dyn Workflow>>,
}

impl Registry {
    pub fn register<W: Workflow + 'static>(&mut self, workflow: W) -> &mut Self {
        assert!(
            self.get(workflow.name()).is_none(),
            "workflow `{}` registered twice",
            workflow.name()
        );
        self.workflows.push(Box::new(workflow));
        self
    }

    pub fn get(&self, name: &str) -> Option<&dyn Workflow> {
        self.workflows
            .iter()
            .find(|w| w.name() == name)
            .map(|w| w.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.workflows.iter().map(|w| w.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Workflow> {
        self.workflows.iter().map(|w| w.as_ref())
    }
}

pub fn default_registry() -> Registry {
    let mut r = Registry::default();
    r.register(StatesWorkflow)
        .register(PumpWorkflow)
        .register(SpectrumWorkflow)
        .register(HeatWorkflow)
        .register(FitWorkflow);
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lists_all_commands() {
        let r = default_registry();
        assert_eq!(r.names(), vec!["states", "pump", "spectrum", "heat", "fit"]);
        assert!(r.get("heat").is_some());
        assert!(r.get("nope").is_none());
        assert!(!r.get("states").unwrap().needs_config());
    }

    #[test]
    #[should_panic(expected = "registered twice")]
    fn duplicate_names_rejected() {
        let mut r = default_registry();
        r.register(PumpWorkflow);
    }
}
