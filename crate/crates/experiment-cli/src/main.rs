use std::process::ExitCode;

use clap::Parser;

use pumpsim_experiment_cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.to_text());
            if report.converged {
                ExitCode::SUCCESS
            } else {
                eprintln!("pumpsim: iteration budget exhausted before convergence");
                ExitCode::from(4)
            }
        }
        Err(e) => {
            eprintln!("pumpsim: {e}");
            e.exit_code()
        }
    }
}
