//! Synchronous round engine: KT0 port wiring, CONGEST accounting, setup
//! ordering and post-run property checks.

mod config;
mod engine;
mod network;
mod report;
mod schedule;
pub mod trace;

pub use config::{InputSpec, Mode, TrialConfig};
pub use engine::{run_trial, run_trial_with, run_trial_with_corrupt, SetupLedger, SetupStage, TrialRun};
pub use network::PortMap;
pub use report::{check_properties, Outcome, PropertyVerdict, TrialReport};
pub use schedule::{Phase, Schedule};
pub use trace::TraceRecord;

use crate::error::SimFault;

fn run_in(mode: Mode, config: &TrialConfig) -> Result<TrialReport, SimFault> {
    run_trial(&TrialConfig {
        mode,
        ..config.clone()
    })
}

/// Implicit agreement: only candidates decide.
pub fn run_implicit(config: &TrialConfig) -> Result<TrialReport, SimFault> {
    run_in(Mode::Implicit, config)
}

/// Implicit agreement followed by a signed announcement to every node.
pub fn run_explicit(config: &TrialConfig) -> Result<TrialReport, SimFault> {
    run_in(Mode::Explicit, config)
}

/// The committee protocol with candidates wired to each other directly.
pub fn run_kt1(config: &TrialConfig) -> Result<TrialReport, SimFault> {
    run_in(Mode::Kt1, config)
}
