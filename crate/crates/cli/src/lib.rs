//! Library side of the `persuade-lab` command-line tool: scenario files,
//! command dispatch and report rendering.

pub mod commands;
pub mod report;
pub mod scenario;

pub use commands::{run_command, CliError, Command, CommandOutput, Format};
pub use scenario::{parse_scenario, parse_scenario_str, Scenario, ScenarioError};
