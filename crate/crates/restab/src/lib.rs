//! File formats, seeded instance generation, the theorem-suite runner and
//! the scenario runner behind the `restab` command-line tool.

pub mod error;
pub mod generate;
pub mod json;
pub mod scenario;
pub mod suite;

pub use error::{RestabError, Result};
pub use generate::{generate_market, generate_trial, PreferenceFamily, ScenarioConfig, TransitionSpec};
pub use scenario::{run_scenario, ScenarioOutcome};
pub use suite::{run_theorem_suite, SuiteOptions, SuiteReport};
