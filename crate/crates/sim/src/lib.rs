//! Monte Carlo campaigns, configuration, file formats and the command-line
//! front end for the `isac-core` sensing model.

pub mod config;
pub mod engine;
pub mod experiments;
pub mod export;
pub mod montecarlo;
pub mod report;

pub use config::{Campaign, CampaignConfig, CpMode, Profile};
pub use engine::FftEngine;
pub use montecarlo::Runner;
