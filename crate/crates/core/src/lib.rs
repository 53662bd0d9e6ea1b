//! Coexistence of pulsed radars and ALOHA communication devices in a shared
//! band: closed-form strongest-interferer analytics and a slot-level Monte
//! Carlo engine.

pub mod analytics;
pub mod antenna;
pub mod config;
pub mod error;
pub mod link;
pub mod sim;
pub mod stats;
pub mod units;

pub use analytics::{AccessPattern, AnalyticalResult, StrongestInterfererModel};
pub use antenna::{AntennaPattern, PatternKind};
pub use config::{CalibrationScope, ScenarioConfig, SimControls};
pub use error::{Error, Result};
pub use link::LinkBudgetConstants;
pub use sim::{CalibrationResult, Realization, SimMetrics};
pub use stats::Estimate;
