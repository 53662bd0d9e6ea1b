//! Slot-level Monte Carlo simulation on a torus.

pub mod calibration;
pub mod comm;
pub mod engine;
pub mod geometry;
pub mod interference;
pub mod radar;
pub mod realization;
pub mod rng;

pub use calibration::{calibrate_threshold, false_alarm_rate, CalibrationResult};
pub use comm::PacketRecord;
pub use engine::{
    realization_seeds, run_measured, run_monte_carlo, run_realizations, simulate_comm, simulate_radar_range,
    simulate_realization, summarize, CommMetrics, DutyMetrics, MeanSe, Measure, RadarMetrics, RealizationOutcome,
    SimMetrics,
};
pub use geometry::{Torus, TorusPoint};
pub use interference::{slot_interference_at, Radio, Receiver};
pub use radar::{radar_pri_max_traces, SlotSample};
pub use realization::{comm_epochs, sample_realization, Node, Realization, Role, Schedule};
