//! Deterministic two-radar network used to check threshold calibration.
//!
//! Radar 0 sits at the origin facing +x; radar 1 sits 40 m away facing back,
//! with mark 25 so its pulse lands inside every listening window of radar 0.
//! Every PRI maximum at radar 0 is the same single interference term `P`, so
//! the calibrated threshold must be exactly `P`.

use std::f64::consts::PI;

use coexist_core::link::interference_term;
use coexist_core::sim::interference::Radio;
use coexist_core::sim::realization::build_schedules;
use coexist_core::sim::{calibrate_threshold, radar_pri_max_traces, CalibrationResult, Node, Realization, Role, Torus};
use coexist_core::{CalibrationScope, ScenarioConfig};
use rand::SeedableRng;

use crate::error::Result;

pub const SEPARATION_M: f64 = 40.0;
pub const N_SLOTS: u32 = 60_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixtureCalibration {
    pub calibration: CalibrationResult,
    /// The single interference term the threshold should reproduce.
    pub expected: f64,
}

impl FixtureCalibration {
    pub fn relative_error(&self) -> f64 {
        (self.calibration.theta - self.expected).abs() / self.expected
    }
}

pub fn two_node(config: &ScenarioConfig) -> Result<Realization> {
    let torus = Torus::new(1000.0)?;
    let radar = |x: f64, boresight: f64, mark: u32| Node {
        position: torus.point(x, 0.0),
        role: Role::Radar,
        mark,
        boresight,
    };
    let nodes = vec![radar(0.0, 0.0, 0), radar(SEPARATION_M, PI, 25)];
    let schedules = build_schedules(&nodes, N_SLOTS, config.packet_slots, config.persistency, &mut rand_chacha::ChaCha8Rng::seed_from_u64(0));
    Ok(Realization {
        torus,
        nodes,
        schedules,
        n_slots: N_SLOTS,
        pri_slots: config.pri_slots,
        packet_slots: config.packet_slots,
        seed: 0,
    })
}

/// Calibrates on radar 0 of the fixture using the scenario's radio parameters.
pub fn calibrate_two_node(config: &ScenarioConfig) -> Result<FixtureCalibration> {
    let radio = Radio::from_config(config)?;
    let r = two_node(config)?;
    let traces = radar_pri_max_traces(&r, &radio, 1, false)?;
    let calibration = calibrate_threshold(&traces.pri_maxima, config.pfa_target, CalibrationScope::Pooled)?;
    let g = config.radar_pattern.peak_gain();
    let expected = interference_term(config.tx_power, g, g, config.kappa()?, SEPARATION_M, config.alpha)?;
    Ok(FixtureCalibration { calibration, expected })
}
