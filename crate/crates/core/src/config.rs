use serde::{Deserialize, Serialize};

use crate::antenna::AntennaPattern;
use crate::error::{Error, Result};
use crate::link::free_space_constant;
use crate::units::dbm_to_watts;

/// How the detection threshold is fitted to the false-alarm target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CalibrationScope {
    /// One threshold from PRI maxima pooled over all radars and realizations.
    Pooled,
    /// A separate threshold for each realization.
    PerRealization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimControls {
    pub n_realizations: u32,
    pub n_slots: u32,
    /// Expected node count used to size the simulated square.
    pub target_node_count: u32,
    pub master_seed: u64,
    /// Upper bound on the per-slot SIR of a packet (linear).
    pub sir_cap: f64,
    pub calibration: CalibrationScope,
    /// Radars per realization whose listening windows are traced.
    pub max_tagged_radars: u32,
    /// Communication links per realization whose packets are scored.
    pub max_tagged_links: u32,
    /// The square side is at least this many link distances `d_c`.
    pub min_side_factor: f64,
}

impl Default for SimControls {
    fn default() -> Self {
        Self {
            n_realizations: 100,
            n_slots: 6000,
            target_node_count: 1000,
            master_seed: 1,
            sir_cap: 1e6,
            calibration: CalibrationScope::Pooled,
            max_tagged_radars: 128,
            max_tagged_links: 128,
            min_side_factor: 4.0,
        }
    }
}

impl SimControls {
    /// 20 realizations x 3000 slots x 500 nodes.
    pub fn desk() -> Self {
        Self {
            n_realizations: 20,
            n_slots: 3000,
            target_node_count: 500,
            ..Self::default()
        }
    }
}

/// A complete coexistence scenario. All quantities are linear SI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Node density, devices per m^2.
    pub lambda: f64,
    /// Fraction of communication devices.
    pub beta: f64,
    /// ALOHA persistency.
    pub persistency: f64,
    /// Radar pulse repetition interval, slots.
    pub pri_slots: u32,
    /// Packet duration, slots.
    pub packet_slots: u32,
    /// Transmit power, W.
    pub tx_power: f64,
    /// Carrier frequency, Hz.
    pub f_c: f64,
    /// Bandwidth, Hz. The slot lasts `1 / bandwidth`.
    pub bandwidth: f64,
    pub alpha: f64,
    /// Radar cross-section of the target, m^2.
    pub sigma: f64,
    /// Radar processing gain (linear).
    pub g_p: f64,
    pub pfa_target: f64,
    /// Rate, bits/symbol.
    pub rate: f64,
    /// Transmitter-receiver distance, m.
    pub d_c: f64,
    pub radar_pattern: AntennaPattern,
    pub comm_pattern: AntennaPattern,
    pub sim: SimControls,
}

impl ScenarioConfig {
    /// Reference parameters (10 dBm, 60 GHz, 300 MHz, M = 60, L = 30, 4x4
    /// arrays, ...) at the given density and communication fraction.
    pub fn reference(lambda: f64, beta: f64) -> Self {
        let array = AntennaPattern::planar_array(4).expect("4x4 array is valid");
        Self {
            lambda,
            beta,
            persistency: 0.1,
            pri_slots: 60,
            packet_slots: 30,
            tx_power: dbm_to_watts(10.0),
            f_c: 60e9,
            bandwidth: 300e6,
            alpha: 2.0,
            sigma: 10.0,
            g_p: 10.0,
            pfa_target: 0.1,
            rate: 1.5,
            d_c: 55.0,
            radar_pattern: array,
            comm_pattern: array,
            sim: SimControls::default(),
        }
    }

    /// Same scenario with ideal sectors of the given beamwidths, peak gains
    /// matched to the corresponding arrays.
    pub fn with_sectors(mut self, radar_beamwidth: f64, comm_beamwidth: f64) -> Result<Self> {
        self.radar_pattern = AntennaPattern::matched_sector(radar_beamwidth)?;
        self.comm_pattern = AntennaPattern::matched_sector(comm_beamwidth)?;
        Ok(self)
    }

    pub fn slot_duration(&self) -> f64 {
        1.0 / self.bandwidth
    }

    pub fn kappa(&self) -> Result<f64> {
        free_space_constant(self.f_c)
    }

    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, name: &'static str, reason: impl FnOnce() -> String) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::invalid(name, reason()))
            }
        }
        check(self.lambda > 0.0 && self.lambda.is_finite(), "lambda", || {
            format!("density {} must be positive", self.lambda)
        })?;
        check((0.0..=1.0).contains(&self.beta), "beta", || format!("{} is outside [0, 1]", self.beta))?;
        check(self.persistency > 0.0 && self.persistency <= 1.0, "p_t", || {
            format!("{} is outside (0, 1]", self.persistency)
        })?;
        check(self.pri_slots >= 2, "M", || format!("{} slots, need at least 2", self.pri_slots))?;
        check(self.packet_slots >= 1, "L", || "packet must last at least 1 slot".into())?;
        check(self.tx_power > 0.0 && self.tx_power.is_finite(), "P_t", || {
            format!("{} W must be positive", self.tx_power)
        })?;
        check(self.f_c > 0.0 && self.f_c.is_finite(), "f_c", || format!("{} Hz must be positive", self.f_c))?;
        check(self.bandwidth > 0.0 && self.bandwidth.is_finite(), "B", || {
            format!("{} Hz must be positive", self.bandwidth)
        })?;
        check(self.alpha >= 2.0 && self.alpha.is_finite(), "alpha", || format!("{} is below 2", self.alpha))?;
        check(self.sigma > 0.0, "sigma", || format!("{} m2 must be positive", self.sigma))?;
        check(self.g_p > 0.0, "G_p", || format!("{} must be positive", self.g_p))?;
        check(self.pfa_target > 0.0 && self.pfa_target < 1.0, "pfa_target", || {
            format!("{} is outside (0, 1)", self.pfa_target)
        })?;
        check(self.rate > 0.0, "R", || format!("{} must be positive", self.rate))?;
        check(self.d_c > 0.0, "d_c", || format!("{} m must be positive", self.d_c))?;
        let s = &self.sim;
        check(s.n_realizations >= 1, "n_realizations", || "need at least one realization".into())?;
        check(s.n_slots >= 2 * self.pri_slots, "n_slots", || {
            format!("{} slots is shorter than two PRIs ({})", s.n_slots, 2 * self.pri_slots)
        })?;
        check(s.target_node_count >= 100, "target_node_count", || {
            format!("{} is below 100", s.target_node_count)
        })?;
        check(s.sir_cap > 0.0, "sir_cap", || format!("{} must be positive", s.sir_cap))?;
        check(s.min_side_factor > 2.0, "min_side_factor", || {
            format!("{} must exceed 2 so receivers stay inside half the torus", s.min_side_factor)
        })?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_is_valid() {
        let c = ScenarioConfig::reference(1e-3, 0.33);
        c.validate().unwrap();
        assert_eq!(c.slot_duration(), 1.0 / 300e6);
    }

    #[test]
    fn rejects_out_of_range_values() {
        let mut c = ScenarioConfig::reference(1e-3, 0.33);
        c.persistency = 1.5;
        let err = c.validate().unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "p_t", .. }), "{err}");

        let mut c = ScenarioConfig::reference(1e-3, 1.2);
        assert!(c.validate().is_err());
        c.beta = 0.5;
        c.pri_slots = 1;
        assert!(c.validate().is_err());
        c.pri_slots = 60;
        c.pfa_target = 1.0;
        assert!(c.validate().is_err());
    }
}
