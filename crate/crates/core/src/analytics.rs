//! Strongest-interferer model of radar false alarms.
//!
//! A typical radar with mark 0 listens during slots `1..M` of every PRI. Its
//! false alarms are attributed to the nearest interferer whose beam is
//! mutually aligned with the radar's, which under ideal sector antennas is the
//! nearest point of a thinned PPP of intensity `lambda (phi / 2 pi)^2`. This
//! gives the false-alarm probability, its inverse (the detection threshold)
//! and the analytical detectable range in closed form.
//!
//! Note: the nearest-point law is exact only for `alpha > 2`; at `alpha = 2`
//! the formulas are evaluated directly and should be read as the limit.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::antenna::AntennaPattern;
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::link::detectable_range_from_threshold;

/// Channel access parameters that determine how often an interferer is heard.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccessPattern {
    pub beta: f64,
    pub persistency: f64,
    pub pri_slots: u32,
    pub packet_slots: u32,
}

impl AccessPattern {
    pub fn new(beta: f64, persistency: f64, pri_slots: u32, packet_slots: u32) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::invalid("beta", format!("{beta} is outside [0, 1]")));
        }
        if !(persistency > 0.0 && persistency <= 1.0) {
            return Err(Error::invalid("p_t", format!("{persistency} is outside (0, 1]")));
        }
        if pri_slots < 2 {
            return Err(Error::invalid("M", format!("{pri_slots} slots, need at least 2")));
        }
        if packet_slots < 1 {
            return Err(Error::invalid("L", "packet must last at least 1 slot"));
        }
        Ok(Self {
            beta,
            persistency,
            pri_slots,
            packet_slots,
        })
    }

    pub fn from_config(config: &ScenarioConfig) -> Result<Self> {
        Self::new(config.beta, config.persistency, config.pri_slots, config.packet_slots)
    }

    /// The all-radar network with the same PRI.
    pub fn radar_only(&self) -> Self {
        Self { beta: 0.0, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrongestInterfererModel {
    pub lambda: f64,
    /// Ideal beamwidth, radians.
    pub phi: f64,
    /// Common peak gain (linear).
    pub g_bar: f64,
    pub alpha: f64,
    pub tx_power: f64,
    pub kappa: f64,
}

impl StrongestInterfererModel {
    pub fn new(lambda: f64, phi: f64, g_bar: f64, alpha: f64, tx_power: f64, kappa: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid("lambda", format!("density {lambda} must be positive")));
        }
        if !(phi > 0.0 && phi <= 2.0 * PI) {
            return Err(Error::invalid("phi", format!("beamwidth {phi} rad is outside (0, 2*pi]")));
        }
        if !(g_bar > 0.0 && tx_power > 0.0 && kappa > 0.0) {
            return Err(Error::invalid("g_bar", "gain, power and kappa must be positive"));
        }
        if !(alpha >= 2.0) {
            return Err(Error::invalid("alpha", format!("{alpha} is below 2")));
        }
        Ok(Self {
            lambda,
            phi,
            g_bar,
            alpha,
            tx_power,
            kappa,
        })
    }

    /// Model for a scenario: the radar pattern's nominal beamwidth and peak gain.
    pub fn from_config(config: &ScenarioConfig) -> Result<Self> {
        Self::from_parts(config, &config.radar_pattern)
    }

    fn from_parts(config: &ScenarioConfig, pattern: &AntennaPattern) -> Result<Self> {
        Self::new(
            config.lambda,
            pattern.nominal_beamwidth(),
            pattern.peak_gain(),
            config.alpha,
            config.tx_power,
            config.kappa()?,
        )
    }

    /// Intensity of the mutually aligned interferers.
    pub fn lambda_thinned(&self) -> f64 {
        let f = self.phi / (2.0 * PI);
        self.lambda * f * f
    }

    /// Interference power from an aligned interferer at unit distance.
    fn unit_power(&self) -> f64 {
        self.tx_power * self.g_bar * self.g_bar * self.kappa
    }

    /// True when the nearest-interferer law is only the `alpha -> 2` limit.
    pub fn alpha_caveat(&self) -> bool {
        self.alpha <= 2.0
    }
}

/// Number of packets of an interferer with mark `nu1` that overlap the
/// listening slots `1..=M-1` of a radar pulsing at slot 0.
///
/// Decision epochs sit at `nu1 + kL`. The packet at `nu1` itself always
/// overlaps, except for single-slot packets at offset 0 which coincide with
/// the radar's own pulse.
pub fn overlap_opportunities(nu1: u32, pri_slots: u32, packet_slots: u32) -> Result<u32> {
    if pri_slots < 2 {
        return Err(Error::invalid("M", format!("{pri_slots} slots, need at least 2")));
    }
    if packet_slots < 1 {
        return Err(Error::invalid("L", "packet must last at least 1 slot"));
    }
    if nu1 >= pri_slots {
        return Err(Error::invalid("nu1", format!("{nu1} is outside 0..{pri_slots}")));
    }
    let (m, l) = (pri_slots, packet_slots);
    let own = u32::from(nu1 > 0 || l > 1);
    let before = if nu1 == 0 { 0 } else { (nu1 - 1).div_ceil(l) };
    let after = (m - 1 - (nu1 + l - 1).min(m - 1)).div_ceil(l);
    Ok(own + before + after)
}

/// Probability that the strongest interferer transmits at least once while
/// the typical radar listens.
pub fn activity_probability(ap: &AccessPattern) -> f64 {
    let m = ap.pri_slots;
    let radar = (1.0 - ap.beta) * ((m - 1) as f64 / m as f64);
    if ap.beta == 0.0 {
        return radar;
    }
    let idle = 1.0 - ap.persistency;
    let sum: f64 = (0..m)
        .map(|nu| {
            let omega = overlap_opportunities(nu, m, ap.packet_slots).expect("validated access pattern");
            1.0 - idle.powi(omega as i32)
        })
        .sum();
    radar + ap.beta / m as f64 * sum
}

/// `P{|x1| > y}` for the nearest aligned interferer.
pub fn strongest_interferer_tail(model: &StrongestInterfererModel, y: f64) -> Result<f64> {
    if !(y >= 0.0) {
        return Err(Error::invalid("y", format!("distance {y} must be non-negative")));
    }
    Ok((-model.lambda_thinned() * PI * y * y).exp())
}

pub fn false_alarm_probability(model: &StrongestInterfererModel, ap: &AccessPattern, theta: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::invalid("theta", format!("threshold {theta} W must be positive")));
    }
    let pi_a = activity_probability(ap);
    let exponent = model.lambda * model.phi * model.phi / (4.0 * PI) * (model.unit_power() / theta).powf(2.0 / model.alpha);
    Ok(-pi_a * (-exponent).exp_m1())
}

/// `-ln(1 - pfa / pi_a)`, the aligned-PPP mass that must be empty.
fn required_void_mass(pi_a: f64, pfa_target: f64) -> Result<f64> {
    if !(pfa_target > 0.0 && pfa_target < 1.0) {
        return Err(Error::invalid("pfa_target", format!("{pfa_target} is outside (0, 1)")));
    }
    if pfa_target >= pi_a {
        return Err(Error::UnachievableTarget {
            target: pfa_target,
            pi_a,
        });
    }
    Ok(-(-pfa_target / pi_a).ln_1p())
}

/// Threshold at which the model's false-alarm probability equals the target.
pub fn threshold_for_target_pfa(model: &StrongestInterfererModel, ap: &AccessPattern, pfa_target: f64) -> Result<f64> {
    let mass = required_void_mass(activity_probability(ap), pfa_target)?;
    let base = model.lambda * model.phi * model.phi / (4.0 * PI * mass);
    Ok(model.unit_power() * base.powf(model.alpha / 2.0))
}

/// Detectable range under the strongest-interferer approximation.
///
/// Written directly in closed form; transmit power, frequency and the peak
/// gain all cancel.
pub fn analytical_detectable_range(
    model: &StrongestInterfererModel,
    ap: &AccessPattern,
    sigma: f64,
    g_p: f64,
    pfa_target: f64,
) -> Result<f64> {
    let mass = required_void_mass(activity_probability(ap), pfa_target)?;
    let target = (sigma * g_p / (4.0 * PI)).powf(1.0 / (2.0 * model.alpha));
    let spatial = (4.0 * PI * mass / (model.lambda * model.phi * model.phi)).powf(0.25);
    Ok(target * spatial)
}

/// Detectable range relative to an all-radar network of the same density.
pub fn detection_range_ratio(ap: &AccessPattern, pfa_target: f64) -> Result<f64> {
    let mixed = required_void_mass(activity_probability(ap), pfa_target)?;
    let radar_only = required_void_mass(activity_probability(&ap.radar_only()), pfa_target)?;
    Ok((mixed / radar_only).powf(0.25))
}

/// Throughput density in bits/s/m^2.
pub fn throughput_density(lambda: f64, beta: f64, persistency: f64, rate: f64, bandwidth: f64, p_s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_s) {
        return Err(Error::invalid("p_s", format!("{p_s} is outside [0, 1]")));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::invalid("beta", format!("{beta} is outside [0, 1]")));
    }
    Ok(lambda * beta * persistency * rate * bandwidth * p_s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticalResult {
    pub access: AccessPattern,
    pub model: StrongestInterfererModel,
    pub pfa_target: f64,
    pub sigma: f64,
    pub g_p: f64,
    pub pi_a: f64,
    pub theta: f64,
    pub d_m_a: f64,
    pub xi: f64,
    pub alpha_caveat: bool,
}

impl AnalyticalResult {
    pub fn evaluate(config: &ScenarioConfig) -> Result<Self> {
        let access = AccessPattern::from_config(config)?;
        let model = StrongestInterfererModel::from_config(config)?;
        let pi_a = activity_probability(&access);
        let theta = threshold_for_target_pfa(&model, &access, config.pfa_target)?;
        let d_m_a = analytical_detectable_range(&model, &access, config.sigma, config.g_p, config.pfa_target)?;
        let xi = detection_range_ratio(&access, config.pfa_target)?;
        Ok(Self {
            access,
            model,
            pfa_target: config.pfa_target,
            sigma: config.sigma,
            g_p: config.g_p,
            pi_a,
            theta,
            d_m_a,
            xi,
            alpha_caveat: model.alpha_caveat(),
        })
    }

    /// Range obtained by pushing the analytical threshold through the radar equation.
    pub fn range_via_threshold(&self) -> Result<f64> {
        detectable_range_from_threshold(
            self.theta,
            self.model.tx_power,
            self.model.g_bar,
            self.model.kappa,
            self.sigma,
            self.g_p,
            self.model.alpha,
        )
    }
}
