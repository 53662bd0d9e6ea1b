//! Line-of-sight link budget: interference, communication signal and radar echo.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::SPEED_OF_LIGHT;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudgetConstants {
    /// Free-space constant `(c / (4 pi f_c))^2`, in m^2.
    pub kappa: f64,
    pub c: f64,
}

impl LinkBudgetConstants {
    pub fn for_carrier(f_c: f64) -> Result<Self> {
        Ok(Self {
            kappa: free_space_constant(f_c)?,
            c: SPEED_OF_LIGHT,
        })
    }
}

pub fn free_space_constant(f_c: f64) -> Result<f64> {
    if !(f_c > 0.0 && f_c.is_finite()) {
        return Err(Error::invalid("f_c", format!("carrier frequency {f_c} Hz must be positive")));
    }
    let r = SPEED_OF_LIGHT / (4.0 * PI * f_c);
    Ok(r * r)
}

/// Power received from one transmitter at distance `d`.
#[inline]
pub fn interference_term(p_t: f64, g_tx: f64, g_rx: f64, kappa: f64, d: f64, alpha: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::SingularGeometry(format!("transmitter-receiver distance {d} m")));
    }
    Ok(p_t * g_tx * g_rx * kappa * path_gain(d, alpha))
}

/// `d^-alpha`, with the common alpha = 2 case kept exact.
#[inline]
pub(crate) fn path_gain(d: f64, alpha: f64) -> f64 {
    if alpha == 2.0 {
        1.0 / (d * d)
    } else {
        d.powf(-alpha)
    }
}

/// Useful power at a communication receiver facing its transmitter.
pub fn comm_signal_power(p_t: f64, g_peak_comm: f64, kappa: f64, d_c: f64, alpha: f64) -> Result<f64> {
    interference_term(p_t, g_peak_comm, g_peak_comm, kappa, d_c, alpha)
}

/// Echo power from a boresight target at range `d_r` (radar equation).
pub fn radar_echo_power(
    p_t: f64,
    g_peak_radar: f64,
    kappa: f64,
    sigma: f64,
    g_p: f64,
    d_r: f64,
    alpha: f64,
) -> Result<f64> {
    if !(d_r > 0.0) {
        return Err(Error::SingularGeometry(format!("target range {d_r} m")));
    }
    Ok(echo_scale(p_t, g_peak_radar, kappa, sigma, g_p) * d_r.powf(-2.0 * alpha))
}

/// Largest range whose echo alone reaches the threshold `theta`.
pub fn detectable_range_from_threshold(
    theta: f64,
    p_t: f64,
    g_peak_radar: f64,
    kappa: f64,
    sigma: f64,
    g_p: f64,
    alpha: f64,
) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::invalid("theta", format!("detection threshold {theta} W must be positive")));
    }
    Ok((echo_scale(p_t, g_peak_radar, kappa, sigma, g_p) / theta).powf(1.0 / (2.0 * alpha)))
}

fn echo_scale(p_t: f64, g: f64, kappa: f64, sigma: f64, g_p: f64) -> f64 {
    p_t * g * g * kappa * sigma * g_p / (4.0 * PI)
}

/// Minimum packet-average SIR for capacity-achieving codes at `rate` bits/symbol.
pub fn decoding_threshold(rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::invalid("R", format!("rate {rate} must be positive")));
    }
    Ok(rate.exp2() - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{db_to_linear, dbm_to_watts};
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn kappa_values() {
        // (2.998e8 / (4 pi 60e9))^2, evaluated independently
        assert!(rel(free_space_constant(60e9).unwrap(), 1.581_033_340_038_31e-7) < 1e-12);
        assert!(rel(free_space_constant(SPEED_OF_LIGHT / (4.0 * PI)).unwrap(), 1.0) < 1e-15);
        let k1 = free_space_constant(30e9).unwrap();
        let k2 = free_space_constant(60e9).unwrap();
        assert!(rel(k1 / 4.0, k2) < 1e-15);
        assert!(free_space_constant(0.0).is_err());
        assert!(free_space_constant(-1.0).is_err());
    }

    #[test]
    fn interference_examples() {
        assert_eq!(interference_term(0.5, 1.0, 1.0, 2.0, 1.0, 2.0).unwrap(), 1.0);
        let a = interference_term(1.0, 1.0, 1.0, 1.0, 3.0, 2.0).unwrap();
        let b = interference_term(1.0, 1.0, 1.0, 1.0, 6.0, 2.0).unwrap();
        assert!(rel(a / 4.0, b) < 1e-15);
        let v = interference_term(0.01, 44.67, 44.67, 1.581e-7, 100.0, 2.0).unwrap();
        assert!(rel(v, 3.154_741_470_9e-10) < 1e-9);
        assert!(matches!(interference_term(1.0, 1.0, 1.0, 1.0, 0.0, 2.0), Err(Error::SingularGeometry(_))));
    }

    #[test]
    fn comm_signal_matches_table_values() {
        let k = free_space_constant(60e9).unwrap();
        let g = db_to_linear(16.5);
        let p = dbm_to_watts(10.0);
        let s = comm_signal_power(p, g, k, 55.0, 2.0).unwrap();
        assert!(rel(s, 1.042_835_121_351e-9) < 1e-9);
        assert_eq!(s, interference_term(p, g, g, k, 55.0, 2.0).unwrap());
        assert_eq!(comm_signal_power(0.3, 1.0, 2.0, 1.0, 2.0).unwrap(), 0.3 * 2.0);
    }

    #[test]
    fn radar_echo_examples() {
        let s = radar_echo_power(1.0, 1.0, 1.0, 4.0 * PI, 1.0, 1.0, 2.0).unwrap();
        assert!(rel(s, 1.0) < 1e-15);
        let a = radar_echo_power(1.0, 2.0, 3.0, 4.0, 5.0, 7.0, 2.0).unwrap();
        let b = radar_echo_power(1.0, 2.0, 3.0, 4.0, 5.0, 14.0, 2.0).unwrap();
        assert!(rel(a / 16.0, b) < 1e-14);
        let k = free_space_constant(60e9).unwrap();
        let echo = radar_echo_power(dbm_to_watts(10.0), db_to_linear(16.5), k, 10.0, 10.0, 10.0, 2.0).unwrap();
        // direct evaluation of P G^2 kappa sigma G_p / (4 pi) * 10^-4
        assert!(rel(echo, 2.510_332_011_442_66e-9) < 1e-9);
        assert!(radar_echo_power(1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 2.0).is_err());
    }

    #[test]
    fn detectable_range_examples() {
        let scale = 0.01 * 9.0 * 2e-7 * 10.0 * 10.0 / (4.0 * PI);
        let d = detectable_range_from_threshold(scale, 0.01, 3.0, 2e-7, 10.0, 10.0, 2.0).unwrap();
        assert!(rel(d, 1.0) < 1e-14);
        let d1 = detectable_range_from_threshold(1e-12, 0.01, 3.0, 2e-7, 10.0, 10.0, 2.0).unwrap();
        let d2 = detectable_range_from_threshold(0.5e-12, 0.01, 3.0, 2e-7, 10.0, 10.0, 2.0).unwrap();
        assert!(rel(d2 / d1, 2f64.powf(0.25)) < 1e-14);
        assert!(detectable_range_from_threshold(0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn decoding_threshold_examples() {
        assert_eq!(decoding_threshold(1.0).unwrap(), 1.0);
        assert!((decoding_threshold(1.5).unwrap() - 1.828_427_124_746_19).abs() < 1e-12);
        assert!(decoding_threshold(1e-12).unwrap() < 1e-11);
        assert!(decoding_threshold(0.0).is_err());
    }

    proptest! {
        #[test]
        fn range_inverts_echo(d in 1e-2f64..1e4, alpha in 2.0f64..4.0) {
            let k = free_space_constant(60e9).unwrap();
            let theta = radar_echo_power(0.01, 44.67, k, 10.0, 10.0, d, alpha).unwrap();
            let back = detectable_range_from_threshold(theta, 0.01, 44.67, k, 10.0, 10.0, alpha).unwrap();
            prop_assert!(rel(back, d) < 1e-12);
        }
    }
}
