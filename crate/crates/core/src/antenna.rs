//! Azimuth-plane antenna gain patterns.
//!
//! Two pattern families are supported: the ideal sector used by the
//! strongest-interferer analysis, and a square planar array of isotropic
//! elements at half-wavelength spacing with a perfectly absorbing backplane.
//! The array is evaluated in the azimuth plane only (the network is planar)
//! but its gain is normalized by the full 3-D directivity.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nominal half-power beamwidth (degrees) of an `n x n` array is labelled
/// `ARRAY_BEAMWIDTH_SCALE_DEG / n`: 4x4 is the 30 degree reference antenna
/// and 2x2 the 60 degree wide one.
pub const ARRAY_BEAMWIDTH_SCALE_DEG: f64 = 120.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PatternKind {
    /// Constant gain inside a beam of the given width (radians), zero elsewhere.
    IdealSector { beamwidth: f64, peak_gain: f64 },
    /// `side x side` uniform planar array, half-wavelength spacing.
    PlanarArray { side: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaPattern {
    kind: PatternKind,
    peak_gain: f64,
    hpbw: f64,
    // cos(beamwidth / 2), only meaningful for sectors
    cos_half_beam: f64,
}

impl AntennaPattern {
    pub fn ideal_sector(beamwidth: f64, peak_gain: f64) -> Result<Self> {
        if !(beamwidth > 0.0 && beamwidth <= 2.0 * PI) {
            return Err(Error::invalid("beamwidth", format!("{beamwidth} rad is outside (0, 2*pi]")));
        }
        if !(peak_gain > 0.0 && peak_gain.is_finite()) {
            return Err(Error::invalid("peak_gain", format!("{peak_gain} must be positive")));
        }
        Ok(Self {
            kind: PatternKind::IdealSector { beamwidth, peak_gain },
            peak_gain,
            hpbw: beamwidth,
            cos_half_beam: (beamwidth / 2.0).cos(),
        })
    }

    pub fn planar_array(side: u32) -> Result<Self> {
        if side == 0 || side > 64 {
            return Err(Error::invalid("array_side", format!("{side} elements per side is outside 1..=64")));
        }
        let peak_gain = array_directivity(side);
        Ok(Self {
            kind: PatternKind::PlanarArray { side },
            peak_gain,
            hpbw: array_hpbw(side),
            cos_half_beam: 0.0,
        })
    }

    /// Ideal sector whose peak gain matches the array with the same nominal beamwidth.
    pub fn matched_sector(beamwidth: f64) -> Result<Self> {
        let array = Self::planar_array(array_side_for_beamwidth(beamwidth)?)?;
        Self::ideal_sector(beamwidth, array.peak_gain)
    }

    pub fn kind(&self) -> PatternKind {
        self.kind
    }

    pub fn peak_gain(&self) -> f64 {
        self.peak_gain
    }

    /// Half-power beamwidth in radians (computed for arrays).
    pub fn hpbw(&self) -> f64 {
        self.hpbw
    }

    /// The beamwidth label of the pattern: the sector width, or the nominal
    /// width of the array size.
    pub fn nominal_beamwidth(&self) -> f64 {
        match self.kind {
            PatternKind::IdealSector { beamwidth, .. } => beamwidth,
            PatternKind::PlanarArray { side } => (ARRAY_BEAMWIDTH_SCALE_DEG / side as f64).to_radians(),
        }
    }

    /// Gain at boresight-relative angle `psi` (radians, any real).
    pub fn gain(&self, psi: f64) -> f64 {
        let psi = wrap_angle(psi.abs()).abs();
        match self.kind {
            PatternKind::IdealSector { beamwidth, peak_gain } => {
                if psi <= beamwidth / 2.0 {
                    peak_gain
                } else {
                    0.0
                }
            }
            PatternKind::PlanarArray { side } => {
                if psi > FRAC_PI_2 {
                    0.0
                } else {
                    self.peak_gain * array_factor_power(side, psi.sin())
                }
            }
        }
    }

    /// Gain given the cosine and sine of the boresight-relative angle.
    ///
    /// This is the hot path of the simulator: it avoids `atan2` entirely.
    #[inline]
    pub fn gain_cos_sin(&self, cos_psi: f64, sin_psi: f64) -> f64 {
        match self.kind {
            PatternKind::IdealSector { peak_gain, .. } => {
                if cos_psi >= self.cos_half_beam {
                    peak_gain
                } else {
                    0.0
                }
            }
            PatternKind::PlanarArray { side } => {
                if cos_psi < 0.0 {
                    0.0
                } else {
                    self.peak_gain * array_factor_power(side, sin_psi.abs())
                }
            }
        }
    }

    /// Full 3-D gain of an array pattern; boresight along azimuth 0, elevation 0.
    /// `None` for sectors, which are defined in the azimuth plane only.
    pub fn gain_3d(&self, azimuth: f64, elevation: f64) -> Option<f64> {
        match self.kind {
            PatternKind::IdealSector { .. } => None,
            PatternKind::PlanarArray { side } => {
                let (sin_el, cos_el) = elevation.sin_cos();
                let (sin_az, cos_az) = azimuth.sin_cos();
                if cos_el * cos_az < 0.0 {
                    return Some(0.0);
                }
                let u = (cos_el * sin_az).abs();
                let v = sin_el.abs();
                Some(self.peak_gain * array_factor_power(side, u) * array_factor_power(side, v))
            }
        }
    }

    /// Highest sidelobe in the azimuth cut relative to the peak (linear, < 1).
    /// `None` when no sidelobe lies in the visible front half-plane.
    pub fn max_sidelobe_ratio(&self) -> Option<f64> {
        let PatternKind::PlanarArray { side } = self.kind else {
            return None;
        };
        let first_null = (2.0 / side as f64).asin();
        if side < 3 || first_null.is_nan() {
            return None;
        }
        let steps = 20_000;
        let span = FRAC_PI_2 - first_null;
        (0..=steps)
            .map(|i| array_factor_power(side, (first_null + span * i as f64 / steps as f64).sin()))
            .reduce(f64::max)
    }
}

/// Map an angle to (-pi, pi].
pub fn wrap_angle(psi: f64) -> f64 {
    let w = psi.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Array size whose nominal beamwidth is closest to `beamwidth` (radians).
pub fn array_side_for_beamwidth(beamwidth: f64) -> Result<u32> {
    let deg = beamwidth.to_degrees();
    if !(deg > 0.0 && deg.is_finite()) {
        return Err(Error::invalid("beamwidth", format!("{deg} deg must be positive")));
    }
    let side = (ARRAY_BEAMWIDTH_SCALE_DEG / deg).round().max(1.0);
    Ok(side as u32)
}

/// Normalized power of a half-wavelength uniform linear array factor,
/// `u` the direction cosine along the array axis. Equals 1 at `u = 0`.
#[inline]
fn array_factor_power(side: u32, u: f64) -> f64 {
    let x = FRAC_PI_2 * u;
    let s = x.sin();
    if s == 0.0 {
        return 1.0;
    }
    let r = (side as f64 * x).sin() / (side as f64 * s);
    r * r
}

/// Peak directivity of the baffled `side x side` array.
///
/// The pattern depends only on the direction cosines across the aperture, so
/// the front hemisphere holds exactly half of the full-sphere integral, which
/// for isotropic elements is a double sum of `sinc(k * spacing)` terms.
fn array_directivity(side: u32) -> f64 {
    let n = side as i64;
    let mut sum = 0.0;
    for dm in -(n - 1)..=(n - 1) {
        for dn in -(n - 1)..=(n - 1) {
            let pairs = ((n - dm.abs()) * (n - dn.abs())) as f64;
            let rho = ((dm * dm + dn * dn) as f64).sqrt();
            let sinc = if rho == 0.0 { 1.0 } else { (PI * rho).sin() / (PI * rho) };
            sum += pairs * sinc;
        }
    }
    2.0 * (n as f64).powi(4) / sum
}

fn array_hpbw(side: u32) -> f64 {
    if side == 1 {
        return PI;
    }
    let mut lo = 0.0;
    let mut hi = (2.0 / side as f64).min(1.0).asin();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if array_factor_power(side, mid.sin()) > 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::linear_to_db;
    use proptest::prelude::*;

    fn sector30() -> AntennaPattern {
        AntennaPattern::ideal_sector(30f64.to_radians(), 44.67).unwrap()
    }

    #[test]
    fn sector_boundary() {
        let p = sector30();
        assert_eq!(p.gain(0.0), 44.67);
        assert_eq!(p.gain(20f64.to_radians()), 0.0);
        assert_eq!(p.gain(14.9f64.to_radians()), 44.67);
        assert_eq!(p.gain(2.0 * PI), 44.67);
    }

    #[test]
    fn array_peak_gains_match_reference_antennas() {
        let big = AntennaPattern::planar_array(4).unwrap();
        let small = AntennaPattern::planar_array(2).unwrap();
        assert!((linear_to_db(big.peak_gain()) - 16.5).abs() <= 1.5);
        assert!((linear_to_db(small.peak_gain()) - 10.1).abs() <= 1.5);
        assert_eq!(big.gain(0.0), big.peak_gain());
    }

    #[test]
    fn array_beamwidths_and_sidelobe() {
        let big = AntennaPattern::planar_array(4).unwrap();
        let small = AntennaPattern::planar_array(2).unwrap();
        assert!((big.hpbw().to_degrees() - 30.0).abs() <= 5.0, "{}", big.hpbw().to_degrees());
        assert!((small.hpbw().to_degrees() - 60.0).abs() <= 1e-6);
        let sll = linear_to_db(big.max_sidelobe_ratio().unwrap());
        assert!((sll + 11.3).abs() < 0.1, "{sll}");
        assert_eq!(small.max_sidelobe_ratio(), None);
    }

    #[test]
    fn backplane_is_exactly_dark() {
        let p = AntennaPattern::planar_array(4).unwrap();
        for deg in [90.001, 120.0, 180.0, -95.0, 250.0] {
            assert_eq!(p.gain(f64::to_radians(deg)), 0.0);
        }
        assert!(p.gain(FRAC_PI_2 - 1e-9) > 0.0);
    }

    #[test]
    fn beamwidth_maps_to_array_size() {
        assert_eq!(array_side_for_beamwidth(30f64.to_radians()).unwrap(), 4);
        assert_eq!(array_side_for_beamwidth(60f64.to_radians()).unwrap(), 2);
        assert!(array_side_for_beamwidth(0.0).is_err());
        let s = AntennaPattern::matched_sector(30f64.to_radians()).unwrap();
        assert_eq!(s.peak_gain(), AntennaPattern::planar_array(4).unwrap().peak_gain());
    }

    // Midpoint rule in spherical coordinates about the boresight axis; an
    // independent route from the closed-form sinc sum.
    fn sphere_integral(p: &AntennaPattern) -> f64 {
        let (nt, np) = (1200, 1200);
        let dt = PI / nt as f64;
        let dp = 2.0 * PI / np as f64;
        let mut total = 0.0;
        for i in 0..nt {
            let theta = (i as f64 + 0.5) * dt;
            for j in 0..np {
                let phi = (j as f64 + 0.5) * dp;
                // unit vector: x along boresight
                let x = theta.cos();
                let y = theta.sin() * phi.cos();
                let z = theta.sin() * phi.sin();
                let el = z.asin();
                let az = y.atan2(x);
                total += p.gain_3d(az, el).unwrap() * theta.sin() * dt * dp;
            }
        }
        total
    }

    #[test]
    fn directivity_normalization_integrates_to_four_pi() {
        for side in [2, 4] {
            let p = AntennaPattern::planar_array(side).unwrap();
            let integral = sphere_integral(&p);
            let rel = (integral / (4.0 * PI) - 1.0).abs();
            assert!(rel < 0.02, "side {side}: {integral}");
        }
    }

    proptest! {
        #[test]
        fn patterns_are_symmetric(psi in -10.0f64..10.0, side in 1u32..6) {
            let a = AntennaPattern::planar_array(side).unwrap();
            prop_assert_eq!(a.gain(psi), a.gain(-psi));
            let s = sector30();
            // exact boundary values can round differently after wrapping
            let w = wrap_angle(psi).abs();
            if (w - 15f64.to_radians()).abs() > 1e-12 {
                prop_assert_eq!(s.gain(psi), s.gain(-psi));
            }
            prop_assert!(a.gain(psi) >= 0.0);
        }

        #[test]
        fn cos_sin_path_agrees_with_angle_path(psi in -3.1f64..3.1) {
            let a = AntennaPattern::planar_array(4).unwrap();
            let (s, c) = psi.sin_cos();
            let g1 = a.gain(psi);
            let g2 = a.gain_cos_sin(c, s);
            prop_assert!((g1 - g2).abs() <= 1e-12 * a.peak_gain());
        }
    }
}
