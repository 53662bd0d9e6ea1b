use serde::{Deserialize, Serialize};

use crate::config::CalibrationScope;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    /// Detection threshold, W. Zero when no PRI ever saw interference.
    pub theta: f64,
    /// Fraction of PRIs whose maximum exceeds `theta`.
    pub achieved_pfa: f64,
    pub n_pri_samples: usize,
    pub scope: CalibrationScope,
}

impl CalibrationResult {
    /// True when the threshold collapsed to zero.
    pub fn is_degenerate(&self) -> bool {
        self.theta <= 0.0
    }
}

/// Minimum number of PRI maxima needed to calibrate to `pfa`.
pub fn required_samples(pfa: f64) -> usize {
    (100.0 / pfa).ceil() as usize
}

/// Fraction of samples strictly above `theta`.
pub fn false_alarm_rate(samples: &[f64], theta: f64) -> f64 {
    samples.iter().filter(|&&x| x > theta).count() as f64 / samples.len() as f64
}

/// The smallest sample value whose exceedance rate is at most `pfa`.
pub fn calibrate_threshold(samples: &[f64], pfa: f64, scope: CalibrationScope) -> Result<CalibrationResult> {
    if !(pfa > 0.0 && pfa < 1.0) {
        return Err(Error::invalid("pfa_target", format!("{pfa} is outside (0, 1)")));
    }
    let required = required_samples(pfa);
    if samples.len() < required {
        return Err(Error::InsufficientSamples {
            required,
            available: samples.len(),
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let allowed = (n as f64 * pfa).floor() as usize;
    let theta = sorted[n - allowed - 1];
    Ok(CalibrationResult {
        theta,
        achieved_pfa: false_alarm_rate(samples, theta),
        n_pri_samples: n,
        scope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn step_distribution() {
        let p = 3.5e-9;
        let samples = vec![p; 2000];
        let c = calibrate_threshold(&samples, 0.1, CalibrationScope::Pooled).unwrap();
        assert_eq!(c.theta, p);
        assert_eq!(c.achieved_pfa, 0.0);
        assert_eq!(false_alarm_rate(&samples, p * (1.0 - 1e-12)), 1.0);
    }

    #[test]
    fn too_few_samples() {
        let err = calibrate_threshold(&[1.0; 999], 0.1, CalibrationScope::Pooled).unwrap_err();
        assert!(matches!(err, Error::InsufficientSamples { required: 1000, available: 999 }));
    }

    fn bisection(samples: &[f64], pfa: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, samples.iter().copied().fold(0.0, f64::max));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if false_alarm_rate(samples, mid) <= pfa {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    #[test]
    fn quantile_matches_bisection_and_binomial_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let samples: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>().powi(3) * 1e-8).collect();
        let pfa = 0.1;
        let c = calibrate_threshold(&samples, pfa, CalibrationScope::Pooled).unwrap();
        let b = bisection(&samples, pfa);
        // bisection converges onto the same order statistic from above
        assert!(b >= c.theta && b <= c.theta * (1.0 + 1e-12), "{b} vs {}", c.theta);
        let se = (pfa * (1.0 - pfa) / samples.len() as f64).sqrt();
        assert!((c.achieved_pfa - pfa).abs() <= 2.0 * se);
    }

    proptest! {
        #[test]
        fn rate_is_monotone(samples in prop::collection::vec(0.0f64..1.0, 1..200), a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(false_alarm_rate(&samples, hi) <= false_alarm_rate(&samples, lo));
        }

        #[test]
        fn achieved_never_exceeds_target(samples in prop::collection::vec(0.0f64..1.0, 2000..4000), pfa in 0.05f64..0.5) {
            let c = calibrate_threshold(&samples, pfa, CalibrationScope::Pooled).unwrap();
            prop_assert!(c.achieved_pfa <= pfa);
        }
    }
}
