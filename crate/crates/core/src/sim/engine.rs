//! Monte Carlo driver: runs realizations in parallel and aggregates metrics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::calibration::{calibrate_threshold, required_samples, CalibrationResult};
use super::comm::score_packets;
use super::interference::Radio;
use super::radar::{radar_pri_max_traces, SlotSample};
use super::realization::{sample_realization, Realization};
use super::rng::realization_seed;
use crate::config::{CalibrationScope, ScenarioConfig};
use crate::error::Result;
use crate::link::{comm_signal_power, decoding_threshold, detectable_range_from_threshold};
use crate::stats::{mean, sample_sd, t_half_width, Estimate};

/// Which quantities a run collects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Measure {
    pub radar: bool,
    pub comm: bool,
    /// Keep every listening-slot sample (large).
    pub slot_samples: bool,
}

impl Measure {
    pub const ALL: Measure = Measure { radar: true, comm: true, slot_samples: false };
    pub const RADAR: Measure = Measure { radar: true, comm: false, slot_samples: false };
    pub const COMM: Measure = Measure { radar: false, comm: true, slot_samples: false };
}

impl Default for Measure {
    fn default() -> Self {
        Self::ALL
    }
}

/// Raw output of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationOutcome {
    pub seed: u64,
    pub n_nodes: usize,
    pub n_radars: usize,
    pub n_comm: usize,
    pub pri_maxima: Vec<f64>,
    pub slot_samples: Vec<SlotSample>,
    pub packets_scored: u64,
    pub packets_succeeded: u64,
    /// Mean fraction of radars transmitting per slot.
    pub radar_activity: Option<f64>,
    /// Fraction of communication node-slots spent transmitting.
    pub comm_occupancy: Option<f64>,
}

/// Per-realization seeds derived from the master seed.
pub fn realization_seeds(master_seed: u64, n: u32) -> Vec<u64> {
    (0..n).map(|i| realization_seed(master_seed, i)).collect()
}

pub fn simulate_realization(config: &ScenarioConfig, seed: u64, measure: Measure) -> Result<RealizationOutcome> {
    let realization = sample_realization(config, seed)?;
    let radio = Radio::from_config(config)?;
    let mut out = RealizationOutcome {
        seed,
        n_nodes: realization.nodes.len(),
        n_radars: realization.radar_indices().count(),
        n_comm: realization.comm_indices().count(),
        pri_maxima: Vec::new(),
        slot_samples: Vec::new(),
        packets_scored: 0,
        packets_succeeded: 0,
        radar_activity: radar_activity(&realization),
        comm_occupancy: comm_occupancy(&realization),
    };
    if measure.radar || measure.slot_samples {
        let traces = radar_pri_max_traces(
            &realization,
            &radio,
            config.sim.max_tagged_radars as usize,
            measure.slot_samples,
        )?;
        out.pri_maxima = traces.pri_maxima;
        out.slot_samples = traces.slot_samples;
    }
    if measure.comm {
        let signal = comm_signal_power(config.tx_power, config.comm_pattern.peak_gain(), radio.kappa, config.d_c, config.alpha)?;
        let gamma = decoding_threshold(config.rate)?;
        let packets = score_packets(
            &realization,
            &radio,
            config.sim.max_tagged_links as usize,
            signal,
            gamma,
            config.sim.sir_cap,
        )?;
        out.packets_scored = packets.len() as u64;
        out.packets_succeeded = packets.iter().filter(|p| p.success).count() as u64;
    }
    Ok(out)
}

fn radar_activity(r: &Realization) -> Option<f64> {
    let radars: Vec<usize> = r.radar_indices().collect();
    if radars.is_empty() {
        return None;
    }
    let pulses: u64 = radars
        .iter()
        .map(|&i| {
            let mark = r.nodes[i].mark;
            if mark >= r.n_slots {
                0
            } else {
                ((r.n_slots - mark - 1) / r.pri_slots + 1) as u64
            }
        })
        .sum();
    Some(pulses as f64 / (radars.len() as f64 * r.n_slots as f64))
}

fn comm_occupancy(r: &Realization) -> Option<f64> {
    let comm: Vec<usize> = r.comm_indices().collect();
    if comm.is_empty() {
        return None;
    }
    let horizon = r.n_slots as i64;
    let busy: i64 = comm
        .iter()
        .flat_map(|&i| r.packets(i))
        .map(|(s, e)| e.min(horizon - 1) - s.max(0) + 1)
        .filter(|&n| n > 0)
        .sum();
    Some(busy as f64 / (comm.len() as f64 * r.n_slots as f64))
}

/// Runs the given seeds in parallel; results come back in seed order.
pub fn run_realizations(config: &ScenarioConfig, seeds: &[u64], measure: Measure) -> Result<Vec<RealizationOutcome>> {
    config.validate()?;
    seeds
        .par_iter()
        .map(|&seed| simulate_realization(config, seed, measure))
        .collect()
}

/// Mean with its standard error across realizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
}

impl MeanSe {
    fn of(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        Some(Self {
            mean: mean(xs),
            se: sample_sd(xs) / (xs.len() as f64).sqrt(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarMetrics {
    /// Threshold fitted to the pooled PRI maxima.
    pub calibration: CalibrationResult,
    /// `None` when the network is too sparse for any interference.
    pub d_m: Option<Estimate>,
    /// Range from each realization's own threshold, where one exists.
    pub per_realization_d_m: Vec<Option<f64>>,
    pub sparse: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommMetrics {
    /// `None` when no packet fit inside the horizon.
    pub p_s: Option<Estimate>,
    pub tau: Option<Estimate>,
    pub per_realization_p_s: Vec<Option<f64>>,
    pub packets_scored: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DutyMetrics {
    pub radar_activity: Option<MeanSe>,
    pub comm_occupancy: Option<MeanSe>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimMetrics {
    pub master_seed: u64,
    pub seeds: Vec<u64>,
    /// `None` without radars or when not measured.
    pub radar: Option<RadarMetrics>,
    /// `None` without communication nodes or when not measured.
    pub comm: Option<CommMetrics>,
    pub duty: DutyMetrics,
}

fn range_for(config: &ScenarioConfig, theta: f64) -> Result<f64> {
    detectable_range_from_threshold(
        theta,
        config.tx_power,
        config.radar_pattern.peak_gain(),
        config.kappa()?,
        config.sigma,
        config.g_p,
        config.alpha,
    )
}

/// Calibrates and converts PRI maxima into detectable ranges.
pub fn radar_metrics(config: &ScenarioConfig, outcomes: &[RealizationOutcome]) -> Result<Option<RadarMetrics>> {
    if outcomes.iter().all(|o| o.n_radars == 0) {
        return Ok(None);
    }
    let pooled: Vec<f64> = outcomes.iter().flat_map(|o| o.pri_maxima.iter().copied()).collect();
    let calibration = calibrate_threshold(&pooled, config.pfa_target, config.sim.calibration)?;
    let per_realization_d_m = per_realization_ranges(config, outcomes)?;
    let available: Vec<f64> = per_realization_d_m.iter().flatten().copied().collect();
    let sparse = calibration.is_degenerate();
    let d_m = if sparse {
        None
    } else {
        let half_width = t_half_width(sample_sd(&available), available.len());
        let mean = match config.sim.calibration {
            CalibrationScope::Pooled => range_for(config, calibration.theta)?,
            CalibrationScope::PerRealization => mean(&available),
        };
        Some(Estimate { mean, half_width })
    };
    Ok(Some(RadarMetrics {
        calibration,
        d_m,
        per_realization_d_m,
        sparse,
    }))
}

fn per_realization_ranges(config: &ScenarioConfig, outcomes: &[RealizationOutcome]) -> Result<Vec<Option<f64>>> {
    let required = required_samples(config.pfa_target);
    outcomes
        .iter()
        .map(|o| {
            if o.pri_maxima.len() < required {
                return Ok(None);
            }
            let c = calibrate_threshold(&o.pri_maxima, config.pfa_target, CalibrationScope::PerRealization)?;
            if c.is_degenerate() {
                Ok(None)
            } else {
                range_for(config, c.theta).map(Some)
            }
        })
        .collect()
}

/// Packet success probability and throughput density.
pub fn comm_metrics(config: &ScenarioConfig, outcomes: &[RealizationOutcome]) -> Result<Option<CommMetrics>> {
    if config.beta == 0.0 || outcomes.iter().all(|o| o.n_comm == 0) {
        return Ok(None);
    }
    let per_realization_p_s: Vec<Option<f64>> = outcomes
        .iter()
        .map(|o| (o.packets_scored > 0).then(|| o.packets_succeeded as f64 / o.packets_scored as f64))
        .collect();
    let scored: u64 = outcomes.iter().map(|o| o.packets_scored).sum();
    let succeeded: u64 = outcomes.iter().map(|o| o.packets_succeeded).sum();
    let available: Vec<f64> = per_realization_p_s.iter().flatten().copied().collect();
    let p_s = (scored > 0).then(|| Estimate {
        mean: succeeded as f64 / scored as f64,
        half_width: t_half_width(sample_sd(&available), available.len()),
    });
    let scale = config.lambda * config.beta * config.persistency * config.rate * config.bandwidth;
    let tau = p_s.map(|p| Estimate {
        mean: scale * p.mean,
        half_width: scale * p.half_width,
    });
    Ok(Some(CommMetrics {
        p_s,
        tau,
        per_realization_p_s,
        packets_scored: scored,
    }))
}

fn duty_metrics(outcomes: &[RealizationOutcome]) -> DutyMetrics {
    let radar: Vec<f64> = outcomes.iter().filter_map(|o| o.radar_activity).collect();
    let comm: Vec<f64> = outcomes.iter().filter_map(|o| o.comm_occupancy).collect();
    DutyMetrics {
        radar_activity: MeanSe::of(&radar),
        comm_occupancy: MeanSe::of(&comm),
    }
}

/// Aggregates outcomes in index order.
pub fn summarize(config: &ScenarioConfig, outcomes: &[RealizationOutcome], measure: Measure) -> Result<SimMetrics> {
    Ok(SimMetrics {
        master_seed: config.sim.master_seed,
        seeds: outcomes.iter().map(|o| o.seed).collect(),
        radar: if measure.radar { radar_metrics(config, outcomes)? } else { None },
        comm: if measure.comm { comm_metrics(config, outcomes)? } else { None },
        duty: duty_metrics(outcomes),
    })
}

/// Runs the configured number of realizations and aggregates everything.
pub fn run_monte_carlo(config: &ScenarioConfig) -> Result<SimMetrics> {
    run_measured(config, Measure::ALL)
}

pub fn run_measured(config: &ScenarioConfig, measure: Measure) -> Result<SimMetrics> {
    let seeds = realization_seeds(config.sim.master_seed, config.sim.n_realizations);
    let outcomes = run_realizations(config, &seeds, measure)?;
    summarize(config, &outcomes, measure)
}

/// Detectable range of each realization calibrated on its own.
pub fn simulate_radar_range(config: &ScenarioConfig, seeds: &[u64]) -> Result<Vec<Option<f64>>> {
    let outcomes = run_realizations(config, seeds, Measure::RADAR)?;
    per_realization_ranges(config, &outcomes)
}

/// Packet success probability and throughput density over the given seeds.
pub fn simulate_comm(config: &ScenarioConfig, seeds: &[u64]) -> Result<Option<CommMetrics>> {
    let outcomes = run_realizations(config, seeds, Measure::COMM)?;
    comm_metrics(config, &outcomes)
}
