use serde::{Deserialize, Serialize};

use super::interference::{coupling_row, slot_trace, Radio, Receiver};
use super::realization::Realization;
use crate::error::Result;

/// Interference in one listening slot: the total and the largest single term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotSample {
    pub aggregate: f64,
    pub strongest: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RadarTraces {
    /// Radar node indices that were traced.
    pub radars: Vec<usize>,
    /// Maximum interference over the listening slots of each complete PRI,
    /// radar by radar, PRI by PRI.
    pub pri_maxima: Vec<f64>,
    /// Every listening slot of every complete PRI, when requested.
    pub slot_samples: Vec<SlotSample>,
}

/// Number of PRIs of a radar with mark `nu` that fit inside the horizon.
pub fn complete_pris(nu: u32, pri_slots: u32, n_slots: u32) -> u32 {
    if n_slots < nu + pri_slots {
        0
    } else {
        (n_slots - nu) / pri_slots
    }
}

/// Per-PRI interference maxima for the first `max_radars` radars of a realization.
pub fn radar_pri_max_traces(
    realization: &Realization,
    radio: &Radio,
    max_radars: usize,
    record_slots: bool,
) -> Result<RadarTraces> {
    let m = realization.pri_slots;
    let mut out = RadarTraces::default();
    for radar in realization.radar_indices().take(max_radars) {
        let rx = Receiver::radar(realization, radio, radar);
        let row = coupling_row(realization, radio, &rx, Some(radar))?;
        let trace = slot_trace(realization, &row);
        let nu = realization.nodes[radar].mark;
        for k in 0..complete_pris(nu, m, realization.n_slots) {
            let pulse = (nu + k * m) as usize;
            let listening = pulse + 1..pulse + m as usize;
            let max = trace.aggregate[listening.clone()].iter().copied().fold(0.0, f64::max);
            out.pri_maxima.push(max);
            if record_slots {
                out.slot_samples.extend(listening.map(|s| SlotSample {
                    aggregate: trace.aggregate[s],
                    strongest: trace.strongest[s],
                }));
            }
        }
        out.radars.push(radar);
    }
    Ok(out)
}
