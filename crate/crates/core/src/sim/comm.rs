use serde::{Deserialize, Serialize};

use super::interference::{coupling_row, slot_trace, Radio, Receiver};
use super::realization::Realization;
use crate::error::Result;

/// One scored packet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacketRecord {
    pub transmitter: usize,
    pub start: u32,
    /// Interference at the paired receiver in each of the packet's slots.
    pub interference: Vec<f64>,
    /// Slot-averaged, capped SIR.
    pub mean_sir: f64,
    pub success: bool,
}

/// Capped per-slot SIR; interference-free slots get the cap.
#[inline]
pub fn capped_sir(signal: f64, interference: f64, cap: f64) -> f64 {
    if interference > 0.0 {
        (signal / interference).min(cap)
    } else {
        cap
    }
}

/// Mean capped SIR over the slots of a packet.
pub fn packet_sir(signal: f64, interference: &[f64], cap: f64) -> f64 {
    interference.iter().map(|&i| capped_sir(signal, i, cap)).sum::<f64>() / interference.len() as f64
}

/// Scores every packet that lies entirely inside the horizon for the first
/// `max_links` links of a realization.
pub fn score_packets(
    realization: &Realization,
    radio: &Radio,
    max_links: usize,
    signal: f64,
    gamma: f64,
    sir_cap: f64,
) -> Result<Vec<PacketRecord>> {
    let horizon = realization.n_slots as i64;
    let mut out = Vec::new();
    for tx in realization.comm_indices().take(max_links) {
        let rx = Receiver::link(realization, radio, tx).expect("communication node has a receiver");
        let row = coupling_row(realization, radio, &rx, Some(tx))?;
        let trace = slot_trace(realization, &row);
        for (start, end) in realization.packets(tx) {
            if start < 0 || end >= horizon {
                continue;
            }
            let interference = trace.aggregate[start as usize..=end as usize].to_vec();
            let mean_sir = packet_sir(signal, &interference, sir_cap);
            out.push(PacketRecord {
                transmitter: tx,
                start: start as u32,
                interference,
                mean_sir,
                success: mean_sir > gamma,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_applies_to_quiet_slots() {
        assert_eq!(capped_sir(1.0, 0.0, 1e6), 1e6);
        assert_eq!(capped_sir(1.0, 1e-9, 1e6), 1e6);
        assert_eq!(capped_sir(1.0, 0.5, 1e6), 2.0);
        assert_eq!(packet_sir(1.0, &[0.5, 0.25], 1e6), 3.0);
    }
}
