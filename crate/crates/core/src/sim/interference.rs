//! Directional interference between nodes of a realization.

use serde::{Deserialize, Serialize};

use super::geometry::TorusPoint;
use super::realization::{Realization, Role};
use crate::antenna::AntennaPattern;
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::link::path_gain;

/// Radio parameters shared by every transmitter in the network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Radio {
    pub tx_power: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub radar_pattern: AntennaPattern,
    pub comm_pattern: AntennaPattern,
}

impl Radio {
    pub fn from_config(config: &ScenarioConfig) -> Result<Self> {
        Ok(Self {
            tx_power: config.tx_power,
            kappa: config.kappa()?,
            alpha: config.alpha,
            radar_pattern: config.radar_pattern,
            comm_pattern: config.comm_pattern,
        })
    }

    fn pattern(&self, role: &Role) -> &AntennaPattern {
        match role {
            Role::Radar => &self.radar_pattern,
            Role::CommTransmitter { .. } => &self.comm_pattern,
        }
    }
}

/// A listening antenna: a radar, or the dedicated receiver of a link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Receiver {
    pub position: TorusPoint,
    pub boresight: f64,
    pub pattern: AntennaPattern,
}

impl Receiver {
    /// The radar at `node` listening with its own antenna.
    pub fn radar(realization: &Realization, radio: &Radio, node: usize) -> Self {
        let n = &realization.nodes[node];
        Self {
            position: n.position,
            boresight: n.boresight,
            pattern: radio.radar_pattern,
        }
    }

    /// The receiver paired with communication transmitter `node`.
    pub fn link(realization: &Realization, radio: &Radio, node: usize) -> Option<Self> {
        match realization.nodes[node].role {
            Role::CommTransmitter { receiver, receiver_boresight } => Some(Self {
                position: receiver,
                boresight: receiver_boresight,
                pattern: radio.comm_pattern,
            }),
            Role::Radar => None,
        }
    }
}

/// Power received at `rx` from node `tx` whenever `tx` transmits.
pub fn coupling(realization: &Realization, radio: &Radio, tx: usize, rx: &Receiver) -> Result<f64> {
    let node = &realization.nodes[tx];
    let (dx, dy) = realization.torus.displacement(node.position, rx.position);
    let d = dx.hypot(dy);
    if !(d > 0.0) {
        return Err(Error::SingularGeometry(format!("node {tx} is co-located with the receiver")));
    }
    let (ux, uy) = (dx / d, dy / d);
    let (sb, cb) = node.boresight.sin_cos();
    let g_tx = radio.pattern(&node.role).gain_cos_sin(ux * cb + uy * sb, uy * cb - ux * sb);
    if g_tx == 0.0 {
        return Ok(0.0);
    }
    // direction from the receiver back to the transmitter is -u
    let (sr, cr) = rx.boresight.sin_cos();
    let g_rx = rx.pattern.gain_cos_sin(-ux * cr - uy * sr, -uy * cr + ux * sr);
    Ok(radio.tx_power * g_tx * g_rx * radio.kappa * path_gain(d, radio.alpha))
}

/// Coupling from every node to `rx`; `exclude` gets 0 and is never evaluated.
pub fn coupling_row(realization: &Realization, radio: &Radio, rx: &Receiver, exclude: Option<usize>) -> Result<Vec<f64>> {
    (0..realization.nodes.len())
        .map(|tx| {
            if Some(tx) == exclude {
                Ok(0.0)
            } else {
                coupling(realization, radio, tx, rx)
            }
        })
        .collect()
}

/// Aggregate interference at `rx` over `slot` from all active, non-excluded nodes.
pub fn slot_interference_at(
    realization: &Realization,
    radio: &Radio,
    rx: &Receiver,
    slot: u32,
    exclude: &[usize],
) -> Result<f64> {
    let mut total = 0.0;
    for tx in 0..realization.nodes.len() {
        if realization.is_active(tx, slot) && !exclude.contains(&tx) {
            total += coupling(realization, radio, tx, rx)?;
        }
    }
    Ok(total)
}

/// Per-slot interference at one receiver over the whole horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotTrace {
    /// Sum over all active nodes.
    pub aggregate: Vec<f64>,
    /// Largest single active term.
    pub strongest: Vec<f64>,
}

/// Accumulates a coupling row over every node's transmissions, node by node
/// in ascending index, so each slot sum matches [`slot_interference_at`].
pub fn slot_trace(realization: &Realization, row: &[f64]) -> SlotTrace {
    let n = realization.n_slots as usize;
    let mut aggregate = vec![0.0; n];
    let mut strongest = vec![0.0f64; n];
    for (node, &power) in row.iter().enumerate() {
        if power == 0.0 {
            continue;
        }
        for_each_busy_slot(realization, node, |slot| {
            aggregate[slot] += power;
            strongest[slot] = strongest[slot].max(power);
        });
    }
    SlotTrace { aggregate, strongest }
}

/// Visits every slot inside the horizon in which `node` transmits, in order.
pub fn for_each_busy_slot(realization: &Realization, node: usize, mut visit: impl FnMut(usize)) {
    let n_slots = realization.n_slots as i64;
    if realization.nodes[node].is_radar() {
        let m = realization.pri_slots as usize;
        for slot in (realization.nodes[node].mark as usize..n_slots as usize).step_by(m) {
            visit(slot);
        }
    } else {
        for (start, end) in realization.packets(node) {
            for slot in start.max(0)..=end.min(n_slots - 1) {
                visit(slot as usize);
            }
        }
    }
}
