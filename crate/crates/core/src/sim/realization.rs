use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::geometry::{Torus, TorusPoint};
use super::rng::{stream, Stream};
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Role {
    Radar,
    /// A transmitter together with its dedicated (never transmitting) receiver.
    CommTransmitter {
        receiver: TorusPoint,
        receiver_boresight: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub position: TorusPoint,
    pub role: Role,
    /// Slot offset in `0..M`.
    pub mark: u32,
    /// Antenna pointing direction, radians in `[0, 2 pi)`.
    pub boresight: f64,
}

impl Node {
    pub fn is_radar(&self) -> bool {
        matches!(self.role, Role::Radar)
    }
}

/// When a node transmits over the horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Schedule {
    /// Pulses at `mark + n M`.
    Radar { mark: u32 },
    /// Decision epochs at `first_epoch + k L`; `transmits[k]` is the coin for
    /// epoch `k`. `first_epoch` may be negative: that packet is already in
    /// flight at slot 0.
    Comm { first_epoch: i64, transmits: Vec<bool> },
}

/// Decision epochs `t >= 0`, `t = nu (mod L)`, below `horizon`.
pub fn comm_epochs(nu: u32, packet_slots: u32, horizon: u32) -> Vec<u32> {
    let l = packet_slots.max(1);
    (nu % l..horizon).step_by(l as usize).collect()
}

/// One sampled network: positions, roles, marks, boresights and schedules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub torus: Torus,
    pub nodes: Vec<Node>,
    pub schedules: Vec<Schedule>,
    pub n_slots: u32,
    pub pri_slots: u32,
    pub packet_slots: u32,
    pub seed: u64,
}

/// Side of the simulated square for a scenario.
pub fn area_side(config: &ScenarioConfig) -> f64 {
    let by_count = (config.sim.target_node_count as f64 / config.lambda).sqrt();
    by_count.max(config.sim.min_side_factor * config.d_c)
}

pub fn sample_realization(config: &ScenarioConfig, seed: u64) -> Result<Realization> {
    config.validate()?;
    let torus = Torus::new(area_side(config))?;
    let expected = config.lambda * torus.area();
    if expected < 50.0 {
        return Err(Error::Configuration(format!(
            "expected node count {expected:.1} is below 50; raise target_node_count or lambda"
        )));
    }
    let poisson = Poisson::new(expected).map_err(|e| Error::Configuration(format!("node count law: {e}")))?;
    let count = poisson.sample(&mut stream(seed, Stream::Count)) as usize;

    let mut positions = stream(seed, Stream::Positions);
    let mut roles = stream(seed, Stream::Roles);
    let mut marks = stream(seed, Stream::Marks);
    let mut angles = stream(seed, Stream::Angles);

    let mut nodes = Vec::with_capacity(count);
    for _ in 0..count {
        let position = TorusPoint {
            x: positions.random(),
            y: positions.random(),
        };
        let is_comm = roles.random::<f64>() < config.beta;
        let mark = marks.random_range(0..config.pri_slots);
        let angle = angles.random::<f64>() * TAU;
        let node = if is_comm {
            let receiver = torus.offset(position, config.d_c * angle.cos(), config.d_c * angle.sin());
            let (dx, dy) = torus.displacement(position, receiver);
            Node {
                position,
                role: Role::CommTransmitter {
                    receiver,
                    receiver_boresight: (-dy).atan2(-dx).rem_euclid(TAU),
                },
                mark,
                boresight: dy.atan2(dx).rem_euclid(TAU),
            }
        } else {
            Node {
                position,
                role: Role::Radar,
                mark,
                boresight: angle,
            }
        };
        nodes.push(node);
    }

    let mut coins = stream(seed, Stream::Coins);
    let schedules = build_schedules(&nodes, config.sim.n_slots, config.packet_slots, config.persistency, &mut coins);
    Ok(Realization {
        torus,
        nodes,
        schedules,
        n_slots: config.sim.n_slots,
        pri_slots: config.pri_slots,
        packet_slots: config.packet_slots,
        seed,
    })
}

/// Radar schedules follow the marks; communication nodes flip one coin per
/// decision epoch, node by node in index order.
pub fn build_schedules(nodes: &[Node], n_slots: u32, packet_slots: u32, persistency: f64, coins: &mut impl Rng) -> Vec<Schedule> {
    let l = packet_slots as i64;
    nodes
        .iter()
        .map(|node| match node.role {
            Role::Radar => Schedule::Radar { mark: node.mark },
            Role::CommTransmitter { .. } => {
                let phase = node.mark as i64 % l;
                let first_epoch = if phase > 0 { phase - l } else { 0 };
                let epochs = (n_slots as i64 - 1 - first_epoch) / l + 1;
                let transmits = (0..epochs).map(|_| coins.random::<f64>() < persistency).collect();
                Schedule::Comm { first_epoch, transmits }
            }
        })
        .collect()
}

impl Realization {
    pub fn area_side(&self) -> f64 {
        self.torus.side()
    }

    #[inline]
    pub fn is_active(&self, node: usize, slot: u32) -> bool {
        match &self.schedules[node] {
            Schedule::Radar { mark } => slot >= *mark && (slot - mark) % self.pri_slots == 0,
            Schedule::Comm { first_epoch, transmits } => {
                let k = (slot as i64 - first_epoch) / self.packet_slots as i64;
                transmits.get(k as usize).copied().unwrap_or(false)
            }
        }
    }

    pub fn radar_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().enumerate().filter(|(_, n)| n.is_radar()).map(|(i, _)| i)
    }

    pub fn comm_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().enumerate().filter(|(_, n)| !n.is_radar()).map(|(i, _)| i)
    }

    /// Inclusive `(start, end)` packets of a communication node that reach slot
    /// 0; the first may start before 0 and the last may run past the horizon.
    pub fn packets(&self, node: usize) -> Vec<(i64, i64)> {
        match &self.schedules[node] {
            Schedule::Radar { .. } => Vec::new(),
            Schedule::Comm { first_epoch, transmits } => {
                let l = self.packet_slots as i64;
                transmits
                    .iter()
                    .enumerate()
                    .filter(|(_, &tx)| tx)
                    .map(|(k, _)| {
                        let start = first_epoch + k as i64 * l;
                        (start, start + l - 1)
                    })
                    .filter(|&(_, end)| end >= 0)
                    .collect()
            }
        }
    }

    /// The same network shifted by a grid offset.
    pub fn translated(&self, by: TorusPoint) -> Realization {
        let mut out = self.clone();
        for node in &mut out.nodes {
            node.position = node.position.translated(by);
            if let Role::CommTransmitter { receiver, .. } = &mut node.role {
                *receiver = receiver.translated(by);
            }
        }
        out
    }
}
