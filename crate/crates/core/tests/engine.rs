use std::f64::consts::PI;

use coexist_core::sim::comm::score_packets;
use coexist_core::sim::engine::{radar_metrics, RealizationOutcome};
use coexist_core::sim::interference::{coupling, Radio, Receiver};
use coexist_core::sim::realization::build_schedules;
use coexist_core::sim::*;
use coexist_core::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sectors(lambda: f64, beta: f64) -> ScenarioConfig {
    let bw = 30f64.to_radians();
    let mut c = ScenarioConfig::reference(lambda, beta).with_sectors(bw, bw).unwrap();
    c.sim = SimControls::desk();
    c
}

// Asymptotic Kolmogorov distribution tail.
fn kolmogorov_p(d: f64, n: usize) -> f64 {
    let t = d * (n as f64).sqrt();
    let mut p = 0.0;
    for k in 1..200 {
        let k = k as f64;
        let sign = if k as u64 % 2 == 1 { 1.0 } else { -1.0 };
        p += sign * 2.0 * (-2.0 * k * k * t * t).exp();
    }
    p.clamp(0.0, 1.0)
}

#[test]
fn nearest_aligned_interferer_follows_thinned_ppp() {
    let mut c = sectors(1e-3, 0.0);
    c.sim.target_node_count = 5000;
    let radio = Radio::from_config(&c).unwrap();
    let mut distances = Vec::new();
    for seed in realization_seeds(99, 80) {
        let r = sample_realization(&c, seed).unwrap();
        for radar in r.radar_indices().take(128) {
            let rx = Receiver::radar(&r, &radio, radar);
            let nearest = (0..r.nodes.len())
                .filter(|&j| j != radar && coupling(&r, &radio, j, &rx).unwrap() > 0.0)
                .map(|j| r.torus.distance(r.nodes[j].position, rx.position))
                .fold(f64::INFINITY, f64::min);
            distances.push(nearest);
        }
    }
    distances.sort_by(f64::total_cmp);
    let n = distances.len();
    assert!(n >= 10_000);
    let lambda_thinned = c.lambda * (30f64.to_radians() / (2.0 * PI)).powi(2);
    let cdf = |y: f64| 1.0 - (-lambda_thinned * PI * y * y).exp();
    let d = distances
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let f = cdf(y);
            (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
        })
        .fold(0.0, f64::max);
    let p = kolmogorov_p(d, n);
    assert!(p > 0.01, "KS statistic {d}, p = {p}");
}

#[test]
fn translation_leaves_every_trace_bit_identical() {
    let c = ScenarioConfig::reference(1e-3, 0.5);
    let radio = Radio::from_config(&c).unwrap();
    let r = sample_realization(&c, 17).unwrap();
    let shift = TorusPoint { x: 0x9e37_79b9_7f4a_7c15, y: 0x1234_5678_9abc_def0 };
    let moved = r.translated(shift);
    let a = radar_pri_max_traces(&r, &radio, 16, true).unwrap();
    let b = radar_pri_max_traces(&moved, &radio, 16, true).unwrap();
    assert_eq!(a, b);
    let pa = score_packets(&r, &radio, 16, 1e-9, 1.83, 1e6).unwrap();
    let pb = score_packets(&moved, &radio, 16, 1e-9, 1.83, 1e6).unwrap();
    assert_eq!(pa, pb);
}

fn hand_built(nodes: Vec<Node>, side: f64, persistency: f64) -> Realization {
    let torus = Torus::new(side).unwrap();
    let schedules = build_schedules(&nodes, 600, 30, persistency, &mut ChaCha8Rng::seed_from_u64(3));
    Realization { torus, nodes, schedules, n_slots: 600, pri_slots: 60, packet_slots: 30, seed: 0 }
}

fn comm_node(torus: &Torus, x: f64, to_x: f64) -> Node {
    let boresight = if to_x > x { 0.0 } else { PI };
    Node {
        position: torus.point(x, 0.0),
        role: Role::CommTransmitter {
            receiver: torus.point(to_x, 0.0),
            receiver_boresight: if to_x > x { PI } else { 0.0 },
        },
        mark: 0,
        boresight,
    }
}

#[test]
fn isolated_pair_always_succeeds() {
    let c = ScenarioConfig::reference(1e-3, 1.0);
    let radio = Radio::from_config(&c).unwrap();
    let torus = Torus::new(1000.0).unwrap();
    let r = hand_built(vec![comm_node(&torus, 0.0, 55.0)], 1000.0, 0.5);
    let signal = link::comm_signal_power(radio.tx_power, c.comm_pattern.peak_gain(), radio.kappa, 55.0, 2.0).unwrap();
    let packets = score_packets(&r, &radio, 128, signal, link::decoding_threshold(1.5).unwrap(), 1e6).unwrap();
    assert!(!packets.is_empty());
    assert!(packets.iter().all(|p| p.success && p.mean_sir == 1e6));
    let tau = analytics::throughput_density(1e-3, 1.0, 0.1, 1.5, 300e6, 1.0).unwrap();
    assert!((tau - 4.5e4).abs() < 1e-6);
}

#[test]
fn jammer_next_to_receiver_always_fails() {
    let c = ScenarioConfig::reference(1e-3, 1.0);
    let radio = Radio::from_config(&c).unwrap();
    let torus = Torus::new(1000.0).unwrap();
    // victim 0 -> 55; jammer at 54 faces +x, one metre in front of the victim receiver
    let r = hand_built(vec![comm_node(&torus, 0.0, 55.0), comm_node(&torus, 54.0, 109.0)], 1000.0, 1.0);
    let signal = link::comm_signal_power(radio.tx_power, c.comm_pattern.peak_gain(), radio.kappa, 55.0, 2.0).unwrap();
    let packets = score_packets(&r, &radio, 1, signal, link::decoding_threshold(1.5).unwrap(), 1e6).unwrap();
    assert!(!packets.is_empty());
    assert!(packets.iter().all(|p| !p.success && p.mean_sir < 1e-2));
}

#[test]
fn lone_radar_is_flagged_sparse() {
    let c = ScenarioConfig::reference(1e-3, 0.0);
    let outcome = RealizationOutcome {
        seed: 0,
        n_nodes: 1,
        n_radars: 1,
        n_comm: 0,
        pri_maxima: vec![0.0; 2000],
        slot_samples: Vec::new(),
        packets_scored: 0,
        packets_succeeded: 0,
        radar_activity: Some(1.0 / 60.0),
        comm_occupancy: None,
    };
    let m = radar_metrics(&c, &[outcome]).unwrap().unwrap();
    assert!(m.sparse);
    assert!(m.d_m.is_none());
    assert_eq!(m.calibration.theta, 0.0);
}

#[test]
fn duty_cycles_match_schedule_parameters() {
    let mut c = sectors(1e-3, 0.5);
    c.sim.n_slots = 6000;
    let m = run_measured(&c, Measure { radar: false, comm: false, slot_samples: false }).unwrap();
    let radar = m.duty.radar_activity.unwrap();
    assert!((radar.mean - 1.0 / 60.0).abs() <= (3.0 * radar.se).max(1e-12));
    let comm = m.duty.comm_occupancy.unwrap();
    assert!((comm.mean - 0.1).abs() <= 3.0 * comm.se, "{comm:?}");
}

#[test]
fn confidence_interval_shrinks_with_realizations() {
    let mut c = sectors(1e-3, 0.0);
    c.sim.calibration = CalibrationScope::PerRealization;
    let widths: Vec<f64> = [10, 40, 160]
        .iter()
        .map(|&n| {
            c.sim.n_realizations = n;
            run_measured(&c, Measure::RADAR).unwrap().radar.unwrap().d_m.unwrap().half_width
        })
        .collect();
    for w in widths.windows(2) {
        let ratio = w[0] / w[1];
        assert!((1.3..3.5).contains(&ratio), "{widths:?}");
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let mut c = ScenarioConfig::reference(1e-3, 0.33);
    c.sim.n_realizations = 6;
    c.sim.n_slots = 1200;
    c.sim.target_node_count = 300;
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_monte_carlo(&c).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn simulated_range_tracks_analytics() {
    let c = sectors(1e-3, 1.0 / 3.0);
    let m = run_measured(&c, Measure::RADAR).unwrap();
    let d = m.radar.unwrap().d_m.unwrap().mean;
    let a = AnalyticalResult::evaluate(&c).unwrap().d_m_a;
    assert!((d - a).abs() / a <= 0.10, "{d} vs {a}");

    let ranges: Vec<f64> = [1e-4, 1e-3, 1e-2]
        .iter()
        .map(|&l| run_measured(&sectors(l, 0.0), Measure::RADAR).unwrap().radar.unwrap().d_m.unwrap().mean)
        .collect();
    assert!(ranges[0] > ranges[1] && ranges[1] > ranges[2], "{ranges:?}");
}
