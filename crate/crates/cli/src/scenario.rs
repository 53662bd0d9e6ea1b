//! Key-value scenario files.
//!
//! One `key = value [unit]` per line, `#` starts a comment. Omitted keys take
//! the reference values, except `lambda` and `beta`, which must be given
//! (directly, on the command line, or as a sweep axis).

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use coexist_core::antenna::array_side_for_beamwidth;
use coexist_core::units::{db_to_linear, dbm_to_watts};
use coexist_core::{AntennaPattern, CalibrationScope, PatternKind, ScenarioConfig};

use crate::error::{CliError, Result};
use crate::sweep::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternFamily {
    Array,
    Sector,
}

/// How to build one antenna pattern; kept so sweeps can vary the beamwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternChoice {
    pub family: PatternFamily,
    /// Radians.
    pub beamwidth: f64,
    /// Sector peak gain (linear); `None` matches the array of the same width.
    pub peak_gain: Option<f64>,
}

impl PatternChoice {
    fn reference() -> Self {
        Self {
            family: PatternFamily::Array,
            beamwidth: 30f64.to_radians(),
            peak_gain: None,
        }
    }

    pub fn build(&self, key: &str) -> Result<AntennaPattern> {
        let pattern = match (self.family, self.peak_gain) {
            (PatternFamily::Array, Some(_)) => {
                return Err(CliError::Config(format!("`peak_gain_{key}` applies to sector patterns only")))
            }
            (PatternFamily::Array, None) => AntennaPattern::planar_array(array_side_for_beamwidth(self.beamwidth)?),
            (PatternFamily::Sector, None) => AntennaPattern::matched_sector(self.beamwidth),
            (PatternFamily::Sector, Some(g)) => AntennaPattern::ideal_sector(self.beamwidth, g),
        };
        pattern.map_err(|e| CliError::Config(format!("`beamwidth_{key}`: {e}")))
    }

    fn of(pattern: &AntennaPattern) -> Self {
        match pattern.kind() {
            PatternKind::PlanarArray { .. } => Self {
                family: PatternFamily::Array,
                beamwidth: pattern.nominal_beamwidth(),
                peak_gain: None,
            },
            PatternKind::IdealSector { beamwidth, peak_gain } => Self {
                family: PatternFamily::Sector,
                beamwidth,
                peak_gain: Some(peak_gain),
            },
        }
    }
}

/// Sweep axes; an empty axis is not swept.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepAxes {
    pub lambda: Vec<f64>,
    pub beta: Vec<f64>,
    pub packet_slots: Vec<u32>,
    /// Radians.
    pub beamwidth_radar: Vec<f64>,
}

/// A parsed scenario file before the mandatory keys are checked.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    /// All values except lambda, beta and the patterns, which come from the
    /// fields below.
    pub base: ScenarioConfig,
    pub lambda: Option<f64>,
    pub beta: Option<f64>,
    pub radar: PatternChoice,
    pub comm: PatternChoice,
    pub sweep: SweepAxes,
    pub mode: Option<Mode>,
    pub output: Option<PathBuf>,
}

impl Default for ScenarioFile {
    fn default() -> Self {
        Self {
            base: ScenarioConfig::reference(0.0, 0.0),
            lambda: None,
            beta: None,
            radar: PatternChoice::reference(),
            comm: PatternChoice::reference(),
            sweep: SweepAxes::default(),
            mode: None,
            output: None,
        }
    }
}

impl ScenarioFile {
    /// The single scenario described by the file; fails on missing `lambda`
    /// or `beta` and on any invalid value.
    pub fn resolve(&self) -> Result<ScenarioConfig> {
        let lambda = self.lambda.ok_or_else(|| missing("lambda"))?;
        let beta = self.beta.ok_or_else(|| missing("beta"))?;
        self.build(lambda, beta, self.base.packet_slots, self.radar.beamwidth)
    }

    /// Like [`resolve`](Self::resolve) with the four sweepable values replaced.
    pub fn build(&self, lambda: f64, beta: f64, packet_slots: u32, radar_beamwidth: f64) -> Result<ScenarioConfig> {
        let mut c = self.base.clone();
        c.lambda = lambda;
        c.beta = beta;
        c.packet_slots = packet_slots;
        c.radar_pattern = PatternChoice { beamwidth: radar_beamwidth, ..self.radar }.build("radar")?;
        c.comm_pattern = self.comm.build("comm")?;
        c.validate()?;
        Ok(c)
    }
}

fn missing(key: &str) -> CliError {
    CliError::Config(format!("`{key}` is mandatory and has no default"))
}

#[derive(Debug, Clone, Copy)]
enum Quantity {
    Plain,
    Density,
    Power,
    Frequency,
    Angle,
    Length,
    Area,
    Gain,
}

fn unit_error(key: &str, unit: &str, expected: &str) -> CliError {
    CliError::Config(format!("`{key}`: unit `{unit}` is not one of {expected}"))
}

fn number(key: &str, text: &str) -> Result<f64> {
    let x: f64 = text
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("`{key}`: `{text}` is not a number")))?;
    if !x.is_finite() {
        return Err(CliError::Config(format!("`{key}`: `{text}` is not finite")));
    }
    Ok(x)
}

/// A number with an optional unit, converted to linear SI.
fn quantity(key: &str, text: &str, kind: Quantity) -> Result<f64> {
    let mut parts = text.split_whitespace();
    let value = number(key, parts.next().unwrap_or(""))?;
    let unit = parts.next();
    if let Some(extra) = parts.next() {
        return Err(CliError::Config(format!("`{key}`: unexpected `{extra}`")));
    }
    let Some(unit) = unit else {
        return Ok(value);
    };
    let converted = match (kind, unit) {
        (Quantity::Density, "/m2") => value,
        (Quantity::Density, _) => return Err(unit_error(key, unit, "/m2")),
        (Quantity::Power, "W") => value,
        (Quantity::Power, "mW") => value * 1e-3,
        (Quantity::Power, "dBm") => dbm_to_watts(value),
        (Quantity::Power, _) => return Err(unit_error(key, unit, "W, mW, dBm")),
        (Quantity::Frequency, "Hz") => value,
        (Quantity::Frequency, "kHz") => value * 1e3,
        (Quantity::Frequency, "MHz") => value * 1e6,
        (Quantity::Frequency, "GHz") => value * 1e9,
        (Quantity::Frequency, _) => return Err(unit_error(key, unit, "Hz, kHz, MHz, GHz")),
        (Quantity::Angle, "rad") => value,
        (Quantity::Angle, "deg") => value.to_radians(),
        (Quantity::Angle, _) => return Err(unit_error(key, unit, "rad, deg")),
        (Quantity::Length, "m") => value,
        (Quantity::Length, "km") => value * 1e3,
        (Quantity::Length, _) => return Err(unit_error(key, unit, "m, km")),
        (Quantity::Area, "m2") => value,
        (Quantity::Area, _) => return Err(unit_error(key, unit, "m2")),
        (Quantity::Gain, "dB" | "dBi") => db_to_linear(value),
        (Quantity::Gain, _) => return Err(unit_error(key, unit, "dB, dBi (or none for linear)")),
        (Quantity::Plain, _) => return Err(CliError::Config(format!("`{key}` is dimensionless, got unit `{unit}`"))),
    };
    Ok(converted)
}

fn integer(key: &str, text: &str) -> Result<u64> {
    let mut parts = text.split_whitespace();
    let value = parts.next().unwrap_or("");
    match parts.next() {
        None | Some("slots") => {}
        Some(unit) => return Err(unit_error(key, unit, "slots")),
    }
    value
        .parse()
        .map_err(|_| CliError::Config(format!("`{key}`: `{value}` is not a non-negative integer")))
}

fn small_integer(key: &str, text: &str) -> Result<u32> {
    let v = integer(key, text)?;
    u32::try_from(v).map_err(|_| CliError::Config(format!("`{key}`: {v} is too large")))
}

/// `a, b, c` or `logspace(a, b, n)` (base-10 exponents, `n` points).
fn list(key: &str, text: &str, kind: Quantity) -> Result<Vec<f64>> {
    let text = text.trim();
    if let Some(inner) = text.strip_prefix("logspace(").and_then(|t| t.strip_suffix(')')) {
        let args: Vec<&str> = inner.split(',').collect();
        if args.len() != 3 {
            return Err(CliError::Config(format!("`{key}`: logspace takes (start, stop, count)")));
        }
        let (a, b) = (number(key, args[0])?, number(key, args[1])?);
        let n = integer(key, args[2].trim())? as usize;
        return Ok(logspace(a, b, n));
    }
    let values: Vec<f64> = text.split(',').map(|t| quantity(key, t, kind)).collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(CliError::Config(format!("`{key}`: empty list")));
    }
    Ok(values)
}

/// `n` points from `10^a` to `10^b`, evenly spaced in the exponent.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![10f64.powf(a)],
        _ => (0..n)
            .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
            .collect(),
    }
}

fn family(key: &str, text: &str) -> Result<PatternFamily> {
    match text.trim() {
        "array" => Ok(PatternFamily::Array),
        "sector" => Ok(PatternFamily::Sector),
        other => Err(CliError::Config(format!("`{key}`: `{other}` is not `array` or `sector`"))),
    }
}

pub fn parse_config(text: &str) -> Result<ScenarioFile> {
    let mut file = ScenarioFile::default();
    let mut seen = BTreeSet::new();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", index + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key.to_string()) {
            return Err(CliError::Config(format!("`{key}` is given twice")));
        }
        apply(&mut file, key, value)?;
    }
    Ok(file)
}

fn apply(file: &mut ScenarioFile, key: &str, value: &str) -> Result<()> {
    let c = &mut file.base;
    match key {
        "lambda" => file.lambda = Some(quantity(key, value, Quantity::Density)?),
        "beta" => file.beta = Some(quantity(key, value, Quantity::Plain)?),
        "p_t" => c.persistency = quantity(key, value, Quantity::Plain)?,
        "M" => c.pri_slots = small_integer(key, value)?,
        "L" => c.packet_slots = small_integer(key, value)?,
        "P_t" => c.tx_power = quantity(key, value, Quantity::Power)?,
        "f_c" => c.f_c = quantity(key, value, Quantity::Frequency)?,
        "B" => c.bandwidth = quantity(key, value, Quantity::Frequency)?,
        "alpha" => c.alpha = quantity(key, value, Quantity::Plain)?,
        "sigma" => c.sigma = quantity(key, value, Quantity::Area)?,
        "G_p" => c.g_p = quantity(key, value, Quantity::Gain)?,
        "pfa_target" => c.pfa_target = quantity(key, value, Quantity::Plain)?,
        "R" => c.rate = quantity(key, value, Quantity::Plain)?,
        "d_c" => c.d_c = quantity(key, value, Quantity::Length)?,
        "pattern" => {
            let f = family(key, value)?;
            file.radar.family = f;
            file.comm.family = f;
        }
        "pattern_radar" => file.radar.family = family(key, value)?,
        "pattern_comm" => file.comm.family = family(key, value)?,
        "beamwidth_radar" => file.radar.beamwidth = quantity(key, value, Quantity::Angle)?,
        "beamwidth_comm" => file.comm.beamwidth = quantity(key, value, Quantity::Angle)?,
        "peak_gain_radar" => file.radar.peak_gain = Some(quantity(key, value, Quantity::Gain)?),
        "peak_gain_comm" => file.comm.peak_gain = Some(quantity(key, value, Quantity::Gain)?),
        "n_realizations" => c.sim.n_realizations = small_integer(key, value)?,
        "n_slots" => c.sim.n_slots = small_integer(key, value)?,
        "target_node_count" => c.sim.target_node_count = small_integer(key, value)?,
        "master_seed" => c.sim.master_seed = integer(key, value)?,
        "sir_cap" => c.sim.sir_cap = quantity(key, value, Quantity::Gain)?,
        "calibration" => {
            c.sim.calibration = match value {
                "pooled" => CalibrationScope::Pooled,
                "per_realization" => CalibrationScope::PerRealization,
                other => {
                    return Err(CliError::Config(format!(
                        "`calibration`: `{other}` is not `pooled` or `per_realization`"
                    )))
                }
            }
        }
        "max_tagged_radars" => c.sim.max_tagged_radars = small_integer(key, value)?,
        "max_tagged_links" => c.sim.max_tagged_links = small_integer(key, value)?,
        "min_side_factor" => c.sim.min_side_factor = quantity(key, value, Quantity::Plain)?,
        "mode" => file.mode = Some(value.parse().map_err(CliError::Config)?),
        "output" => file.output = Some(PathBuf::from(value)),
        "sweep.lambda" => file.sweep.lambda = list(key, value, Quantity::Density)?,
        "sweep.beta" => file.sweep.beta = list(key, value, Quantity::Plain)?,
        "sweep.L" => {
            file.sweep.packet_slots = value.split(',').map(|v| small_integer(key, v.trim())).collect::<Result<_>>()?
        }
        "sweep.beamwidth_radar" => file.sweep.beamwidth_radar = list(key, value, Quantity::Angle)?,
        other => return Err(CliError::Config(format!("unknown key `{other}`"))),
    }
    Ok(())
}

/// Writes every key of a scenario in linear SI units; [`parse_config`]
/// followed by [`ScenarioFile::resolve`] reproduces `config` exactly.
pub fn emit(config: &ScenarioConfig) -> String {
    emit_file(&ScenarioFile::from_config(config))
}

impl ScenarioFile {
    pub fn from_config(config: &ScenarioConfig) -> Self {
        Self {
            base: config.clone(),
            lambda: Some(config.lambda),
            beta: Some(config.beta),
            radar: PatternChoice::of(&config.radar_pattern),
            comm: PatternChoice::of(&config.comm_pattern),
            ..Self::default()
        }
    }
}

fn joined<T: std::fmt::Display>(values: &[T], unit: &str) -> String {
    values.iter().map(|v| format!("{v}{unit}")).collect::<Vec<_>>().join(", ")
}

/// Writes a scenario file, sweep axes included, in the same form it is parsed.
pub fn emit_file(file: &ScenarioFile) -> String {
    let config = &file.base;
    let mut out = String::new();
    let mut line = |k: &str, v: String| writeln!(out, "{k} = {v}").expect("writing to a String");
    if let Some(lambda) = file.lambda {
        line("lambda", format!("{lambda}"));
    }
    if let Some(beta) = file.beta {
        line("beta", format!("{beta}"));
    }
    line("p_t", format!("{}", config.persistency));
    line("M", format!("{}", config.pri_slots));
    line("L", format!("{}", config.packet_slots));
    line("P_t", format!("{} W", config.tx_power));
    line("f_c", format!("{} Hz", config.f_c));
    line("B", format!("{} Hz", config.bandwidth));
    line("alpha", format!("{}", config.alpha));
    line("sigma", format!("{} m2", config.sigma));
    line("G_p", format!("{}", config.g_p));
    line("pfa_target", format!("{}", config.pfa_target));
    line("R", format!("{}", config.rate));
    line("d_c", format!("{} m", config.d_c));
    for (name, choice) in [("radar", &file.radar), ("comm", &file.comm)] {
        let family = match choice.family {
            PatternFamily::Array => "array",
            PatternFamily::Sector => "sector",
        };
        line(&format!("pattern_{name}"), family.to_string());
        line(&format!("beamwidth_{name}"), format!("{} rad", choice.beamwidth));
        if let Some(g) = choice.peak_gain {
            line(&format!("peak_gain_{name}"), format!("{g}"));
        }
    }
    let s = &config.sim;
    line("n_realizations", format!("{}", s.n_realizations));
    line("n_slots", format!("{}", s.n_slots));
    line("target_node_count", format!("{}", s.target_node_count));
    line("master_seed", format!("{}", s.master_seed));
    line("sir_cap", format!("{}", s.sir_cap));
    let scope = match s.calibration {
        CalibrationScope::Pooled => "pooled",
        CalibrationScope::PerRealization => "per_realization",
    };
    line("calibration", scope.to_string());
    line("max_tagged_radars", format!("{}", s.max_tagged_radars));
    line("max_tagged_links", format!("{}", s.max_tagged_links));
    line("min_side_factor", format!("{}", s.min_side_factor));
    let sweep = &file.sweep;
    if !sweep.lambda.is_empty() {
        line("sweep.lambda", joined(&sweep.lambda, ""));
    }
    if !sweep.beta.is_empty() {
        line("sweep.beta", joined(&sweep.beta, ""));
    }
    if !sweep.packet_slots.is_empty() {
        line("sweep.L", joined(&sweep.packet_slots, ""));
    }
    if !sweep.beamwidth_radar.is_empty() {
        line("sweep.beamwidth_radar", joined(&sweep.beamwidth_radar, " rad"));
    }
    if let Some(mode) = file.mode {
        let name = match mode {
            Mode::Analytical => "analytical",
            Mode::Simulation => "simulation",
            Mode::Both => "both",
        };
        line("mode", name.to_string());
    }
    if let Some(path) = &file.output {
        line("output", path.display().to_string());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use coexist_core::units::linear_to_db;
    use proptest::prelude::*;

    #[test]
    fn empty_file_needs_lambda() {
        let f = parse_config("").unwrap();
        let err = f.resolve().unwrap_err();
        assert!(err.to_string().contains("lambda"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn omitted_keys_take_reference_values() {
        let c = parse_config("lambda = 1e-3\nbeta = 0.33\n").unwrap().resolve().unwrap();
        assert_eq!(c, ScenarioConfig::reference(1e-3, 0.33));
    }

    #[test]
    fn units_are_converted_once() {
        let text = "lambda = 2e-3 /m2\nbeta = 0.5\nP_t = 20 dBm  # comment\nf_c = 28 GHz\nB = 400 MHz\n\
                    beamwidth_radar = 60 deg\nG_p = 10 dB\nd_c = 0.1 km\n";
        let c = parse_config(text).unwrap().resolve().unwrap();
        assert!((c.tx_power - 0.1).abs() < 1e-15);
        assert_eq!(c.f_c, 28e9);
        assert_eq!(c.bandwidth, 400e6);
        assert!((c.g_p - 10.0).abs() < 1e-12);
        assert_eq!(c.d_c, 100.0);
        assert_eq!(c.radar_pattern, AntennaPattern::planar_array(2).unwrap());
        let hpbw = c.radar_pattern.hpbw().to_degrees();
        assert!((hpbw - 60.0).abs() < 8.0, "{hpbw}");
        assert!((linear_to_db(c.radar_pattern.peak_gain()) - 10.1).abs() < 1.5);
    }

    #[test]
    fn errors_name_the_key() {
        let cases = [
            ("lambda = 1e-3\nbeta = 0.3\np_t = 1.5\n", "p_t"),
            ("lambda = 1e-3\nbeta = 0.3\nf_c = 60 dBm\n", "f_c"),
            ("lambda = 1e-3\nbeta = 0.3\nfoo = 1\n", "foo"),
            ("lambda = 1e-3\nbeta = 0.3\nM = 2.5\n", "M"),
            ("lambda = 1e-3\nlambda = 1e-2\nbeta = 0.3\n", "lambda"),
            ("lambda = 1e-3\n", "beta"),
        ];
        for (text, key) in cases {
            let err = parse_config(text).and_then(|f| f.resolve()).unwrap_err();
            assert!(err.to_string().contains(key), "{text:?} -> {err}");
            assert_eq!(err.exit_code(), 2);
        }
    }

    #[test]
    fn sweep_axes() {
        let f = parse_config(
            "sweep.lambda = logspace(-5, 0, 21)\nsweep.beta = 0, 0.33, 0.66, 1\nsweep.L = 1, 30\n\
             sweep.beamwidth_radar = 30 deg, 60 deg\nmode = both\noutput = out/x\n",
        )
        .unwrap();
        assert_eq!(f.sweep.lambda.len(), 21);
        assert_eq!(f.sweep.lambda[0], 1e-5);
        assert_eq!(f.sweep.lambda[20], 1.0);
        assert_eq!(f.sweep.beta, vec![0.0, 0.33, 0.66, 1.0]);
        assert_eq!(f.sweep.packet_slots, vec![1, 30]);
        assert_eq!(f.mode, Some(Mode::Both));
        assert_eq!(f.output, Some(PathBuf::from("out/x")));
    }

    #[test]
    fn sector_peak_gain_and_array_conflict() {
        let c = parse_config("lambda = 1e-3\nbeta = 0\npattern = sector\npeak_gain_radar = 20 dB\n")
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!(c.radar_pattern.peak_gain(), 100.0);
        let err = parse_config("lambda = 1e-3\nbeta = 0\npeak_gain_comm = 3\n").unwrap().resolve().unwrap_err();
        assert!(err.to_string().contains("peak_gain_comm"), "{err}");
    }

    #[test]
    fn sweep_file_round_trips() {
        let text = "beta = 0.33\nsweep.lambda = logspace(-5, 0, 9)\nsweep.L = 1, 15, 30\n\
                    sweep.beamwidth_radar = 30 deg, 60 deg\nmode = simulation\noutput = out\n";
        let f = parse_config(text).unwrap();
        assert_eq!(parse_config(&emit_file(&f)).unwrap(), f);
    }

    fn any_config() -> impl Strategy<Value = ScenarioConfig> {
        (
            (1e-6f64..1.0, 0.0f64..=1.0, 0.001f64..=1.0, 2u32..200, 1u32..400),
            (1e-4f64..10.0, 1e9f64..1e11, 1e6f64..1e9, 2.0f64..4.0, 0.1f64..100.0),
            (1.0f64..100.0, 0.001f64..0.2, 0.1f64..4.0, 1.0f64..500.0),
            (1u32..6, 1u32..6, 2f64..170.0, any::<bool>(), any::<u64>()),
        )
            .prop_map(|(a, b, c, d)| {
                let mut cfg = ScenarioConfig::reference(a.0, a.1);
                cfg.persistency = a.2;
                cfg.pri_slots = a.3;
                cfg.packet_slots = a.4;
                cfg.tx_power = b.0;
                cfg.f_c = b.1;
                cfg.bandwidth = b.2;
                cfg.alpha = b.3;
                cfg.sigma = b.4;
                cfg.g_p = c.0;
                cfg.pfa_target = c.1;
                cfg.rate = c.2;
                cfg.d_c = c.3;
                cfg.radar_pattern = AntennaPattern::planar_array(d.0).unwrap();
                cfg.comm_pattern = if d.3 {
                    AntennaPattern::ideal_sector(d.2.to_radians(), 1.0 + d.1 as f64).unwrap()
                } else {
                    AntennaPattern::matched_sector(d.2.to_radians()).unwrap()
                };
                cfg.sim.master_seed = d.4;
                cfg.sim.n_slots = cfg.pri_slots * 3;
                cfg.sim.calibration = if d.3 { CalibrationScope::Pooled } else { CalibrationScope::PerRealization };
                cfg
            })
    }

    proptest! {
        #[test]
        fn emit_then_parse_is_identity(config in any_config()) {
            prop_assume!(config.validate().is_ok());
            let back = parse_config(&emit(&config)).unwrap().resolve().unwrap();
            prop_assert_eq!(back, config);
        }
    }
}
