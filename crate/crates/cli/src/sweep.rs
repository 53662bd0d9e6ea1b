//! Scenario grids and their result rows.

use std::str::FromStr;
use std::time::Instant;

use coexist_core::sim::{run_measured, Measure, SimMetrics};
use coexist_core::{AnalyticalResult, AntennaPattern, PatternKind, ScenarioConfig};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::scenario::ScenarioFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Analytical,
    Simulation,
    Both,
}

impl Mode {
    fn analytical(self) -> bool {
        matches!(self, Mode::Analytical | Mode::Both)
    }

    fn simulation(self) -> bool {
        matches!(self, Mode::Simulation | Mode::Both)
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "analytical" => Ok(Mode::Analytical),
            "simulation" => Ok(Mode::Simulation),
            "both" => Ok(Mode::Both),
            other => Err(format!("`mode`: `{other}` is not analytical, simulation or both")),
        }
    }
}

/// A grid of scenarios: the cartesian product of the swept axes.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub file: ScenarioFile,
    pub mode: Mode,
}

/// Coordinates of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellCoords {
    pub lambda: f64,
    pub beta: f64,
    #[serde(rename = "L")]
    pub packet_slots: u32,
    pub phi_radar_deg: f64,
}

impl std::fmt::Display for CellCoords {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "lambda={} beta={} L={} phi_radar={}deg",
            self.lambda, self.beta, self.packet_slots, self.phi_radar_deg
        )
    }
}

fn axis<T: Copy>(values: &[T], single: Option<T>, key: &str) -> Result<Vec<T>> {
    if !values.is_empty() {
        Ok(values.to_vec())
    } else {
        single
            .map(|v| vec![v])
            .ok_or_else(|| CliError::Config(format!("`{key}` is mandatory and has no default")))
    }
}

impl SweepSpec {
    pub fn new(file: ScenarioFile, mode: Option<Mode>) -> Self {
        let mode = mode.or(file.mode).unwrap_or(Mode::Both);
        Self { file, mode }
    }

    /// Every cell, lambda outermost and radar beamwidth innermost.
    pub fn cells(&self) -> Result<Vec<(CellCoords, ScenarioConfig)>> {
        let f = &self.file;
        let lambdas = axis(&f.sweep.lambda, f.lambda, "lambda")?;
        let betas = axis(&f.sweep.beta, f.beta, "beta")?;
        let ls = axis(&f.sweep.packet_slots, Some(f.base.packet_slots), "L")?;
        let widths = axis(&f.sweep.beamwidth_radar, Some(f.radar.beamwidth), "beamwidth_radar")?;
        let mut cells = Vec::with_capacity(lambdas.len() * betas.len() * ls.len() * widths.len());
        for &lambda in &lambdas {
            for &beta in &betas {
                for &l in &ls {
                    for &w in &widths {
                        let coords = CellCoords {
                            lambda,
                            beta,
                            packet_slots: l,
                            phi_radar_deg: w.to_degrees(),
                        };
                        let config = f.build(lambda, beta, l, w).map_err(|e| at(coords, e))?;
                        cells.push((coords, config));
                    }
                }
            }
        }
        Ok(cells)
    }
}

fn at(coords: CellCoords, e: CliError) -> CliError {
    match e {
        CliError::Config(m) => CliError::Config(format!("cell {coords}: {m}")),
        CliError::Runtime(m) => CliError::Runtime(format!("cell {coords}: {m}")),
        other => other,
    }
}

/// Everything computed for one cell, kept for the JSON mirror.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellResult {
    pub coords: CellCoords,
    pub analytical: Option<AnalyticalResult>,
    pub simulation: Option<SimMetrics>,
    pub runtime_s: f64,
}

pub fn run_cell(coords: CellCoords, config: &ScenarioConfig, mode: Mode) -> Result<CellResult> {
    let start = Instant::now();
    let analytical = if mode.analytical() {
        Some(AnalyticalResult::evaluate(config).map_err(|e| at(coords, e.into()))?)
    } else {
        None
    };
    let simulation = if mode.simulation() {
        Some(run_measured(config, Measure::ALL).map_err(|e| at(coords, e.into()))?)
    } else {
        None
    };
    Ok(CellResult {
        coords,
        analytical,
        simulation,
        runtime_s: start.elapsed().as_secs_f64(),
    })
}

/// One CSV line. Column order is part of the output contract.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub lambda: f64,
    pub beta: f64,
    pub p_t: f64,
    #[serde(rename = "M")]
    pub pri_slots: u32,
    #[serde(rename = "L")]
    pub packet_slots: u32,
    pub phi_radar_deg: f64,
    pub phi_comm_deg: f64,
    pub pattern_kind: String,
    pub mode: &'static str,
    pub d_m: Option<f64>,
    pub d_m_lo: Option<f64>,
    pub d_m_hi: Option<f64>,
    pub d_m_a: Option<f64>,
    #[serde(rename = "theta_W")]
    pub theta_w: Option<f64>,
    pub achieved_pfa: Option<f64>,
    pub p_s: Option<f64>,
    pub tau: Option<f64>,
    pub xi: Option<f64>,
    pub seed: Option<u64>,
    pub runtime_s: Option<f64>,
}

pub const CSV_COLUMNS: [&str; 20] = [
    "lambda",
    "beta",
    "p_t",
    "M",
    "L",
    "phi_radar_deg",
    "phi_comm_deg",
    "pattern_kind",
    "mode",
    "d_m",
    "d_m_lo",
    "d_m_hi",
    "d_m_a",
    "theta_W",
    "achieved_pfa",
    "p_s",
    "tau",
    "xi",
    "seed",
    "runtime_s",
];

fn kind_name(p: &AntennaPattern) -> &'static str {
    match p.kind() {
        PatternKind::PlanarArray { .. } => "array",
        PatternKind::IdealSector { .. } => "sector",
    }
}

fn pattern_kind(config: &ScenarioConfig) -> String {
    let (r, c) = (kind_name(&config.radar_pattern), kind_name(&config.comm_pattern));
    if r == c {
        r.to_string()
    } else {
        format!("{r}/{c}")
    }
}

/// Rows for one cell: analytical first, then simulation.
pub fn rows(config: &ScenarioConfig, cell: &CellResult, record_runtime: bool) -> Vec<ResultRow> {
    let blank = ResultRow {
        lambda: config.lambda,
        beta: config.beta,
        p_t: config.persistency,
        pri_slots: config.pri_slots,
        packet_slots: config.packet_slots,
        phi_radar_deg: config.radar_pattern.nominal_beamwidth().to_degrees(),
        phi_comm_deg: config.comm_pattern.nominal_beamwidth().to_degrees(),
        pattern_kind: pattern_kind(config),
        mode: "",
        d_m: None,
        d_m_lo: None,
        d_m_hi: None,
        d_m_a: None,
        theta_w: None,
        achieved_pfa: None,
        p_s: None,
        tau: None,
        xi: None,
        seed: None,
        runtime_s: record_runtime.then_some(cell.runtime_s),
    };
    let mut out = Vec::new();
    if let Some(a) = &cell.analytical {
        out.push(ResultRow {
            mode: "analytical",
            d_m_a: Some(a.d_m_a),
            theta_w: Some(a.theta),
            xi: Some(a.xi),
            ..blank.clone()
        });
    }
    if let Some(s) = &cell.simulation {
        let radar = s.radar.as_ref();
        let d_m = radar.and_then(|r| r.d_m);
        let comm = s.comm.as_ref();
        let tau = if config.beta == 0.0 {
            Some(0.0)
        } else {
            comm.and_then(|c| c.tau).map(|t| t.mean)
        };
        out.push(ResultRow {
            mode: "simulation",
            d_m: d_m.map(|d| d.mean),
            d_m_lo: d_m.map(|d| d.lo()).filter(|x| x.is_finite()),
            d_m_hi: d_m.map(|d| d.hi()).filter(|x| x.is_finite()),
            theta_w: radar.map(|r| r.calibration.theta),
            achieved_pfa: radar.map(|r| r.calibration.achieved_pfa),
            p_s: comm.and_then(|c| c.p_s).map(|p| p.mean),
            tau,
            seed: Some(s.master_seed),
            ..blank
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<ResultRow>,
    pub cells: Vec<CellResult>,
}

/// Runs every cell in order. Realizations inside a cell run in parallel on
/// the current rayon pool; the output does not depend on its size.
pub fn run_sweep(spec: &SweepSpec, record_runtime: bool) -> Result<SweepOutput> {
    let mut out = SweepOutput {
        rows: Vec::new(),
        cells: Vec::new(),
    };
    for (coords, config) in spec.cells()? {
        let cell = run_cell(coords, &config, spec.mode)?;
        out.rows.extend(rows(&config, &cell, record_runtime));
        out.cells.push(cell);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_config;

    #[test]
    fn cardinality_is_the_product_of_axes() {
        let f = parse_config("sweep.lambda = 1e-4, 1e-3, 1e-2\nsweep.beta = 0, 0.33, 0.66, 1\n").unwrap();
        let spec = SweepSpec::new(f, Some(Mode::Both));
        assert_eq!(spec.cells().unwrap().len(), 12);
    }

    #[test]
    fn analytical_grid_rows() {
        let f = parse_config("sweep.lambda = logspace(-5, 0, 21)\nbeta = 0.33\nmode = analytical\n").unwrap();
        let spec = SweepSpec::new(f, None);
        let start = Instant::now();
        let out = run_sweep(&spec, false).unwrap();
        assert!(start.elapsed().as_secs_f64() < 1.0);
        assert_eq!(out.rows.len(), 21);
        assert!(out.rows.iter().all(|r| r.mode == "analytical" && r.d_m.is_none() && r.d_m_a.is_some()));
    }

    #[test]
    fn missing_lambda_is_reported() {
        let f = parse_config("beta = 0.33\n").unwrap();
        let err = SweepSpec::new(f, None).cells().unwrap_err();
        assert!(err.to_string().contains("lambda"));
    }

    #[test]
    fn invalid_cell_names_its_coordinates() {
        let f = parse_config("lambda = 1e-3\nsweep.beta = 0.5, 1.5\n").unwrap();
        let err = SweepSpec::new(f, None).cells().unwrap_err();
        assert!(err.to_string().contains("beta=1.5"), "{err}");
    }
}
