use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use coexist_cli::error::{CliError, Result};
use coexist_cli::fixture::calibrate_two_node;
use coexist_cli::output::{write_artifacts, Artifacts, Format};
use coexist_cli::scenario::{emit, emit_file, parse_config, ScenarioFile};
use coexist_cli::sweep::{rows, run_cell, run_sweep, CellCoords, CellResult, Mode, SweepSpec};
use coexist_cli::validate::run_all;
use coexist_core::analytics::{activity_probability, detection_range_ratio};
use coexist_core::sim::{run_measured, Measure};
use coexist_core::{AccessPattern, ScenarioConfig, SimControls};

#[derive(Parser)]
#[command(name = "coexist", version, about = "Radar and ALOHA coexistence: analytics, simulation and sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Master seed for the simulator.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo realizations per scenario.
    #[arg(long, global = true)]
    realizations: Option<u32>,
    /// Slots per realization.
    #[arg(long, global = true)]
    slots: Option<u32>,
    /// Directory for result files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Fill the runtime_s column.
    #[arg(long, global = true)]
    record_runtime: bool,

    #[arg(long, global = true)]
    lambda: Option<f64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    /// Packet length, slots.
    #[arg(long = "L", global = true)]
    packet_slots: Option<u32>,
    /// Pulse repetition interval, slots.
    #[arg(long = "M", global = true)]
    pri_slots: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form analytics for one scenario.
    Analyze { config: Option<PathBuf> },
    /// Monte Carlo simulation of one scenario.
    Simulate { config: PathBuf },
    /// Detection threshold and achieved false-alarm rate only.
    Calibrate {
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        fixture: Option<Fixture>,
    },
    /// Every cell of a scenario grid.
    Sweep {
        spec: PathBuf,
        #[arg(long, value_parser = |s: &str| s.parse::<Mode>())]
        mode: Option<Mode>,
    },
    /// Run the acceptance suite and print one line per criterion.
    Validate,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fixture {
    TwoNode,
}

fn coords(config: &ScenarioConfig) -> CellCoords {
    CellCoords {
        lambda: config.lambda,
        beta: config.beta,
        packet_slots: config.packet_slots,
        phi_radar_deg: config.radar_pattern.nominal_beamwidth().to_degrees(),
    }
}

fn load(path: Option<&Path>) -> Result<ScenarioFile> {
    match path {
        None => Ok(ScenarioFile::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            parse_config(&text)
        }
    }
}

impl Cli {
    fn apply(&self, file: &mut ScenarioFile) {
        if let Some(v) = self.lambda {
            file.lambda = Some(v);
        }
        if let Some(v) = self.beta {
            file.beta = Some(v);
        }
        if let Some(v) = self.packet_slots {
            file.base.packet_slots = v;
        }
        if let Some(v) = self.pri_slots {
            file.base.pri_slots = v;
        }
        self.apply_sim(&mut file.base.sim);
    }

    fn apply_sim(&self, sim: &mut SimControls) {
        if let Some(v) = self.seed {
            sim.master_seed = v;
        }
        if let Some(v) = self.realizations {
            sim.n_realizations = v;
        }
        if let Some(v) = self.slots {
            sim.n_slots = v;
        }
    }

    fn scenario(&self, path: Option<&Path>) -> Result<ScenarioFile> {
        let mut file = load(path)?;
        self.apply(&mut file);
        Ok(file)
    }

    fn command_line() -> String {
        std::env::args().collect::<Vec<_>>().join(" ")
    }

    /// Writes result files for a single scenario when `--out` is given.
    fn save_single(&self, stem: &str, config: &ScenarioConfig, cell: &CellResult) -> Result<()> {
        let Some(dir) = &self.out else {
            return Ok(());
        };
        let echo = emit(config);
        let rows = rows(config, cell, self.record_runtime);
        let artifacts = Artifacts {
            command: &Self::command_line(),
            master_seed: config.sim.master_seed,
            config_echo: &echo,
            rows: &rows,
            cells: std::slice::from_ref(cell),
        };
        for path in write_artifacts(dir, stem, self.format, &artifacts)? {
            eprintln!("wrote {}", path.display());
        }
        Ok(())
    }

    fn run(&self, out: &mut (dyn Write + Send)) -> Result<()> {
        match &self.command {
            Command::Analyze { config } => self.analyze(out, config.as_deref()),
            Command::Simulate { config } => self.simulate(out, config),
            Command::Calibrate { config, fixture } => self.calibrate(out, config.as_deref(), *fixture),
            Command::Sweep { spec, mode } => self.sweep(out, spec, *mode),
            Command::Validate => self.validate(out),
        }
    }

    fn analyze(&self, out: &mut (dyn Write + Send), path: Option<&Path>) -> Result<()> {
        let file = self.scenario(path)?;
        if file.lambda.is_none() {
            // density-free quantities only
            let beta = file.beta.ok_or_else(|| CliError::Config("`beta` is mandatory and has no default".into()))?;
            let c = &file.base;
            let access = AccessPattern::new(beta, c.persistency, c.pri_slots, c.packet_slots)?;
            writeln!(out, "beta = {beta}")?;
            writeln!(out, "L = {}", c.packet_slots)?;
            writeln!(out, "M = {}", c.pri_slots)?;
            writeln!(out, "pi_a = {}", activity_probability(&access))?;
            writeln!(out, "xi = {}", detection_range_ratio(&access, c.pfa_target)?)?;
            return Ok(());
        }
        let config = file.resolve()?;
        let cell = run_cell(coords(&config), &config, Mode::Analytical)?;
        let a = cell.analytical.as_ref().expect("analytical mode");
        writeln!(out, "lambda = {}", config.lambda)?;
        writeln!(out, "beta = {}", config.beta)?;
        writeln!(out, "L = {}", config.packet_slots)?;
        writeln!(out, "M = {}", config.pri_slots)?;
        writeln!(out, "pi_a = {}", a.pi_a)?;
        writeln!(out, "theta_W = {:e}", a.theta)?;
        writeln!(out, "d_m_a = {}", a.d_m_a)?;
        writeln!(out, "xi = {}", a.xi)?;
        if a.alpha_caveat {
            writeln!(out, "# nearest-interferer law evaluated at its alpha -> 2 limit")?;
        }
        self.save_single("analyze", &config, &cell)
    }

    fn simulate(&self, out: &mut (dyn Write + Send), path: &Path) -> Result<()> {
        let config = self.scenario(Some(path))?.resolve()?;
        let cell = run_cell(coords(&config), &config, Mode::Simulation)?;
        let m = cell.simulation.as_ref().expect("simulation mode");
        writeln!(out, "master_seed = {}", m.master_seed)?;
        writeln!(out, "realizations = {}", m.seeds.len())?;
        if let Some(r) = &m.radar {
            writeln!(out, "theta_W = {:e}", r.calibration.theta)?;
            writeln!(out, "achieved_pfa = {}", r.calibration.achieved_pfa)?;
            match r.d_m {
                Some(d) => writeln!(out, "d_m = {} [{}, {}]", d.mean, d.lo(), d.hi())?,
                None => writeln!(out, "d_m = # no interference observed (sparse network)")?,
            }
        }
        if let Some(c) = &m.comm {
            if let Some(p) = c.p_s {
                writeln!(out, "p_s = {} [{}, {}]", p.mean, p.lo(), p.hi())?;
            }
            if let Some(t) = c.tau {
                writeln!(out, "tau = {} [{}, {}]", t.mean, t.lo(), t.hi())?;
            }
        }
        if let Some(d) = m.duty.radar_activity {
            writeln!(out, "radar_activity = {} (se {})", d.mean, d.se)?;
        }
        if let Some(d) = m.duty.comm_occupancy {
            writeln!(out, "comm_occupancy = {} (se {})", d.mean, d.se)?;
        }
        self.save_single("simulate", &config, &cell)
    }

    fn calibrate(&self, out: &mut (dyn Write + Send), path: Option<&Path>, fixture: Option<Fixture>) -> Result<()> {
        if let Some(Fixture::TwoNode) = fixture {
            let mut file = self.scenario(path)?;
            // density and mix play no role in the fixture
            file.lambda.get_or_insert(1e-3);
            file.beta.get_or_insert(0.0);
            let f = calibrate_two_node(&file.resolve()?)?;
            writeln!(out, "theta_W = {:e}", f.calibration.theta)?;
            writeln!(out, "achieved_pfa = {}", f.calibration.achieved_pfa)?;
            writeln!(out, "expected_W = {:e}", f.expected)?;
            return Ok(());
        }
        let config = self.scenario(path)?.resolve()?;
        let m = run_measured(&config, Measure::RADAR)?;
        let r = m.radar.ok_or_else(|| CliError::Runtime("no radars to calibrate (beta = 1)".into()))?;
        writeln!(out, "theta_W = {:e}", r.calibration.theta)?;
        writeln!(out, "achieved_pfa = {}", r.calibration.achieved_pfa)?;
        Ok(())
    }

    fn sweep(&self, out: &mut (dyn Write + Send), path: &Path, mode: Option<Mode>) -> Result<()> {
        let file = self.scenario(Some(path))?;
        let dir = self.out.clone().or_else(|| file.output.clone()).unwrap_or_else(|| PathBuf::from("results"));
        let echo = emit_file(&file);
        let spec = SweepSpec::new(file, mode);
        let result = run_sweep(&spec, self.record_runtime)?;
        let artifacts = Artifacts {
            command: &Self::command_line(),
            master_seed: spec.file.base.sim.master_seed,
            config_echo: &echo,
            rows: &result.rows,
            cells: &result.cells,
        };
        for path in write_artifacts(&dir, "sweep", self.format, &artifacts)? {
            eprintln!("wrote {}", path.display());
        }
        writeln!(out, "{} cells, {} rows", result.cells.len(), result.rows.len())?;
        Ok(())
    }

    fn validate(&self, out: &mut (dyn Write + Send)) -> Result<()> {
        let mut sim = SimControls::desk();
        self.apply_sim(&mut sim);
        let mut written = Ok(());
        let outcomes = run_all(&sim, |o| {
            if written.is_ok() {
                written = writeln!(out, "{o}").and_then(|()| out.flush());
            }
        });
        written?;
        let failed = outcomes.iter().filter(|o| !o.passed).count();
        writeln!(out, "{} of {} criteria passed", outcomes.len() - failed, outcomes.len())?;
        if let Some(dir) = &self.out {
            let json = serde_json::to_vec_pretty(&outcomes).map_err(|e| CliError::Runtime(e.to_string()))?;
            coexist_cli::output::write_atomic(&dir.join("validate.json"), &json)?;
        }
        if failed > 0 {
            return Err(CliError::Validation {
                failed,
                total: outcomes.len(),
            });
        }
        Ok(())
    }
}

/// Runs a parsed command on its own worker pool.
fn execute(cli: &Cli, out: &mut (dyn Write + Send)) -> Result<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.workers {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Runtime(e.to_string()))?;
    pool.install(|| cli.run(out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli, &mut std::io::stdout()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
