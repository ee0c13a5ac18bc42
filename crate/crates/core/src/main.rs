use clap::Parser;
use qubit_smoothing::config::{Scenario, ScenarioConfig};
use qubit_smoothing::report;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

/// Monitored-qubit simulator: single traces, comparison ensembles, and
/// dual-observer runs, written as CSV.
///
/// Defaults come first, then the optional config file, then any flags given
/// here. Times are in units of the Rabi period (the drive frequency defaults
/// to 2 pi). Worker count follows RAYON_NUM_THREADS; output is byte-identical
/// for a fixed seed regardless of it.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    /// Flat `key = value` config file
    #[arg(long)]
    config: Option<PathBuf>,

    /// single | ensemble | dual | dual_sweep
    #[arg(long)]
    scenario: Option<Scenario>,

    /// Drive angular frequency
    #[arg(long)]
    omega: Option<f64>,

    /// Collapse timescale of the z monitor
    #[arg(long)]
    tau: Option<f64>,

    /// Collapse timescale of the x monitor (dual scenario)
    #[arg(long = "tau-x")]
    tau_x: Option<f64>,

    /// Measurement time step
    #[arg(long)]
    dt: Option<f64>,

    /// Total monitored duration T (T/dt must be an integer)
    #[arg(long)]
    duration: Option<f64>,

    /// Ensemble size
    #[arg(long)]
    realizations: Option<usize>,

    /// Master seed; per-trajectory streams derive from it deterministically
    #[arg(long)]
    seed: Option<u64>,

    /// Initial Bloch vector, e.g. 0,0,1
    #[arg(long = "initial-bloch")]
    initial_bloch: Option<String>,

    /// Comma-separated tau_x/tau grid for the sweep scenario
    #[arg(long)]
    ratios: Option<String>,

    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_config(cli: &Cli) -> Result<ScenarioConfig, String> {
    let mut config = ScenarioConfig::default();
    if let Some(path) = &cli.config {
        config.load_file(path).map_err(|e| e.to_string())?;
    }
    if let Some(s) = cli.scenario {
        config.scenario = s;
    }
    if let Some(v) = cli.omega {
        config.omega = v;
    }
    if let Some(v) = cli.tau {
        config.tau = v;
    }
    if let Some(v) = cli.tau_x {
        config.tau_x = v;
    }
    if let Some(v) = cli.dt {
        config.dt = v;
    }
    if let Some(v) = cli.duration {
        config.duration = v;
    }
    if let Some(v) = cli.realizations {
        config.realizations = v;
    }
    if let Some(v) = cli.seed {
        config.master_seed = v;
    }
    if let Some(v) = &cli.initial_bloch {
        config.set("initial_bloch", v).map_err(|e| e.to_string())?;
    }
    if let Some(v) = &cli.ratios {
        config.set("ratios", v).map_err(|e| e.to_string())?;
    }
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn run() -> Result<(), String> {
    let cli = Cli::parse();
    let config = build_config(&cli)?;

    let out_path = cli
        .out
        .clone()
        .or_else(|| config.output_path.as_ref().map(PathBuf::from));
    match &out_path {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| format!("cannot create {}: {e}", path.display()))?;
            let mut out = BufWriter::new(file);
            report::execute(&config, &mut out).map_err(|e| e.to_string())?;
            out.flush().map_err(|e| e.to_string())?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut out = BufWriter::new(stdout.lock());
            report::execute(&config, &mut out).map_err(|e| e.to_string())?;
            out.flush().map_err(|e| e.to_string())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("qsmooth: {message}");
            ExitCode::FAILURE
        }
    }
}
