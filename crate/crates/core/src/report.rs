//! Scenario orchestration and CSV emission.
//!
//! Each run writes a `#`-prefixed header echoing the fully resolved
//! configuration, a column-name line, per-row data, and (for ensembles) a
//! trailing `#`-prefixed summary block. Numeric fields use the shortest
//! round-trip decimal form, so files are byte-identical across thread counts
//! for a fixed seed and load back without loss.
//!
//! Schemas:
//!
//! ```text
//! single     t,r,z,z_w,z_c,z_S,flag
//! ensemble   realization,Q,scaled_lnR,anomalous
//! dual       realization,Q_xZ,Q_xSZ,Q_xS
//! dual_sweep ratio,frac_xZ,frac_xSZ,frac_xS,n
//! ```

use crate::algebra::QubitState;
use crate::config::{ConfigError, Scenario, ScenarioConfig};
use crate::dual::{sweep_ratio, DualError, DualModel};
use crate::ensemble::{
    mean, positive_fraction, run_dual_ensemble, run_ensemble, trajectory_rng, EnsembleError,
};
use crate::measurement::MeasurementModel;
use crate::smoother::smooth_series;
use crate::trajectory::{backward_pass, forward_pass};
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Dual(#[from] DualError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<crate::trajectory::TrajectoryError> for RunError {
    fn from(e: crate::trajectory::TrajectoryError) -> Self {
        RunError::Ensemble(e.into())
    }
}

impl From<crate::metrics::MetricsError> for RunError {
    fn from(e: crate::metrics::MetricsError) -> Self {
        RunError::Ensemble(e.into())
    }
}

fn initial_state(config: &ScenarioConfig) -> Result<QubitState, ConfigError> {
    let [x, y, z] = config.initial_bloch;
    QubitState::from_bloch(x, y, z).map_err(|e| ConfigError::Invalid(format!("initial state: {e}")))
}

fn z_model(config: &ScenarioConfig) -> Result<MeasurementModel, ConfigError> {
    MeasurementModel::new(config.dt, config.tau, crate::algebra::Observable::z())
        .map_err(|e| ConfigError::Invalid(e.to_string()))
}

fn write_header(config: &ScenarioConfig, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "# qsmooth trace")?;
    for line in config.echo_lines() {
        writeln!(out, "# {line}")?;
    }
    Ok(())
}

/// Runs the configured scenario and writes its CSV to `out`.
pub fn execute(config: &ScenarioConfig, out: &mut impl Write) -> Result<(), RunError> {
    config.validate()?;
    match config.scenario {
        Scenario::Single => run_single(config, out),
        Scenario::Ensemble => run_ensemble_scenario(config, out),
        Scenario::Dual => run_dual_scenario(config, out),
        Scenario::DualSweep => run_dual_sweep(config, out),
    }
}

/// One seeded trajectory: per-step time, readout, estimates, anomaly flag.
pub fn run_single(config: &ScenarioConfig, out: &mut impl Write) -> Result<(), RunError> {
    let steps = config.steps()?;
    let model = z_model(config)?;
    let initial = initial_state(config)?;
    let mut rng = trajectory_rng(config.master_seed, 0);
    let record = forward_pass(&initial, config.omega, &model, steps, &mut rng)?;
    let effects = backward_pass(&record)?;
    let series = smooth_series(&record, &effects, model.obs());

    write_header(config, out)?;
    writeln!(out, "t,r,z,z_w,z_c,z_S,flag")?;
    for j in 0..record.len() {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            series.times[j],
            record.readouts[j],
            series.expectation[j],
            series.weak_value[j],
            series.second_order[j],
            series.smoothed[j],
            u8::from(series.anomalous[j]),
        )?;
    }
    writeln!(out, "# anomalous_points = {}", series.anomalous_count())?;
    Ok(())
}

/// Monte Carlo comparison ensemble: per-realization discriminators plus a
/// summary block with positive fractions, means, and the ensemble size.
pub fn run_ensemble_scenario(
    config: &ScenarioConfig,
    out: &mut impl Write,
) -> Result<(), RunError> {
    let steps = config.steps()?;
    let model = z_model(config)?;
    let initial = initial_state(config)?;
    let results = run_ensemble(
        &initial,
        config.omega,
        &model,
        steps,
        config.realizations,
        config.master_seed,
    )?;

    write_header(config, out)?;
    writeln!(out, "realization,Q,scaled_lnR,anomalous")?;
    for (i, r) in results.iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{}",
            i,
            r.q,
            r.scaled_ln_r(),
            r.anomalous_count
        )?;
    }
    let qs: Vec<f64> = results.iter().map(|r| r.q).collect();
    let lnrs: Vec<f64> = results.iter().map(|r| r.scaled_ln_r()).collect();
    let mses: Vec<f64> = results.iter().map(|r| r.mse_alt).collect();
    writeln!(out, "# realizations = {}", results.len())?;
    writeln!(out, "# fraction_q_positive = {}", positive_fraction(&qs))?;
    writeln!(
        out,
        "# fraction_lnr_positive = {}",
        positive_fraction(&lnrs)
    )?;
    writeln!(out, "# mean_q = {}", mean(&qs))?;
    writeln!(out, "# mean_scaled_lnr = {}", mean(&lnrs))?;
    writeln!(out, "# mean_mse_smoothed = {}", mean(&mses))?;
    writeln!(
        out,
        "# total_anomalous = {}",
        results.iter().map(|r| r.anomalous_count).sum::<usize>()
    )?;
    Ok(())
}

/// Two-observer ensemble at fixed `tau_x`.
pub fn run_dual_scenario(config: &ScenarioConfig, out: &mut impl Write) -> Result<(), RunError> {
    let steps = config.steps()?;
    let dual = DualModel::new(config.omega, config.dt, config.tau, config.tau_x, steps)?;
    let initial = initial_state(config)?;
    let results = run_dual_ensemble(&dual, &initial, config.realizations, config.master_seed)?;

    write_header(config, out)?;
    writeln!(out, "realization,Q_xZ,Q_xSZ,Q_xS")?;
    for (i, r) in results.iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{}",
            i, r.q_ignorant_expectation, r.q_ignorant_smoothed, r.q_omniscient_smoothed
        )?;
    }
    let f_xz: Vec<f64> = results.iter().map(|r| r.q_ignorant_expectation).collect();
    let f_xsz: Vec<f64> = results.iter().map(|r| r.q_ignorant_smoothed).collect();
    let f_xs: Vec<f64> = results.iter().map(|r| r.q_omniscient_smoothed).collect();
    writeln!(out, "# realizations = {}", results.len())?;
    writeln!(out, "# fraction_xZ_positive = {}", positive_fraction(&f_xz))?;
    writeln!(
        out,
        "# fraction_xSZ_positive = {}",
        positive_fraction(&f_xsz)
    )?;
    writeln!(out, "# fraction_xS_positive = {}", positive_fraction(&f_xs))?;
    writeln!(
        out,
        "# total_anomalous = {}",
        results.iter().map(|r| r.anomalous_count).sum::<usize>()
    )?;
    Ok(())
}

/// Positive-fraction table over the `tau_x/tau_z` grid, one row per ratio in
/// the requested order.
pub fn run_dual_sweep(config: &ScenarioConfig, out: &mut impl Write) -> Result<(), RunError> {
    let steps = config.steps()?;
    // tau_x comes from the swept ratios; the base value just needs validity
    let base = DualModel::new(config.omega, config.dt, config.tau, 2.0 * config.tau, steps)?;
    let initial = initial_state(config)?;
    let rows = sweep_ratio(
        &base,
        &initial,
        &config.ratios,
        config.realizations,
        config.master_seed,
    )?;

    write_header(config, out)?;
    writeln!(out, "ratio,frac_xZ,frac_xSZ,frac_xS,n")?;
    for row in &rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            row.ratio,
            row.frac_ignorant_expectation,
            row.frac_ignorant_smoothed,
            row.frac_omniscient_smoothed,
            row.realizations
        )?;
    }
    Ok(())
}
