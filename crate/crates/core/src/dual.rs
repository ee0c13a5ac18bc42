//! Two concurrent monitors on different axes of the same qubit.
//!
//! A strong monitor couples to the z axis and a weaker one to the x axis
//! (`tau_z < tau_x`). Within each time step the order is fixed: drive
//! unitary, then the x measurement, then the z measurement, so the x readout
//! probes the state before the step's dominant (z) collapse. In the continuum
//! limit the intra-step order is immaterial; at finite `dt/tau_z` it is not,
//! and this order is the one whose estimate statistics line up with the
//! reference ensembles.
//!
//! Three estimators of the x readout are compared against the expectation
//! value `x` computed from the fully conditioned causal state:
//!
//! * the omniscient smoothed estimate, built from both records;
//! * the ignorant expectation and the ignorant smoothed estimate, built by an
//!   observer who holds only the z record and models only their own
//!   backaction, even though the x meter perturbed the actual evolution.
//!
//! Causal estimators condition on strictly earlier data. Smoothed estimators
//! condition on everything except the readout being predicted — including the
//! same step's z outcome, which is folded into the future effect since the z
//! collapse acts after the x coupling.
//!
//! The ignorant path never touches the x readouts; it is handed the z record
//! alone. Its smoothed estimate uses the x meter's own `dt/tau_x` in the
//! denominator: the measurement protocol is public, only the record is
//! private.

use crate::algebra::{rabi_unitary, ComplexMatrix2, Observable, QubitState};
use crate::measurement::{MeasurementError, MeasurementModel, UPDATE_UNDERFLOW_GUARD};
use crate::metrics::{relative_mse, MetricsError};
use crate::smoother::{assemble_series, EstimateSeries};
use crate::trajectory::TrajectoryError;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DualError {
    #[error(transparent)]
    Measurement(#[from] MeasurementError),
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("invalid dual model: {0}")]
    InvalidModel(String),
}

/// Parameters of the two interleaved monitors. Both share the time step; the
/// z monitor is the stronger one and causes most of the backaction.
#[derive(Clone, Copy, Debug)]
pub struct DualModel {
    model_z: MeasurementModel,
    model_x: MeasurementModel,
    omega: f64,
    steps: usize,
}

impl DualModel {
    pub fn new(
        omega: f64,
        dt: f64,
        tau_z: f64,
        tau_x: f64,
        steps: usize,
    ) -> Result<Self, DualError> {
        if !(tau_z < tau_x) {
            return Err(DualError::InvalidModel(format!(
                "tau_z ({tau_z}) must be smaller than tau_x ({tau_x})"
            )));
        }
        if steps == 0 {
            return Err(DualError::InvalidModel("steps must be >= 1".into()));
        }
        Ok(Self {
            model_z: MeasurementModel::new(dt, tau_z, Observable::z())?,
            model_x: MeasurementModel::new(dt, tau_x, Observable::x())?,
            omega,
            steps,
        })
    }

    /// Same geometry with the x collapse timescale set to `ratio * tau_z`.
    pub fn with_ratio(&self, ratio: f64) -> Result<Self, DualError> {
        Self::new(
            self.omega,
            self.model_z.dt(),
            self.model_z.tau(),
            ratio * self.model_z.tau(),
            self.steps,
        )
    }

    pub fn model_z(&self) -> &MeasurementModel {
        &self.model_z
    }

    pub fn model_x(&self) -> &MeasurementModel {
        &self.model_x
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.model_z.dt()
    }
}

/// One realization under both monitors.
#[derive(Clone, Debug)]
pub struct DualRecord {
    pub initial_state: QubitState,
    /// z readouts, sampled after the same step's x collapse.
    pub readouts_z: Vec<f64>,
    /// x readouts, sampled right after the step's unitary.
    pub readouts_x: Vec<f64>,
    /// State after the step's unitary and before either measurement,
    /// conditioned on both records so far.
    pub true_forward_states: Vec<QubitState>,
}

impl DualRecord {
    pub fn len(&self) -> usize {
        self.readouts_z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.readouts_z.is_empty()
    }
}

/// Evolves the qubit under both backactions: per step apply the unitary,
/// sample and apply the x measurement, then sample and apply the z
/// measurement. Deterministic given the stream.
pub fn dual_forward_pass<R: Rng + ?Sized>(
    initial: &QubitState,
    dual: &DualModel,
    rng: &mut R,
) -> Result<DualRecord, DualError> {
    let unitary = rabi_unitary(dual.omega, dual.dt());
    let n = dual.steps;
    let mut readouts_z = Vec::with_capacity(n);
    let mut readouts_x = Vec::with_capacity(n);
    let mut states = Vec::with_capacity(n);
    let mut state = *initial;
    for _ in 0..n {
        state = state.evolve(&unitary);
        states.push(state);
        let r_x = dual.model_x.sample_readout(&state, rng);
        readouts_x.push(r_x);
        state = dual.model_x.update_state(&state, r_x)?;
        let r_z = dual.model_z.sample_readout(&state, rng);
        readouts_z.push(r_z);
        state = dual.model_z.update_state(&state, r_z)?;
    }
    Ok(DualRecord {
        initial_state: *initial,
        readouts_z,
        readouts_x,
        true_forward_states: states,
    })
}

/// Rescale a Hermitian PSD accumulation to unit maximum eigenvalue.
fn renormalize(raw: ComplexMatrix2, step: usize) -> Result<ComplexMatrix2, DualError> {
    let trace = raw.trace().re;
    if !(trace > UPDATE_UNDERFLOW_GUARD) {
        return Err(TrajectoryError::EffectUnderflow { step, trace }.into());
    }
    let (_, high) = raw.hermitian_eigenvalues();
    Ok(raw.scale(1.0 / high))
}

/// Future effects for the x readout of every step: outcomes of steps `j+1..`
/// under both Kraus families, plus the same step's z outcome, whose collapse
/// acts between the x coupling and the later record.
fn x_prediction_effects(
    readouts_z: &[f64],
    readouts_x: Option<&[f64]>,
    model_z: &MeasurementModel,
    model_x: Option<&MeasurementModel>,
    unitary: &ComplexMatrix2,
) -> Result<Vec<ComplexMatrix2>, DualError> {
    let n = readouts_z.len();
    let mut folded = vec![ComplexMatrix2::IDENTITY; n];
    let mut current = ComplexMatrix2::IDENTITY;
    for j in (0..n).rev() {
        let m_z = model_z.make_kraus(readouts_z[j]);
        folded[j] = renormalize(((m_z.adjoint() * current) * m_z).hermitian_part(), j)?;
        if j > 0 {
            // absorb the whole step j: U, then the x collapse (if modeled),
            // then the z collapse
            let slot = match (readouts_x, model_x) {
                (Some(r_x), Some(m_x)) => (m_z * m_x.make_kraus(r_x[j])) * *unitary,
                _ => m_z * *unitary,
            };
            current = renormalize(((slot.adjoint() * current) * slot).hermitian_part(), j)?;
        }
    }
    Ok(folded)
}

/// X-axis estimates using both records: the expectation value from the fully
/// conditioned causal state, and the smoothed estimate conditioned on
/// everything except the x readout itself.
pub fn omniscient_estimates(
    record: &DualRecord,
    dual: &DualModel,
) -> Result<EstimateSeries, DualError> {
    let unitary = rabi_unitary(dual.omega, dual.dt());
    let effects = x_prediction_effects(
        &record.readouts_z,
        Some(&record.readouts_x),
        &dual.model_z,
        Some(&dual.model_x),
        &unitary,
    )?;
    Ok(assemble_series(
        &record.true_forward_states,
        &effects,
        &Observable::x(),
        &dual.model_x,
    ))
}

/// X-axis estimates available to the observer who holds only the z record.
pub fn ignorant_estimates(
    record: &DualRecord,
    dual: &DualModel,
) -> Result<EstimateSeries, DualError> {
    ignorant_estimates_from_z(&record.readouts_z, &record.initial_state, dual)
}

/// The actual ignorant computation; its signature is the information barrier.
/// Re-filters the z record with only the z Kraus family, accumulates z-only
/// prediction effects, and smooths the x observable against that
/// bidirectional pair.
pub fn ignorant_estimates_from_z(
    readouts_z: &[f64],
    initial: &QubitState,
    dual: &DualModel,
) -> Result<EstimateSeries, DualError> {
    let n = readouts_z.len();
    let unitary = rabi_unitary(dual.omega, dual.dt());

    // forward: what the z observer believes the state is at each x coupling
    let mut states = Vec::with_capacity(n);
    let mut state = *initial;
    for &r_z in readouts_z {
        state = state.evolve(&unitary);
        states.push(state);
        state = dual.model_z.update_state(&state, r_z)?;
    }

    let effects = x_prediction_effects(readouts_z, None, &dual.model_z, None, &unitary)?;

    Ok(assemble_series(
        &states,
        &effects,
        &Observable::x(),
        &dual.model_x,
    ))
}

/// Relative MSE of the three x estimators against the x readout, all
/// referenced to the omniscient expectation value.
#[derive(Clone, Copy, Debug)]
pub struct DualComparison {
    /// `Q(x^Z, x)`: ignorant expectation vs omniscient expectation.
    pub q_ignorant_expectation: f64,
    /// `Q(x_S^Z, x)`: ignorant smoothed estimate vs omniscient expectation.
    pub q_ignorant_smoothed: f64,
    /// `Q(x_S, x)`: omniscient smoothed estimate vs omniscient expectation.
    pub q_omniscient_smoothed: f64,
    pub anomalous_count: usize,
}

/// Runs both estimate pipelines on one record and scores them against the
/// x readout.
pub fn compare_dual_record(
    record: &DualRecord,
    dual: &DualModel,
) -> Result<DualComparison, DualError> {
    let omniscient = omniscient_estimates(record, dual)?;
    let ignorant = ignorant_estimates(record, dual)?;
    let reference = &omniscient.expectation;
    Ok(DualComparison {
        q_ignorant_expectation: relative_mse(&record.readouts_x, &ignorant.expectation, reference)?,
        q_ignorant_smoothed: relative_mse(&record.readouts_x, &ignorant.smoothed, reference)?,
        q_omniscient_smoothed: relative_mse(&record.readouts_x, &omniscient.smoothed, reference)?,
        anomalous_count: omniscient.anomalous_count() + ignorant.anomalous_count(),
    })
}

/// Positive-Q fractions for the three estimators at one monitoring-strength
/// ratio.
#[derive(Clone, Copy, Debug)]
pub struct SweepRow {
    pub ratio: f64,
    pub frac_ignorant_expectation: f64,
    pub frac_ignorant_smoothed: f64,
    pub frac_omniscient_smoothed: f64,
    pub realizations: usize,
}

/// Monte Carlo sweep over the relative monitoring strength `tau_x / tau_z`.
/// Trajectory streams are derived from the realization index alone, so the
/// sweep reuses common random numbers across ratios.
pub fn sweep_ratio(
    dual_base: &DualModel,
    initial: &QubitState,
    ratios: &[f64],
    realizations: usize,
    master_seed: u64,
) -> Result<Vec<SweepRow>, DualError> {
    for &ratio in ratios {
        if !(ratio > 1.0) {
            return Err(DualError::InvalidModel(format!(
                "sweep ratios must exceed 1, got {ratio}"
            )));
        }
    }
    let mut rows = Vec::with_capacity(ratios.len());
    for &ratio in ratios {
        let dual = dual_base.with_ratio(ratio)?;
        let comparisons =
            crate::ensemble::run_dual_ensemble(&dual, initial, realizations, master_seed)?;
        let frac = |f: fn(&DualComparison) -> f64| {
            comparisons.iter().filter(|c| f(c) > 0.0).count() as f64 / realizations as f64
        };
        rows.push(SweepRow {
            ratio,
            frac_ignorant_expectation: frac(|c| c.q_ignorant_expectation),
            frac_ignorant_smoothed: frac(|c| c.q_ignorant_smoothed),
            frac_omniscient_smoothed: frac(|c| c.q_omniscient_smoothed),
            realizations,
        });
    }
    Ok(rows)
}
