//! Forward causal evolution and backward accumulation of future effects.
//!
//! Each step applies the drive unitary first and measures second. The state
//! recorded for step `j` is therefore the post-unitary, pre-measurement state:
//! the readout `r_j` is sampled from exactly that state, and the smoothed
//! distribution for `r_j` later pairs it with the effect operator summarizing
//! the strictly later outcomes. The same pairing convention is used by
//! [`backward_pass`], which accumulates
//!
//! ```text
//! E[N-1] = I,    E[j-1] = U^dag M_{r_j}^dag E[j] M_{r_j} U
//! ```
//!
//! rescaling each effect to unit maximum eigenvalue and tracking the factors
//! in log domain; the raw products pick up a factor `(dt/2 pi tau)^(1/2)` per
//! step and would underflow after a few thousand steps.

use crate::algebra::{rabi_unitary, ComplexMatrix2, QubitState};
use crate::measurement::{MeasurementError, MeasurementModel};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error(transparent)]
    Measurement(#[from] MeasurementError),
    #[error("future effect trace {trace:.3e} fell below the underflow guard at step {step}")]
    EffectUnderflow { step: usize, trace: f64 },
}

/// One realized monitoring run: the readouts and the filtered states that
/// generated them, one pair per step.
#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub model: MeasurementModel,
    pub omega: f64,
    pub initial_state: QubitState,
    /// Readout of each step, sampled at times `t_j = j dt` for `j = 1..=N`.
    pub readouts: Vec<f64>,
    /// State just before measurement `j` (after that step's unitary).
    pub forward_states: Vec<QubitState>,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.readouts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.readouts.is_empty()
    }

    /// Measurement times `t_j = j dt`, `j = 1..=N`.
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        let dt = self.model.dt();
        (1..=self.len()).map(move |j| j as f64 * dt)
    }
}

/// Future POVM elements for every step, rescaled to unit maximum eigenvalue.
///
/// `effects[j]` summarizes the outcomes strictly after step `j`; the discarded
/// scale factors accumulate in `log_norms` (`true effect = exp(log_norm) *
/// stored effect`). The final entry is the identity: an empty future carries
/// no information.
#[derive(Clone, Debug)]
pub struct EffectSeries {
    pub effects: Vec<ComplexMatrix2>,
    pub log_norms: Vec<f64>,
}

impl EffectSeries {
    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }
}

/// Runs `steps` rounds of unitary-then-measure from `initial`, driven by the
/// supplied random stream. Deterministic given the stream.
pub fn forward_pass<R: Rng + ?Sized>(
    initial: &QubitState,
    omega: f64,
    model: &MeasurementModel,
    steps: usize,
    rng: &mut R,
) -> Result<TrajectoryRecord, TrajectoryError> {
    assert!(steps >= 1, "a trajectory needs at least one step");
    let unitary = rabi_unitary(omega, model.dt());
    let mut readouts = Vec::with_capacity(steps);
    let mut forward_states = Vec::with_capacity(steps);
    let mut state = *initial;
    for _ in 0..steps {
        state = state.evolve(&unitary);
        forward_states.push(state);
        let r = model.sample_readout(&state, rng);
        readouts.push(r);
        state = model.update_state(&state, r)?;
    }
    Ok(TrajectoryRecord {
        model: *model,
        omega,
        initial_state: *initial,
        readouts,
        forward_states,
    })
}

/// Accumulates the future effect operator for every step of a record, last
/// step first.
pub fn backward_pass(record: &TrajectoryRecord) -> Result<EffectSeries, TrajectoryError> {
    let n = record.len();
    assert!(n >= 1, "a record needs at least one step");
    let unitary = rabi_unitary(record.omega, record.model.dt());
    let mut effects = vec![ComplexMatrix2::IDENTITY; n];
    let mut log_norms = vec![0.0; n];
    let mut current = ComplexMatrix2::IDENTITY;
    let mut log_norm = 0.0;
    for j in (1..n).rev() {
        // absorb measurement j and its preceding unitary: w = M_{r_j} U
        let w = record.model.make_kraus(record.readouts[j]) * unitary;
        let raw = ((w.adjoint() * current) * w).hermitian_part();
        let trace = raw.trace().re;
        if !(trace > crate::measurement::UPDATE_UNDERFLOW_GUARD) {
            return Err(TrajectoryError::EffectUnderflow { step: j, trace });
        }
        let (_, high) = raw.hermitian_eigenvalues();
        current = raw.scale(1.0 / high);
        log_norm += high.ln();
        effects[j - 1] = current;
        log_norms[j - 1] = log_norm;
    }
    Ok(EffectSeries { effects, log_norms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Axis, Observable};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TAU_RABI: f64 = std::f64::consts::TAU;

    fn model(dt: f64, tau: f64) -> MeasurementModel {
        MeasurementModel::new(dt, tau, Observable::z()).unwrap()
    }

    #[test]
    fn undriven_eigenstate_stays_pinned() {
        let m = model(0.05, 0.5);
        let up = QubitState::eigenstate(Axis::Z, true);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let record = forward_pass(&up, 0.0, &m, 400, &mut rng).unwrap();
        for state in &record.forward_states {
            assert!((state.expectation(&Observable::z()) - 1.0).abs() < 1e-10);
        }
        // readouts are i.i.d. Gaussian around +1 with variance tau/dt
        let mean = record.readouts.iter().sum::<f64>() / record.len() as f64;
        let se = (m.variance() / record.len() as f64).sqrt();
        assert!((mean - 1.0).abs() < 5.0 * se);
    }

    #[test]
    fn vanishing_measurement_recovers_rabi_rotation() {
        let dt = 0.01;
        let m = model(dt, 1e12);
        let up = QubitState::eigenstate(Axis::Z, true);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let record = forward_pass(&up, TAU_RABI, &m, 200, &mut rng).unwrap();
        for (j, state) in record.forward_states.iter().enumerate() {
            let t = (j + 1) as f64 * dt;
            let expected = (TAU_RABI * t).cos();
            assert!(
                (state.expectation(&Observable::z()) - expected).abs() < 1e-5,
                "step {j}"
            );
        }
    }

    #[test]
    fn zeno_regime_shows_jump_plateaus() {
        // tau = T_R / 10 over 20 Rabi periods: the state distribution is
        // bimodal at the eigenvalues, both signs are visited, and the
        // time-averaged readout reaches plateaus of either sign.
        let dt = 0.01;
        let m = model(dt, 0.1);
        let up = QubitState::eigenstate(Axis::Z, true);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let record = forward_pass(&up, TAU_RABI, &m, 2_000, &mut rng).unwrap();
        let n = record.len() as f64;
        let z: Vec<f64> = record
            .forward_states
            .iter()
            .map(|s| s.expectation(&Observable::z()))
            .collect();
        let frac = |pred: &dyn Fn(f64) -> bool| z.iter().filter(|&&v| pred(v)).count() as f64 / n;
        let near_plus = frac(&|v| v > 0.9);
        let near_minus = frac(&|v| v < -0.9);
        let middle = frac(&|v| v.abs() < 0.3);
        assert!(near_plus > 0.05, "plateau at +1 missing ({near_plus})");
        assert!(near_minus > 0.05, "plateau at -1 missing ({near_minus})");
        assert!(
            near_plus + near_minus > 2.0 * middle,
            "not bimodal: {near_plus} + {near_minus} vs middle {middle}"
        );

        // readout averaged over half a Rabi period tracks the plateaus
        let window = 50;
        let averages: Vec<f64> = record
            .readouts
            .windows(window)
            .map(|w| w.iter().sum::<f64>() / window as f64)
            .collect();
        assert!(averages.iter().any(|&a| a > 0.5));
        assert!(averages.iter().any(|&a| a < -0.5));
    }

    #[test]
    fn forward_pass_is_self_consistent() {
        let m = model(0.05, 0.4);
        let initial = QubitState::from_bloch(0.2, -0.1, 0.6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let record = forward_pass(&initial, TAU_RABI, &m, 300, &mut rng).unwrap();
        let unitary = rabi_unitary(TAU_RABI, m.dt());
        let mut state = initial;
        for j in 0..record.len() {
            state = state.evolve(&unitary);
            let diff = (*state.matrix() - *record.forward_states[j].matrix()).max_abs_entry();
            assert!(diff < 1e-10, "step {j}: {diff}");
            state = m.update_state(&state, record.readouts[j]).unwrap();
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let m = model(0.02, 1.5);
        let initial = QubitState::eigenstate(Axis::Z, true);
        let mut rng_a = ChaCha8Rng::seed_from_u64(77);
        let mut rng_b = ChaCha8Rng::seed_from_u64(77);
        let a = forward_pass(&initial, TAU_RABI, &m, 100, &mut rng_a).unwrap();
        let b = forward_pass(&initial, TAU_RABI, &m, 100, &mut rng_b).unwrap();
        assert_eq!(a.readouts, b.readouts);
    }

    #[test]
    fn single_step_effect_is_identity() {
        let m = model(0.1, 1.0);
        let initial = QubitState::eigenstate(Axis::Z, true);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let record = forward_pass(&initial, TAU_RABI, &m, 1, &mut rng).unwrap();
        let effects = backward_pass(&record).unwrap();
        assert_eq!(effects.len(), 1);
        let diff = (effects.effects[0] - ComplexMatrix2::IDENTITY).max_abs_entry();
        assert!(diff < 1e-15);
        assert_eq!(effects.log_norms[0], 0.0);
    }

    #[test]
    fn symmetric_readouts_give_uninformative_effects() {
        // omega = 0 and r = 0 everywhere: every effect proportional to identity
        let m = model(0.1, 1.0);
        let record = TrajectoryRecord {
            model: m,
            omega: 0.0,
            initial_state: QubitState::maximally_mixed(),
            readouts: vec![0.0; 6],
            forward_states: vec![QubitState::maximally_mixed(); 6],
        };
        let effects = backward_pass(&record).unwrap();
        for e in &effects.effects {
            assert!((e.entries[0].re - e.entries[3].re).abs() < 1e-12);
            assert!(e.entries[1].norm() < 1e-12);
        }
    }

    #[test]
    fn absurd_readouts_underflow_the_backward_pass() {
        let m = model(1.0, 1e-4);
        let record = TrajectoryRecord {
            model: m,
            omega: 0.0,
            initial_state: QubitState::maximally_mixed(),
            readouts: vec![100.0, 100.0],
            forward_states: vec![QubitState::maximally_mixed(); 2],
        };
        assert!(matches!(
            backward_pass(&record),
            Err(TrajectoryError::EffectUnderflow { .. })
        ));
    }

    #[test]
    fn effects_are_hermitian_psd_and_scaled() {
        let m = model(0.05, 0.2);
        let initial = QubitState::from_bloch(0.3, 0.0, -0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let record = forward_pass(&initial, TAU_RABI, &m, 500, &mut rng).unwrap();
        let effects = backward_pass(&record).unwrap();
        for (j, e) in effects.effects.iter().enumerate() {
            assert!(e.hermiticity_defect() < 1e-12, "step {j}");
            let (lo, hi) = e.hermitian_eigenvalues();
            assert!(lo >= -1e-12, "step {j}: low eigenvalue {lo}");
            assert!((0.5..=2.0).contains(&hi), "step {j}: high eigenvalue {hi}");
        }
    }
}
