//! Monte Carlo ensembles with deterministic per-trajectory streams.
//!
//! Every realization draws from its own counter-based random stream, derived
//! from the master seed and the realization index alone. Trajectories fan out
//! across a rayon pool and are gathered back in index order, so ensemble
//! output is bit-identical for a given master seed no matter how many worker
//! threads run.

use crate::algebra::QubitState;
use crate::dual::{compare_dual_record, dual_forward_pass, DualComparison, DualError, DualModel};
use crate::measurement::MeasurementModel;
use crate::metrics::{compare_record, ComparisonResult, MetricsError};
use crate::smoother::smooth_series;
use crate::trajectory::{backward_pass, forward_pass, TrajectoryError};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Dual(#[from] DualError),
}

/// The random stream for one trajectory: ChaCha keyed by the master seed with
/// the realization index as the stream counter.
pub fn trajectory_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Full single-observer pipeline for one realization: forward pass, backward
/// pass, smoothing, and the estimate comparison.
pub fn run_realization(
    initial: &QubitState,
    omega: f64,
    model: &MeasurementModel,
    steps: usize,
    master_seed: u64,
    index: u64,
) -> Result<ComparisonResult, EnsembleError> {
    let mut rng = trajectory_rng(master_seed, index);
    let record = forward_pass(initial, omega, model, steps, &mut rng)?;
    let effects = backward_pass(&record)?;
    let series = smooth_series(&record, &effects, model.obs());
    Ok(compare_record(&record, &effects, &series)?)
}

/// Runs `realizations` independent single-observer trajectories in parallel.
pub fn run_ensemble(
    initial: &QubitState,
    omega: f64,
    model: &MeasurementModel,
    steps: usize,
    realizations: usize,
    master_seed: u64,
) -> Result<Vec<ComparisonResult>, EnsembleError> {
    (0..realizations)
        .into_par_iter()
        .map(|i| run_realization(initial, omega, model, steps, master_seed, i as u64))
        .collect()
}

/// Runs `realizations` independent dual-observer trajectories in parallel.
pub fn run_dual_ensemble(
    dual: &DualModel,
    initial: &QubitState,
    realizations: usize,
    master_seed: u64,
) -> Result<Vec<DualComparison>, DualError> {
    (0..realizations)
        .into_par_iter()
        .map(|i| {
            let mut rng = trajectory_rng(master_seed, i as u64);
            let record = dual_forward_pass(initial, dual, &mut rng)?;
            compare_dual_record(&record, dual)
        })
        .collect()
}

/// Fraction of strictly positive values.
pub fn positive_fraction<'a>(values: impl IntoIterator<Item = &'a f64>) -> f64 {
    let mut total = 0usize;
    let mut positive = 0usize;
    for &v in values {
        total += 1;
        if v > 0.0 {
            positive += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        positive as f64 / total as f64
    }
}

pub fn mean<'a>(values: impl IntoIterator<Item = &'a f64>) -> f64 {
    let mut total = 0.0;
    let mut count = 0usize;
    for &v in values {
        total += v;
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        total / count as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Axis, Observable};

    const TAU_RABI: f64 = std::f64::consts::TAU;

    #[test]
    fn streams_are_independent_of_each_other() {
        use rand::Rng;
        let mut a = trajectory_rng(42, 0);
        let mut b = trajectory_rng(42, 1);
        let xs: Vec<u64> = (0..8).map(|_| a.random()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.random()).collect();
        assert_ne!(xs, ys);

        let mut a2 = trajectory_rng(42, 0);
        let xs2: Vec<u64> = (0..8).map(|_| a2.random()).collect();
        assert_eq!(xs, xs2);
    }

    #[test]
    fn ensemble_is_identical_across_thread_counts() {
        let model = MeasurementModel::new(0.02, 0.5, Observable::z()).unwrap();
        let initial = QubitState::eigenstate(Axis::Z, true);

        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| run_ensemble(&initial, TAU_RABI, &model, 80, 64, 123).unwrap())
        };

        let one = run(1);
        let four = run(4);
        assert_eq!(one.len(), four.len());
        for (a, b) in one.iter().zip(&four) {
            assert_eq!(a.q.to_bits(), b.q.to_bits());
            assert_eq!(a.ln_r.to_bits(), b.ln_r.to_bits());
        }
    }

    #[test]
    fn fraction_and_mean_helpers() {
        let values = [1.0, -2.0, 3.0, 0.0];
        assert_eq!(positive_fraction(&values), 0.5);
        assert_eq!(mean(&values), 0.5);
        assert_eq!(positive_fraction(&[]), 0.0);
    }
}
