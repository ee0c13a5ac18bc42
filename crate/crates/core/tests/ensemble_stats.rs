//! Ensemble-level statistical behavior beyond the acceptance gates.

mod common;

use common::mean;
use qubit_smoothing::algebra::{Observable, QubitState};
use qubit_smoothing::dual::{sweep_ratio, DualModel};
use qubit_smoothing::ensemble::run_ensemble;
use qubit_smoothing::measurement::MeasurementModel;

const TAU_RABI: f64 = std::f64::consts::TAU;

#[test]
fn ignorant_smoothed_fraction_grows_with_monitoring_ratio() {
    // the weaker the x monitor relative to z, the more reliably the ignorant
    // smoothed estimate beats the omniscient expectation value
    let base = DualModel::new(TAU_RABI, 0.01, 0.1, 0.2, 2_000).unwrap();
    let initial = QubitState::maximally_mixed();
    let rows = sweep_ratio(&base, &initial, &[3.0, 8.0, 25.0], 300, 11).unwrap();
    for pair in rows.windows(2) {
        assert!(
            pair[1].frac_ignorant_smoothed > pair[0].frac_ignorant_smoothed,
            "fraction did not grow: {} at ratio {} vs {} at ratio {}",
            pair[0].frac_ignorant_smoothed,
            pair[0].ratio,
            pair[1].frac_ignorant_smoothed,
            pair[1].ratio
        );
    }
}

#[test]
fn mean_q_does_not_shift_with_duration_beyond_the_boundary() {
    // Q is normalized per unit time, so for T >> tau its ensemble mean is
    // duration-independent. The strong regime satisfies T >> tau at both
    // durations; in the weak regime tau = 2 makes the trailing smoothing
    // boundary a large fraction of T = 5, which depresses the short-run mean.
    let initial = QubitState::maximally_mixed();
    let model = MeasurementModel::new(0.01, 0.1, Observable::z()).unwrap();
    let run = |steps: usize| {
        let results = run_ensemble(&initial, TAU_RABI, &model, steps, 1_000, 17).unwrap();
        mean(&results.iter().map(|c| c.q).collect::<Vec<_>>())
    };
    let short = run(500);
    let long = run(5_000);
    let shift = (short - long).abs() / long.abs();
    assert!(
        shift < 0.1,
        "mean Q shifted {:.1}% between T = 5 and T = 50",
        100.0 * shift
    );
}
