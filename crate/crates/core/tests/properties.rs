//! Property tests over randomized inputs.

mod common;

use proptest::prelude::*;
use qubit_smoothing::algebra::{rabi_unitary, Axis, ComplexMatrix2, Observable, QubitState};
use qubit_smoothing::measurement::MeasurementModel;
use qubit_smoothing::metrics::{mse, relative_mse};
use qubit_smoothing::smoother::{
    second_order_term, smoothed_estimate, smoothed_pdf, weak_value, BidirectionalPoint,
};

fn bloch_vector() -> impl Strategy<Value = [f64; 3]> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, 1e-3f64..0.999).prop_map(|(x, y, z, radius)| {
        let norm = (x * x + y * y + z * z).sqrt().max(1e-9);
        [radius * x / norm, radius * y / norm, radius * z / norm]
    })
}

fn axis() -> impl Strategy<Value = Axis> {
    prop_oneof![Just(Axis::X), Just(Axis::Y), Just(Axis::Z)]
}

fn psd_effect() -> impl Strategy<Value = ComplexMatrix2> {
    proptest::array::uniform8(-1.0f64..1.0).prop_map(|v| {
        let b = ComplexMatrix2::new(
            num_complex::Complex64::new(v[0], v[1]),
            num_complex::Complex64::new(v[2], v[3]),
            num_complex::Complex64::new(v[4], v[5]),
            num_complex::Complex64::new(v[6], v[7]),
        );
        let psd = (b * b.adjoint()).hermitian_part();
        let (_, high) = psd.hermitian_eigenvalues();
        psd.scale(1.0 / high.max(1e-12))
    })
}

proptest! {
    #[test]
    fn unitaries_are_unitary(omega in -40.0f64..40.0, dt in 1e-6f64..2.0) {
        let u = rabi_unitary(omega, dt);
        let defect = (u.adjoint() * u - ComplexMatrix2::IDENTITY).max_abs_entry();
        prop_assert!(defect < 1e-12);
    }

    #[test]
    fn evolution_preserves_state_invariants(
        bloch in bloch_vector(),
        omega in -20.0f64..20.0,
        dt in 1e-4f64..1.0,
    ) {
        let state = QubitState::from_bloch(bloch[0], bloch[1], bloch[2]).unwrap();
        let evolved = state.evolve(&rabi_unitary(omega, dt));
        prop_assert!(evolved.validate().is_ok());
        // rotation about y preserves the Bloch norm
        let (x0, y0, z0) = state.bloch();
        let (x1, y1, z1) = evolved.bloch();
        let n0 = (x0 * x0 + y0 * y0 + z0 * z0).sqrt();
        let n1 = (x1 * x1 + y1 * y1 + z1 * z1).sqrt();
        prop_assert!((n0 - n1).abs() < 1e-12);
    }

    #[test]
    fn updates_keep_states_valid_and_expectations_bounded(
        bloch in bloch_vector(),
        ax in axis(),
        r in -8.0f64..8.0,
        dt in 1e-3f64..0.5,
        tau in 1e-2f64..4.0,
    ) {
        let model = MeasurementModel::new(dt, tau, Observable::new(ax)).unwrap();
        let state = QubitState::from_bloch(bloch[0], bloch[1], bloch[2]).unwrap();
        let next = model.update_state(&state, r).unwrap();
        prop_assert!(next.validate().is_ok());
        for obs in [Observable::x(), Observable::y(), Observable::z()] {
            let e = next.expectation(&obs);
            prop_assert!(e.abs() <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn conditioned_quantities_are_scale_invariant(
        bloch in bloch_vector(),
        effect in psd_effect(),
        scale in 1e-6f64..1e6,
        dt in 1e-3f64..0.5,
        tau in 1e-2f64..4.0,
    ) {
        let state = QubitState::from_bloch(bloch[0], bloch[1], bloch[2]).unwrap();
        let model = MeasurementModel::new(dt, tau, Observable::z()).unwrap();
        let (a, flagged_a) = BidirectionalPoint::new_guarded(state, effect);
        let (b, flagged_b) = BidirectionalPoint::new_guarded(state, effect.scale(scale));
        prop_assume!(!flagged_a && !flagged_b);
        let obs = model.obs();
        prop_assert!((weak_value(&a, obs) - weak_value(&b, obs)).abs() < 1e-9);
        prop_assert!((second_order_term(&a, obs) - second_order_term(&b, obs)).abs() < 1e-9);
        let s_a = smoothed_estimate(weak_value(&a, obs), second_order_term(&a, obs), &model).unwrap();
        let s_b = smoothed_estimate(weak_value(&b, obs), second_order_term(&b, obs), &model).unwrap();
        prop_assert!((s_a - s_b).abs() < 1e-9);
    }

    #[test]
    fn identity_future_reduces_to_predictive_density(
        bloch in bloch_vector(),
        r in -12.0f64..12.0,
        dt in 1e-3f64..0.5,
        tau in 1e-2f64..4.0,
    ) {
        let state = QubitState::from_bloch(bloch[0], bloch[1], bloch[2]).unwrap();
        let model = MeasurementModel::new(dt, tau, Observable::z()).unwrap();
        let point = BidirectionalPoint::new(state, ComplexMatrix2::IDENTITY).unwrap();
        let z = state.expectation(model.obs());
        prop_assert!((smoothed_pdf(r, &point, &model) - model.predictive_pdf(r, z)).abs() < 1e-12);
    }

    #[test]
    fn smoothed_density_is_nonnegative(
        bloch in bloch_vector(),
        effect in psd_effect(),
        r in -20.0f64..20.0,
        dt in 1e-3f64..0.5,
        tau in 1e-2f64..4.0,
    ) {
        let state = QubitState::from_bloch(bloch[0], bloch[1], bloch[2]).unwrap();
        let model = MeasurementModel::new(dt, tau, Observable::z()).unwrap();
        let (point, _) = BidirectionalPoint::new_guarded(state, effect);
        prop_assert!(smoothed_pdf(r, &point, &model) >= 0.0);
    }

    #[test]
    fn relative_mse_is_exact_reconstruction(
        values in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0), 2..64),
    ) {
        let readout: Vec<f64> = values.iter().map(|v| v.0).collect();
        let alt: Vec<f64> = values.iter().map(|v| v.1).collect();
        let reference: Vec<f64> = values.iter().map(|v| v.2).collect();
        let mse_alt = mse(&readout, &alt).unwrap();
        prop_assume!(mse_alt > 0.0);
        let q = relative_mse(&readout, &alt, &reference).unwrap();
        let expected = (mse(&readout, &reference).unwrap() - mse_alt) / mse_alt;
        prop_assert!((q - expected).abs() < 1e-12);
    }
}
