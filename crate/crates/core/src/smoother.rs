//! Record-conditioned (smoothed) observable estimates.
//!
//! At an intermediate step the record splits into past outcomes, absorbed
//! into the filtered state `rho`, and future outcomes, absorbed into a
//! positive effect operator `E`. Conditioning the step's readout on both
//! sides yields a distribution characterized by two scalars,
//!
//! ```text
//! weak value     w = Re[ tr(E O rho) / tr(E rho) ]
//! second order   c =     tr(E O rho O) / tr(E rho)
//! ```
//!
//! and the smoothed estimate
//!
//! ```text
//! s = w / ( (1 + k)/2 + (1 - k)/2 * c ),      k = exp(-dt/2 tau).
//! ```
//!
//! Unlike an expectation value, `w` (and hence `s`) may leave the eigenvalue
//! range `[-1, 1]` when the past and future conditions are nearly orthogonal.
//! The conditioned readout density is the three-component mixture
//!
//! ```text
//! P_S(r) = [ (G_1 - G_-1) w + (G_1 + G_-1 + 2k G_0)/2
//!                           + (G_1 + G_-1 - 2k G_0)/2 * c ] / D,
//! D      = (1 + k) + (1 - k) c,
//! ```
//!
//! whose first moment is exactly `s`. With a trivial future (`E = I`) the
//! whole machinery collapses to the predictive distribution: `w = z`, `c = 1`,
//! `D = 2`.

use crate::algebra::{ComplexMatrix2, Observable, QubitState};
use crate::measurement::MeasurementModel;
use crate::trajectory::{EffectSeries, TrajectoryRecord};
use thiserror::Error;

/// Overlaps below `RELATIVE_OVERLAP_FLOOR * |E|_F * |rho|_F` count as
/// anomalous: the past and future conditions are numerically orthogonal and
/// the conditioned ratios diverge. Effects are rescaled en route, so only a
/// relative threshold is meaningful.
pub const RELATIVE_OVERLAP_FLOOR: f64 = 1e-12;

/// Guard on the smoothed-estimate denominator. Not reachable from positive
/// semidefinite pairs (the second-order term is nonnegative there), but the
/// scalar entry points accept arbitrary values.
pub const DENOMINATOR_GUARD: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SmootherError {
    #[error("near-orthogonal past/future: overlap {overlap:.3e} below floor {floor:.3e}")]
    AnomalousOverlap { overlap: f64, floor: f64 },
    #[error("smoothed-estimate denominator {denominator:.3e} below guard")]
    DegenerateDenominator { denominator: f64 },
}

/// A filtered state paired with the effect operator for its future, plus
/// their overlap `tr(E rho)`.
#[derive(Clone, Copy, Debug)]
pub struct BidirectionalPoint {
    pub past_state: QubitState,
    pub future_effect: ComplexMatrix2,
    pub overlap: f64,
}

impl BidirectionalPoint {
    /// Pairs a state with a future effect, rejecting near-orthogonal pairs.
    pub fn new(
        past_state: QubitState,
        future_effect: ComplexMatrix2,
    ) -> Result<Self, SmootherError> {
        let overlap = future_effect.trace_product(past_state.matrix()).re;
        let floor = overlap_floor(&past_state, &future_effect);
        if overlap < floor {
            return Err(SmootherError::AnomalousOverlap { overlap, floor });
        }
        Ok(Self {
            past_state,
            future_effect,
            overlap,
        })
    }

    /// Like [`BidirectionalPoint::new`] but clamps a near-zero overlap to the
    /// floor instead of failing, reporting whether it had to. Series assembly
    /// uses this so that ensembles never lose realizations silently.
    pub fn new_guarded(past_state: QubitState, future_effect: ComplexMatrix2) -> (Self, bool) {
        let overlap = future_effect.trace_product(past_state.matrix()).re;
        let floor = overlap_floor(&past_state, &future_effect);
        let anomalous = overlap < floor;
        (
            Self {
                past_state,
                future_effect,
                overlap: overlap.max(floor),
            },
            anomalous,
        )
    }
}

fn overlap_floor(state: &QubitState, effect: &ComplexMatrix2) -> f64 {
    RELATIVE_OVERLAP_FLOOR * effect.frobenius_norm() * state.matrix().frobenius_norm()
}

/// `Re[tr(E O rho) / tr(E rho)]`: the first-order conditioned mean of the
/// observable. Reduces to the expectation value for `E = I` and is invariant
/// under rescaling of the effect.
pub fn weak_value(point: &BidirectionalPoint, obs: &Observable) -> f64 {
    let numerator = (point.future_effect * *obs.matrix()).trace_product(point.past_state.matrix());
    numerator.re / point.overlap
}

/// `tr(E O rho O) / tr(E rho)`: the backaction-conjugated second-order term.
/// Real by construction (a trace of a product of two Hermitian operators);
/// the imaginary round-off residue is asserted small and dropped.
pub fn second_order_term(point: &BidirectionalPoint, obs: &Observable) -> f64 {
    let conjugated = (*obs.matrix() * *point.past_state.matrix()) * *obs.matrix();
    let numerator = point.future_effect.trace_product(&conjugated);
    assert!(
        numerator.im.abs() < 1e-10,
        "second-order trace has imaginary residue {:.3e}",
        numerator.im
    );
    numerator.re / point.overlap
}

/// Denominator of the smoothed estimate: `(1 + k)/2 + (1 - k)/2 * c` with
/// `k = exp(-dt/2 tau)`. Equals 1 when `c = 1` and tends to 1 as `dt -> 0`.
#[inline]
pub fn smoothed_denominator(second_order: f64, model: &MeasurementModel) -> f64 {
    let k = model.coherence_decay();
    0.5 * (1.0 + k) + 0.5 * (1.0 - k) * second_order
}

/// Smoothed estimate from the two conditioned scalars. Converges to the weak
/// value as `dt/tau -> 0`.
pub fn smoothed_estimate(
    weak: f64,
    second_order: f64,
    model: &MeasurementModel,
) -> Result<f64, SmootherError> {
    let denominator = smoothed_denominator(second_order, model);
    if denominator < DENOMINATOR_GUARD {
        return Err(SmootherError::DegenerateDenominator { denominator });
    }
    Ok(weak / denominator)
}

/// Conditioned readout density at `r` for a bidirectional point; nonnegative.
pub fn smoothed_pdf(r: f64, point: &BidirectionalPoint, model: &MeasurementModel) -> f64 {
    let w = weak_value(point, model.obs());
    let c = second_order_term(point, model.obs());
    smoothed_pdf_from_terms(r, w, c, model)
}

/// Density evaluated directly from the conditioned scalars.
pub fn smoothed_pdf_from_terms(
    r: f64,
    weak: f64,
    second_order: f64,
    model: &MeasurementModel,
) -> f64 {
    let k = model.coherence_decay();
    let g_plus = model.gaussian_component(r, 1.0);
    let g_minus = model.gaussian_component(r, -1.0);
    let g_zero = model.gaussian_component(r, 0.0);
    let numerator = (g_plus - g_minus) * weak
        + 0.5 * (g_plus + g_minus + 2.0 * k * g_zero)
        + 0.5 * (g_plus + g_minus - 2.0 * k * g_zero) * second_order;
    let denominator = (1.0 + k) + (1.0 - k) * second_order;
    (numerator / denominator).max(0.0)
}

/// `ln smoothed_pdf`, with the Gaussian normalization and the dominant
/// exponent factored out so that accumulated log likelihoods stay finite.
pub fn smoothed_log_pdf(r: f64, weak: f64, second_order: f64, model: &MeasurementModel) -> f64 {
    let k = model.coherence_decay();
    let scale = model.dt() / (2.0 * model.tau());
    let e_plus = -(r - 1.0) * (r - 1.0) * scale;
    let e_minus = -(r + 1.0) * (r + 1.0) * scale;
    let e_zero = -r * r * scale;
    let m = e_plus.max(e_minus).max(e_zero);
    let g_plus = (e_plus - m).exp();
    let g_minus = (e_minus - m).exp();
    let g_zero = (e_zero - m).exp();
    let numerator = (g_plus - g_minus) * weak
        + 0.5 * (g_plus + g_minus + 2.0 * k * g_zero)
        + 0.5 * (g_plus + g_minus - 2.0 * k * g_zero) * second_order;
    let denominator = (1.0 + k) + (1.0 - k) * second_order;
    numerator.max(f64::MIN_POSITIVE).ln() + m + model.log_gaussian_norm() - denominator.ln()
}

/// First three moments of the conditioned readout distribution:
/// `(s, tau/dt + (1 + c)/2 / denom, (1 + 3 tau/dt) s)`.
pub fn smoothed_moments(point: &BidirectionalPoint, model: &MeasurementModel) -> (f64, f64, f64) {
    let w = weak_value(point, model.obs());
    let c = second_order_term(point, model.obs());
    let denom = smoothed_denominator(c, model);
    let m1 = w / denom;
    let m2 = model.variance() + 0.5 * (1.0 + c) / denom;
    let m3 = (1.0 + 3.0 * model.variance()) * m1;
    (m1, m2, m3)
}

/// Time-indexed estimates along one trajectory. The same shape carries
/// z-estimates in the single-observer scenario and x-estimates in the dual
/// one.
#[derive(Clone, Debug)]
pub struct EstimateSeries {
    pub times: Vec<f64>,
    /// Expectation value in the filtered state at each step.
    pub expectation: Vec<f64>,
    /// First-order conditioned mean; may leave `[-1, 1]`.
    pub weak_value: Vec<f64>,
    /// Second-order conditioned term.
    pub second_order: Vec<f64>,
    /// Smoothed estimate.
    pub smoothed: Vec<f64>,
    /// Steps where the past/future overlap (or the denominator) had to be
    /// clamped; values are carried as guarded ratios, never dropped.
    pub anomalous: Vec<bool>,
}

impl EstimateSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn anomalous_count(&self) -> usize {
        self.anomalous.iter().filter(|&&flag| flag).count()
    }
}

/// Pairs each filtered state with its future effect and emits the full
/// estimate series for the record's own observable and measurement model.
pub fn smooth_series(
    record: &TrajectoryRecord,
    effects: &EffectSeries,
    obs: &Observable,
) -> EstimateSeries {
    assert_eq!(
        record.len(),
        effects.len(),
        "record and effect series must be aligned"
    );
    assemble_series(&record.forward_states, &effects.effects, obs, &record.model)
}

/// Core assembly shared by the single- and dual-observer paths. The
/// `smoothing_model` supplies both the time step for the series and the
/// `dt/tau` entering the smoothed-estimate denominator, which belongs to the
/// meter whose readout is being predicted.
pub fn assemble_series(
    states: &[QubitState],
    effects: &[ComplexMatrix2],
    obs: &Observable,
    smoothing_model: &MeasurementModel,
) -> EstimateSeries {
    assert_eq!(states.len(), effects.len());
    let n = states.len();
    let dt = smoothing_model.dt();
    let mut series = EstimateSeries {
        times: Vec::with_capacity(n),
        expectation: Vec::with_capacity(n),
        weak_value: Vec::with_capacity(n),
        second_order: Vec::with_capacity(n),
        smoothed: Vec::with_capacity(n),
        anomalous: Vec::with_capacity(n),
    };
    for j in 0..n {
        let (point, mut flagged) = BidirectionalPoint::new_guarded(states[j], effects[j]);
        let w = weak_value(&point, obs);
        let c = second_order_term(&point, obs);
        let mut denom = smoothed_denominator(c, smoothing_model);
        if denom < DENOMINATOR_GUARD {
            denom = DENOMINATOR_GUARD;
            flagged = true;
        }
        series.times.push((j + 1) as f64 * dt);
        series.expectation.push(states[j].expectation(obs));
        series.weak_value.push(w);
        series.second_order.push(c);
        series.smoothed.push(w / denom);
        series.anomalous.push(flagged);
    }
    series
}
