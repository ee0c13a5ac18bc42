//! Figures of merit comparing estimate series against a realized record.
//!
//! Two discriminators decide whether the smoothed estimate or the expectation
//! value better fits a noisy readout:
//!
//! ```text
//! Q    = ( MSE(r, reference) - MSE(r, alternative) ) / MSE(r, alternative)
//! ln R = sum_j [ ln P_smoothed(r_j) - ln P_predictive(r_j) ]
//! ```
//!
//! Both are positive exactly when the alternative (smoothed) series fits
//! better. In the continuum limit `(2 dt/T) ln R` approaches `Q`, which the
//! acceptance suite uses as a cross-check between the two. Likelihoods are
//! accumulated as log densities from the start; a product of `10^4` factors
//! of order `sqrt(dt/tau)` underflows long before an f64 does.

use crate::smoother::{smoothed_log_pdf, EstimateSeries};
use crate::trajectory::{EffectSeries, TrajectoryRecord};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("sequence lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("alternative estimate fits the readout exactly; relative error undefined")]
    DegenerateFit,
}

/// Per-realization comparison between a reference and an alternative
/// estimate of the same record.
#[derive(Clone, Copy, Debug)]
pub struct ComparisonResult {
    /// Relative mean squared error; positive when the alternative wins.
    pub q: f64,
    /// Log hypothesis ratio; positive when the alternative is more probable.
    pub ln_r: f64,
    /// MSE of the reference (expectation-value) series against the readout.
    pub mse_ref: f64,
    /// MSE of the alternative (smoothed) series against the readout.
    pub mse_alt: f64,
    pub n_steps: usize,
    pub anomalous_count: usize,
}

impl ComparisonResult {
    /// `(2 dt / T) ln R`, the scaling under which the hypothesis ratio
    /// becomes comparable to `Q`.
    pub fn scaled_ln_r(&self) -> f64 {
        2.0 * self.ln_r / self.n_steps as f64
    }
}

/// Mean of squared differences.
pub fn mse(a: &[f64], b: &[f64]) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(MetricsError::LengthMismatch { left: 0, right: 0 });
    }
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(sum / a.len() as f64)
}

/// `(MSE(r, reference) - MSE(r, alternative)) / MSE(r, alternative)`.
pub fn relative_mse(
    readout: &[f64],
    alternative: &[f64],
    reference: &[f64],
) -> Result<f64, MetricsError> {
    let mse_ref = mse(readout, reference)?;
    let mse_alt = mse(readout, alternative)?;
    if mse_alt == 0.0 {
        return Err(MetricsError::DegenerateFit);
    }
    Ok((mse_ref - mse_alt) / mse_alt)
}

/// Accumulated log ratio of the smoothed against the predictive readout
/// likelihood over a whole record. Anomalous steps enter with their guarded
/// values; the caller reads the count off the series.
pub fn log_hypothesis_ratio(
    record: &TrajectoryRecord,
    effects: &EffectSeries,
    series: &EstimateSeries,
) -> Result<f64, MetricsError> {
    if record.len() != effects.len() {
        return Err(MetricsError::LengthMismatch {
            left: record.len(),
            right: effects.len(),
        });
    }
    if record.len() != series.len() {
        return Err(MetricsError::LengthMismatch {
            left: record.len(),
            right: series.len(),
        });
    }
    let model = &record.model;
    let mut total = 0.0;
    for j in 0..record.len() {
        let r = record.readouts[j];
        total += smoothed_log_pdf(r, series.weak_value[j], series.second_order[j], model)
            - model.log_predictive_pdf(r, series.expectation[j]);
    }
    Ok(total)
}

/// Assembles the full comparison (smoothed vs expectation) for one record.
pub fn compare_record(
    record: &TrajectoryRecord,
    effects: &EffectSeries,
    series: &EstimateSeries,
) -> Result<ComparisonResult, MetricsError> {
    let mse_ref = mse(&record.readouts, &series.expectation)?;
    let mse_alt = mse(&record.readouts, &series.smoothed)?;
    if mse_alt == 0.0 {
        return Err(MetricsError::DegenerateFit);
    }
    let ln_r = log_hypothesis_ratio(record, effects, series)?;
    Ok(ComparisonResult {
        q: (mse_ref - mse_alt) / mse_alt,
        ln_r,
        mse_ref,
        mse_alt,
        n_steps: record.len(),
        anomalous_count: series.anomalous_count(),
    })
}
