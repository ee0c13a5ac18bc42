//! The Gaussian measurement model.
//!
//! One monitor is parameterized by the discretization step `dt`, the collapse
//! timescale `tau`, and the Pauli axis it couples to. A single readout `r` is
//! drawn from a two-component Gaussian mixture whose components sit at the
//! observable eigenvalues with variance `tau/dt`:
//!
//! ```text
//! G_c(r)  = sqrt(dt / 2 pi tau) * exp(-(r - c)^2 dt / 2 tau),   c = +1, 0, -1
//! P(r|z)  = (1 + z)/2 * G_{+1}(r) + (1 - z)/2 * G_{-1}(r)
//! ```
//!
//! The matching Kraus operator is `(dt/2 pi tau)^(1/4) exp(-(r - O)^2 dt/4 tau)`,
//! diagonal in the observable eigenbasis with entries `sqrt(G_{+1})` and
//! `sqrt(G_{-1})`, so `M_r^dag M_r` integrates to the identity over `r`.

use crate::algebra::{ComplexMatrix2, Observable, QubitState};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Normalization below this aborts a state update instead of renormalizing
/// silently; it flags readouts that are numerically impossible for the state.
pub const UPDATE_UNDERFLOW_GUARD: f64 = 1e-300;

#[derive(Debug, Error)]
pub enum MeasurementError {
    #[error("invalid measurement model: {0}")]
    InvalidModel(String),
    #[error("state update normalization {norm:.3e} fell below the underflow guard")]
    DegenerateUpdate { norm: f64 },
}

/// One Gaussian monitor: time step, collapse timescale, and measured axis.
///
/// `dt` and `tau` share whatever time unit the run uses (the harness works in
/// units of the Rabi period). Smaller `tau` means stronger measurement.
#[derive(Clone, Copy, Debug)]
pub struct MeasurementModel {
    dt: f64,
    tau: f64,
    obs: Observable,
}

impl MeasurementModel {
    pub fn new(dt: f64, tau: f64, obs: Observable) -> Result<Self, MeasurementError> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(MeasurementError::InvalidModel(format!(
                "dt must be positive and finite, got {dt}"
            )));
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(MeasurementError::InvalidModel(format!(
                "tau must be positive and finite, got {tau}"
            )));
        }
        if !(tau / dt).is_finite() {
            return Err(MeasurementError::InvalidModel(format!(
                "tau/dt = {} is not finite",
                tau / dt
            )));
        }
        Ok(Self { dt, tau, obs })
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        self.dt
    }

    #[inline]
    pub fn tau(&self) -> f64 {
        self.tau
    }

    #[inline]
    pub fn obs(&self) -> &Observable {
        &self.obs
    }

    /// Readout variance `tau/dt`.
    #[inline]
    pub fn variance(&self) -> f64 {
        self.tau / self.dt
    }

    /// `exp(-dt/2tau)`, the per-step suppression of coherences between the
    /// measurement eigenstates. Appears throughout the smoothed quantities.
    #[inline]
    pub fn coherence_decay(&self) -> f64 {
        (-self.dt / (2.0 * self.tau)).exp()
    }

    /// `ln sqrt(dt/2 pi tau)`, the log of the Gaussian normalization.
    #[inline]
    pub fn log_gaussian_norm(&self) -> f64 {
        0.5 * (self.dt / (2.0 * std::f64::consts::PI * self.tau)).ln()
    }

    /// Detector density `G_center(r)`; strictly positive.
    #[inline]
    pub fn gaussian_component(&self, r: f64, center: f64) -> f64 {
        let d = r - center;
        (self.dt / (2.0 * std::f64::consts::PI * self.tau)).sqrt()
            * (-d * d * self.dt / (2.0 * self.tau)).exp()
    }

    /// Kraus operator for outcome `r`: diagonal `(sqrt(G_{+1}), sqrt(G_{-1}))`
    /// in the observable eigenbasis, rotated back to the computational basis.
    /// Hermitian and positive by construction, and commutes with the
    /// observable.
    pub fn make_kraus(&self, r: f64) -> ComplexMatrix2 {
        let sq_plus = self.gaussian_component(r, 1.0).sqrt();
        let sq_minus = self.gaussian_component(r, -1.0).sqrt();
        let diag =
            ComplexMatrix2::diagonal(Complex64::new(sq_plus, 0.0), Complex64::new(sq_minus, 0.0));
        match self.obs.axis() {
            crate::algebra::Axis::Z => diag,
            _ => {
                let v = self.obs.eigenbasis();
                (v * diag) * v.adjoint()
            }
        }
    }

    /// Density of the next readout given the current expectation value `z`
    /// of the monitored observable.
    #[inline]
    pub fn predictive_pdf(&self, r: f64, z: f64) -> f64 {
        0.5 * (1.0 + z) * self.gaussian_component(r, 1.0)
            + 0.5 * (1.0 - z) * self.gaussian_component(r, -1.0)
    }

    /// `ln predictive_pdf`, evaluated stably for use in accumulated
    /// likelihoods. Factors the common Gaussian normalization and the largest
    /// exponent out of the mixture.
    pub fn log_predictive_pdf(&self, r: f64, z: f64) -> f64 {
        let scale = self.dt / (2.0 * self.tau);
        let e_plus = -(r - 1.0) * (r - 1.0) * scale;
        let e_minus = -(r + 1.0) * (r + 1.0) * scale;
        let w_plus = (0.5 * (1.0 + z)).max(0.0);
        let w_minus = (0.5 * (1.0 - z)).max(0.0);
        let m = e_plus.max(e_minus);
        let mixture = w_plus * (e_plus - m).exp() + w_minus * (e_minus - m).exp();
        mixture.max(f64::MIN_POSITIVE).ln() + m + self.log_gaussian_norm()
    }

    /// Draws one readout from the predictive distribution: pick the eigenvalue
    /// with probability `(1 +/- z)/2`, then add Gaussian detector noise with
    /// variance `tau/dt`. Marginally identical to inverting `predictive_pdf`,
    /// but exact and O(1).
    pub fn sample_readout<R: Rng + ?Sized>(&self, state: &QubitState, rng: &mut R) -> f64 {
        let z = state.expectation(&self.obs);
        let p_plus = (0.5 * (1.0 + z)).clamp(0.0, 1.0);
        let eigenvalue = if rng.random::<f64>() < p_plus {
            1.0
        } else {
            -1.0
        };
        let noise: f64 = rng.sample(StandardNormal);
        eigenvalue + noise * self.variance().sqrt()
    }

    /// Conditional state update `rho -> M_r rho M_r^dag / tr(...)`, with the
    /// result re-symmetrized. Eigenstates of the monitored axis are fixed
    /// points; purity never decreases.
    pub fn update_state(&self, state: &QubitState, r: f64) -> Result<QubitState, MeasurementError> {
        let m = self.make_kraus(r);
        let sandwiched = (m * *state.matrix()) * m.adjoint();
        let norm = sandwiched.trace().re;
        if !(norm > UPDATE_UNDERFLOW_GUARD) {
            return Err(MeasurementError::DegenerateUpdate { norm });
        }
        Ok(QubitState::from_matrix_unchecked(
            sandwiched.scale(1.0 / norm).hermitian_part(),
        ))
    }
}
