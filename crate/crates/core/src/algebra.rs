//! Dense 2x2 complex linear algebra for qubit density operators.
//!
//! Every operator in the library is a [`ComplexMatrix2`]: density operators,
//! Kraus operators, POVM effects, and unitaries. The dimension is fixed at
//! 2x2 on purpose; the simulation loops chew through 10^8 or more of these
//! products per run and a generic matrix abstraction buys nothing here.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

/// Entrywise tolerance for Hermiticity checks.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Tolerance on `tr(rho) = 1`.
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues no lower than `-POSITIVITY_TOL` count as nonnegative.
pub const POSITIVITY_TOL: f64 = 1e-12;
/// Slack allowed on the Bloch vector norm.
pub const BLOCH_NORM_TOL: f64 = 1e-10;

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A dense 2x2 complex matrix in row-major order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexMatrix2 {
    pub entries: [Complex64; 4],
}

impl ComplexMatrix2 {
    pub const ZERO: Self = Self {
        entries: [C_ZERO, C_ZERO, C_ZERO, C_ZERO],
    };

    pub const IDENTITY: Self = Self {
        entries: [C_ONE, C_ZERO, C_ZERO, C_ONE],
    };

    pub const PAULI_X: Self = Self {
        entries: [C_ZERO, C_ONE, C_ONE, C_ZERO],
    };

    pub const PAULI_Y: Self = Self {
        entries: [
            C_ZERO,
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            C_ZERO,
        ],
    };

    pub const PAULI_Z: Self = Self {
        entries: [C_ONE, C_ZERO, C_ZERO, Complex64::new(-1.0, 0.0)],
    };

    #[inline]
    pub const fn new(e00: Complex64, e01: Complex64, e10: Complex64, e11: Complex64) -> Self {
        Self {
            entries: [e00, e01, e10, e11],
        }
    }

    #[inline]
    pub fn diagonal(a: Complex64, b: Complex64) -> Self {
        Self::new(a, C_ZERO, C_ZERO, b)
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[2 * row + col]
    }

    /// Conjugate transpose.
    #[inline]
    pub fn adjoint(&self) -> Self {
        let e = &self.entries;
        Self::new(e[0].conj(), e[2].conj(), e[1].conj(), e[3].conj())
    }

    #[inline]
    pub fn trace(&self) -> Complex64 {
        self.entries[0] + self.entries[3]
    }

    /// `tr(self * rhs)` without forming the product.
    #[inline]
    pub fn trace_product(&self, rhs: &Self) -> Complex64 {
        let a = &self.entries;
        let b = &rhs.entries;
        a[0] * b[0] + a[1] * b[2] + a[2] * b[1] + a[3] * b[3]
    }

    #[inline]
    pub fn scale(&self, s: f64) -> Self {
        let e = &self.entries;
        Self::new(e[0].scale(s), e[1].scale(s), e[2].scale(s), e[3].scale(s))
    }

    #[inline]
    pub fn scale_complex(&self, s: Complex64) -> Self {
        let e = &self.entries;
        Self::new(e[0] * s, e[1] * s, e[2] * s, e[3] * s)
    }

    /// `u * self * u^dagger`.
    #[inline]
    pub fn conjugate_with(&self, u: &Self) -> Self {
        (*u * *self) * u.adjoint()
    }

    /// `(self + self^dagger) / 2`, the Hermitian projection used to suppress
    /// round-off drift in long product chains.
    #[inline]
    pub fn hermitian_part(&self) -> Self {
        let e = &self.entries;
        let off = (e[1] + e[2].conj()).scale(0.5);
        Self::new(
            Complex64::new(e[0].re, 0.0),
            off,
            off.conj(),
            Complex64::new(e[3].re, 0.0),
        )
    }

    /// Largest entrywise deviation from the adjoint.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = *self - self.adjoint();
        d.max_abs_entry()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Eigenvalues `(low, high)` of a Hermitian matrix, from the closed form
    /// for 2x2. Only the real parts of the diagonal and the upper off-diagonal
    /// magnitude enter, so small Hermiticity defects are ignored.
    #[inline]
    pub fn hermitian_eigenvalues(&self) -> (f64, f64) {
        let a = self.entries[0].re;
        let d = self.entries[3].re;
        let mid = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + self.entries[1].norm_sqr()).sqrt();
        (mid - radius, mid + radius)
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl Mul for ComplexMatrix2 {
    type Output = Self;

    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let a = &self.entries;
        let b = &rhs.entries;
        Self::new(
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        )
    }
}

impl Add for ComplexMatrix2 {
    type Output = Self;

    #[inline]
    fn add(self, rhs: Self) -> Self {
        let a = &self.entries;
        let b = &rhs.entries;
        Self::new(a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3])
    }
}

impl Sub for ComplexMatrix2 {
    type Output = Self;

    #[inline]
    fn sub(self, rhs: Self) -> Self {
        let a = &self.entries;
        let b = &rhs.entries;
        Self::new(a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3])
    }
}

impl Neg for ComplexMatrix2 {
    type Output = Self;

    #[inline]
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

/// The Pauli axis a monitor couples to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// A monitored observable: a Pauli axis together with its matrix.
///
/// Constructed only through [`Observable::new`], so the matrix is always the
/// genuine Pauli operator for the axis (Hermitian, traceless, involutory).
#[derive(Clone, Copy, Debug)]
pub struct Observable {
    axis: Axis,
    matrix: ComplexMatrix2,
}

impl Observable {
    pub fn new(axis: Axis) -> Self {
        let matrix = match axis {
            Axis::X => ComplexMatrix2::PAULI_X,
            Axis::Y => ComplexMatrix2::PAULI_Y,
            Axis::Z => ComplexMatrix2::PAULI_Z,
        };
        Self { axis, matrix }
    }

    pub fn x() -> Self {
        Self::new(Axis::X)
    }

    pub fn y() -> Self {
        Self::new(Axis::Y)
    }

    pub fn z() -> Self {
        Self::new(Axis::Z)
    }

    #[inline]
    pub fn axis(&self) -> Axis {
        self.axis
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix2 {
        &self.matrix
    }

    /// Unitary whose columns are the +1 and -1 eigenvectors, in that order.
    /// Maps the measurement axis eigenbasis onto the computational basis.
    pub fn eigenbasis(&self) -> ComplexMatrix2 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self.axis {
            Axis::Z => ComplexMatrix2::IDENTITY,
            Axis::X => ComplexMatrix2::new(
                Complex64::new(s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(-s, 0.0),
            ),
            Axis::Y => ComplexMatrix2::new(
                Complex64::new(s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(0.0, s),
                Complex64::new(0.0, -s),
            ),
        }
    }
}

/// Violations of the density-operator invariants.
#[derive(Debug, Error)]
pub enum StateError {
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("trace is {trace:.17} instead of 1")]
    TraceNotOne { trace: f64 },
    #[error("matrix is not positive semidefinite (low eigenvalue {low:.3e})")]
    NotPositive { low: f64 },
    #[error("Bloch vector norm {norm:.17} exceeds 1")]
    BlochNormTooLarge { norm: f64 },
}

/// A qubit density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitState {
    matrix: ComplexMatrix2,
}

impl QubitState {
    /// Validates all density-operator invariants before accepting the matrix.
    pub fn from_matrix(matrix: ComplexMatrix2) -> Result<Self, StateError> {
        if !matrix.is_finite() {
            return Err(StateError::NonFinite);
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(StateError::NotHermitian { defect });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(StateError::TraceNotOne { trace: trace.re });
        }
        let (low, _) = matrix.hermitian_eigenvalues();
        if low < -POSITIVITY_TOL {
            return Err(StateError::NotPositive { low });
        }
        let state = Self { matrix };
        let (x, y, z) = state.bloch();
        let norm = (x * x + y * y + z * z).sqrt();
        if norm > 1.0 + BLOCH_NORM_TOL {
            return Err(StateError::BlochNormTooLarge { norm });
        }
        Ok(state)
    }

    /// `rho = (I + x sx + y sy + z sz) / 2` for a Bloch vector inside the ball.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self, StateError> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm > 1.0 + BLOCH_NORM_TOL {
            return Err(StateError::BlochNormTooLarge { norm });
        }
        let m = ComplexMatrix2::new(
            Complex64::new(0.5 * (1.0 + z), 0.0),
            Complex64::new(0.5 * x, -0.5 * y),
            Complex64::new(0.5 * x, 0.5 * y),
            Complex64::new(0.5 * (1.0 - z), 0.0),
        );
        Ok(Self { matrix: m })
    }

    pub fn maximally_mixed() -> Self {
        Self {
            matrix: ComplexMatrix2::IDENTITY.scale(0.5),
        }
    }

    /// The +1 or -1 eigenstate of a Pauli axis.
    pub fn eigenstate(axis: Axis, positive: bool) -> Self {
        let sign = if positive { 1.0 } else { -1.0 };
        let (x, y, z) = match axis {
            Axis::X => (sign, 0.0, 0.0),
            Axis::Y => (0.0, sign, 0.0),
            Axis::Z => (0.0, 0.0, sign),
        };
        Self::from_bloch(x, y, z).expect("unit Bloch vector")
    }

    /// Wraps a matrix the library itself produced. Invariants are only
    /// debug-asserted here; the hot loops re-symmetrize and renormalize at
    /// every step, which keeps them satisfied.
    #[inline]
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix2) -> Self {
        debug_assert!(matrix.is_finite());
        debug_assert!(matrix.hermiticity_defect() <= HERMITICITY_TOL);
        debug_assert!((matrix.trace().re - 1.0).abs() <= TRACE_TOL);
        Self { matrix }
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix2 {
        &self.matrix
    }

    /// Bloch vector `(x, y, z)`.
    #[inline]
    pub fn bloch(&self) -> (f64, f64, f64) {
        let e = &self.matrix.entries;
        (2.0 * e[1].re, -2.0 * e[1].im, e[0].re - e[3].re)
    }

    /// `tr(rho * O)` for a Pauli observable; real up to round-off.
    #[inline]
    pub fn expectation(&self, obs: &Observable) -> f64 {
        self.matrix.trace_product(obs.matrix()).re
    }

    /// `tr(rho^2)`, in `[1/2, 1]` for a qubit.
    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    /// `u * rho * u^dagger`, re-symmetrized.
    #[inline]
    pub fn evolve(&self, u: &ComplexMatrix2) -> Self {
        Self::from_matrix_unchecked(self.matrix.conjugate_with(u).hermitian_part())
    }

    /// Re-checks all invariants; used by tests and at module boundaries.
    pub fn validate(&self) -> Result<(), StateError> {
        Self::from_matrix(self.matrix).map(|_| ())
    }
}

/// Propagator for one time step of the resonant drive `H = hbar*omega*sy/2`:
/// `U = cos(omega*dt/2) I - i sin(omega*dt/2) sy`, evaluated in closed form.
/// Rotates the Bloch vector by `omega*dt` about the y axis, so an initial
/// z = +1 state Rabi-oscillates in the x-z plane.
pub fn rabi_unitary(omega: f64, dt: f64) -> ComplexMatrix2 {
    let half = 0.5 * omega * dt;
    let (s, c) = half.sin_cos();
    ComplexMatrix2::new(
        Complex64::new(c, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(c, 0.0),
    )
}
