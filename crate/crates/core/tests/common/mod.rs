//! Shared helpers for the integration suites: an independent dense-matrix
//! oracle (plain nested-loop arithmetic on `[[Complex64; 2]; 2]`, no reuse of
//! the library's matrix type), random state/effect generators, and quadrature.

#![allow(dead_code)]

use num_complex::Complex64;
use qubit_smoothing::algebra::{ComplexMatrix2, QubitState};
use rand::Rng;
use rand_distr::StandardNormal;

pub type Naive = [[Complex64; 2]; 2];

pub const NAIVE_ID: Naive = [
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
];

pub fn naive_mul(a: &Naive, b: &Naive) -> Naive {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..2 {
                acc += a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn naive_adjoint(a: &Naive) -> Naive {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

pub fn naive_trace(a: &Naive) -> Complex64 {
    a[0][0] + a[1][1]
}

pub fn naive_scale(a: &Naive, s: f64) -> Naive {
    let mut out = *a;
    for row in &mut out {
        for e in row {
            *e = e.scale(s);
        }
    }
    out
}

pub fn to_naive(m: &ComplexMatrix2) -> Naive {
    [
        [m.entry(0, 0), m.entry(0, 1)],
        [m.entry(1, 0), m.entry(1, 1)],
    ]
}

pub fn max_abs_diff(a: &Naive, b: &Naive) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((a[i][j] - b[i][j]).norm());
        }
    }
    worst
}

pub fn max_abs(a: &Naive) -> f64 {
    let mut worst: f64 = 0.0;
    for row in a {
        for e in row {
            worst = worst.max(e.norm());
        }
    }
    worst
}

/// Detector Gaussian written out from scratch.
pub fn naive_gaussian(r: f64, center: f64, dt: f64, tau: f64) -> f64 {
    (dt / (2.0 * std::f64::consts::PI * tau)).sqrt()
        * (-(r - center) * (r - center) * dt / (2.0 * tau)).exp()
}

/// Z-axis Kraus operator written out from scratch.
pub fn naive_kraus_z(r: f64, dt: f64, tau: f64) -> Naive {
    [
        [
            Complex64::new(naive_gaussian(r, 1.0, dt, tau).sqrt(), 0.0),
            Complex64::new(0.0, 0.0),
        ],
        [
            Complex64::new(0.0, 0.0),
            Complex64::new(naive_gaussian(r, -1.0, dt, tau).sqrt(), 0.0),
        ],
    ]
}

/// X-axis Kraus operator: rotate the z form by the Hadamard, written out.
pub fn naive_kraus_x(r: f64, dt: f64, tau: f64) -> Naive {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = [
        [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
    ];
    naive_mul(&naive_mul(&h, &naive_kraus_z(r, dt, tau)), &h)
}

/// Drive propagator written out from scratch.
pub fn naive_unitary(omega: f64, dt: f64) -> Naive {
    let half = 0.5 * omega * dt;
    [
        [
            Complex64::new(half.cos(), 0.0),
            Complex64::new(-half.sin(), 0.0),
        ],
        [
            Complex64::new(half.sin(), 0.0),
            Complex64::new(half.cos(), 0.0),
        ],
    ]
}

/// Uniform random state inside the Bloch ball.
pub fn random_state<R: Rng>(rng: &mut R) -> QubitState {
    let dir: [f64; 3] = [
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    ];
    let norm = (dir[0].powi(2) + dir[1].powi(2) + dir[2].powi(2)).sqrt();
    let radius = rng.random::<f64>().cbrt() * 0.999;
    QubitState::from_bloch(
        radius * dir[0] / norm,
        radius * dir[1] / norm,
        radius * dir[2] / norm,
    )
    .unwrap()
}

/// Random positive semidefinite effect with unit maximum eigenvalue.
pub fn random_effect<R: Rng>(rng: &mut R) -> ComplexMatrix2 {
    let mut entries = [Complex64::new(0.0, 0.0); 4];
    for e in &mut entries {
        *e = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    }
    let b = ComplexMatrix2 { entries };
    let psd = (b * b.adjoint()).hermitian_part();
    let (_, high) = psd.hermitian_eigenvalues();
    psd.scale(1.0 / high)
}

/// Composite Simpson rule; `n` must be even.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k.is_multiple_of(2) { 2.0 } else { 4.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if !n.is_multiple_of(2) {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let ma = mean(a);
    let mb = mean(b);
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (va.sqrt() * vb.sqrt())
}
