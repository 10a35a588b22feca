//! Seeded simulators for VAR systems, used by tests, benchmarks and the
//! acceptance suite.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Simulates `y_t = c + sum_i A_i y_{t-i} + sd * e_t` with standard normal
/// `e_t`, discarding `burn` leading steps. Returns one vector per series.
pub fn simulate_var<R: Rng + ?Sized>(
    coefs: &[DMatrix<f64>],
    intercept: &DVector<f64>,
    sd: f64,
    n: usize,
    burn: usize,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let k = intercept.len();
    let p = coefs.len();
    let total = n + burn + p;
    let mut y = vec![vec![0.0; k]; total];
    for t in p..total {
        for eq in 0..k {
            let mut v = intercept[eq];
            for (i, a) in coefs.iter().enumerate() {
                for var in 0..k {
                    v += a[(eq, var)] * y[t - i - 1][var];
                }
            }
            let e: f64 = StandardNormal.sample(rng);
            y[t][eq] = v + sd * e;
        }
    }
    (0..k)
        .map(|j| y[total - n..].iter().map(|row| row[j]).collect())
        .collect()
}

pub fn white_noise<R: Rng + ?Sized>(k: usize, n: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..k)
        .map(|_| (0..n).map(|_| StandardNormal.sample(rng)).collect())
        .collect()
}

/// `x` white noise and `y_t = a y_{t-1} + b x_{t-1} + e_t`; returns `(x, y)`.
pub fn coupled_pair<R: Rng + ?Sized>(
    n: usize,
    a: f64,
    b: f64,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let a1 = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, b, a]);
    let mut s = simulate_var(&[a1], &DVector::zeros(2), 1.0, n, 100, rng);
    let y = s.pop().expect("two series");
    let x = s.pop().expect("two series");
    (x, y)
}

/// Common driver `z` feeding `y` at lag 1 and `x` at lag 2, plus an optional
/// direct `y -> x` coupling at lag 1. Returns `[x, y, z]`.
pub fn confounded_triple<R: Rng + ?Sized>(n: usize, direct: f64, rng: &mut R) -> Vec<Vec<f64>> {
    let a1 = DMatrix::from_row_slice(3, 3, &[0.2, direct, 0.0, 0.0, 0.2, 0.8, 0.0, 0.0, 0.5]);
    let a2 = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.8, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    simulate_var(&[a1, a2], &DVector::zeros(3), 1.0, n, 200, rng)
}
