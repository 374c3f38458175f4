//! Trigonometric (periodic) cardinal basis on `n` equispaced nodes of `[0, 2π)`.
//!
//! `n` is even throughout; the cardinal functions are
//! `B_i(x) = (1/n) sin(n (x - x_i) / 2) cot((x - x_i) / 2)`.

use std::f64::consts::{PI, TAU};

use ndarray::Array2;

pub(crate) fn nodes(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * i as f64 / n as f64).collect()
}

/// Reduce `d` into `(-π, π]`.
fn wrap(d: f64) -> f64 {
    let r = d.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

pub(crate) fn first_derivative(n: usize) -> Array2<f64> {
    let h = TAU / n as f64;
    Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            return 0.0;
        }
        let k = i as isize - j as isize;
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        0.5 * sign / (0.5 * k as f64 * h).tan()
    })
}

pub(crate) fn second_derivative(n: usize) -> Array2<f64> {
    let h = TAU / n as f64;
    let diag = -PI * PI / (3.0 * h * h) - 1.0 / 6.0;
    Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            return diag;
        }
        let k = i as isize - j as isize;
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let s = (0.5 * k as f64 * h).sin();
        -0.5 * sign / (s * s)
    })
}

/// Closed-form cardinal function `B_j(x)`.
pub(crate) fn cardinal(n: usize, j: usize, x: f64) -> f64 {
    let xj = TAU * j as f64 / n as f64;
    let d = wrap(x - xj);
    if d == 0.0 {
        return 1.0;
    }
    (0.5 * n as f64 * d).sin() / (n as f64 * (0.5 * d).tan())
}

/// Barycentric form of the trigonometric interpolant (even `n`).
pub(crate) fn interpolate(samples: &[f64], x: f64) -> f64 {
    let n = samples.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for (j, &fj) in samples.iter().enumerate() {
        let d = wrap(x - TAU * j as f64 / n as f64);
        if d == 0.0 {
            return fj;
        }
        let c = 1.0 / (0.5 * d).tan();
        let term = if j % 2 == 0 { c } else { -c };
        num += term * fj;
        den += term;
    }
    num / den
}
