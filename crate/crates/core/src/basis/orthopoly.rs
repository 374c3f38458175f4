//! Hermite and Legendre recurrences and Gauss-type node solvers.
//!
//! Nodes come from the eigenvalues of the symmetric Jacobi matrix of the
//! relevant orthogonal family and are then polished with Newton's method on
//! the defining polynomial.

use nalgebra::{DMatrix, SymmetricEigen};

use super::BasisKind;
use crate::error::{Error, Result};

const MAX_NEWTON: usize = 50;

/// Orthonormal Hermite polynomials for the weight `exp(-z²)`.
/// Returns `(p_m(z), p_{m-1}(z))`.
pub(crate) fn hermite_orthonormal(m: usize, z: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    for k in 0..m {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * z * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Derivative of the orthonormal `p_m`, from `p_m' = sqrt(2m) p_{m-1}`.
pub(crate) fn hermite_orthonormal_derivative(m: usize, z: f64) -> f64 {
    let (_, pm1) = hermite_orthonormal(m, z);
    (2.0 * m as f64).sqrt() * pm1
}

/// Legendre polynomials: returns `(P_n(x), P_{n-1}(x))`.
pub(crate) fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut cur = x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// `(x² − 1) P_n'(x)`, which stays finite at `x = ±1`.
pub(crate) fn legendre_bubble(n: usize, x: f64) -> f64 {
    let (p, pm1) = legendre(n, x);
    n as f64 * (x * p - pm1)
}

fn jacobi_eigenvalues(off_diag: &[f64]) -> Vec<f64> {
    let m = off_diag.len() + 1;
    let mut jm = DMatrix::<f64>::zeros(m, m);
    for (k, &b) in off_diag.iter().enumerate() {
        jm[(k, k + 1)] = b;
        jm[(k + 1, k)] = b;
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(jm).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

fn newton_polish(
    guess: f64,
    kind: BasisKind,
    m: usize,
    step: impl Fn(f64) -> f64,
) -> Result<f64> {
    let mut x = guess;
    let mut last = f64::INFINITY;
    for _ in 0..MAX_NEWTON {
        let dx = step(x);
        x -= dx;
        last = dx.abs();
        if last <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            return Ok(x);
        }
    }
    if last <= 1e-12 * x.abs().max(1.0) {
        Ok(x)
    } else {
        Err(Error::NodeSolver {
            kind,
            m,
            last_step: last,
        })
    }
}

/// Zeros of `H_m` and the Gauss–Hermite weights for `exp(-z²)`.
pub(crate) fn gauss_hermite(m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let off: Vec<f64> = (1..m).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let mut nodes = Vec::with_capacity(m);
    for g in jacobi_eigenvalues(&off) {
        let z = newton_polish(g, BasisKind::Hermite, m, |z| {
            let (p, pm1) = hermite_orthonormal(m, z);
            p / ((2.0 * m as f64).sqrt() * pm1)
        })?;
        nodes.push(z);
    }
    // Christoffel numbers: w_j = 1 / Σ_{k<m} p_k(z_j)².
    let weights = nodes
        .iter()
        .map(|&z| {
            let mut prev = 0.0;
            let mut cur = std::f64::consts::PI.powf(-0.25);
            let mut sum = 0.0;
            for k in 0..m {
                sum += cur * cur;
                let kf = k as f64;
                let next = (2.0 / (kf + 1.0)).sqrt() * z * cur - (kf / (kf + 1.0)).sqrt() * prev;
                prev = cur;
                cur = next;
            }
            1.0 / sum
        })
        .collect();
    Ok((nodes, weights))
}

/// The `m` zeros of `P'_{m+1}` (interior Gauss–Lobatto points) and their
/// weights `2 / ((m+1)(m+2) P_{m+1}(v)²)`.
pub(crate) fn lobatto_interior(m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    // P'_{m+1} is proportional to the Jacobi polynomial P_m^{(1,1)}.
    let off: Vec<f64> = (1..m)
        .map(|k| {
            let k = k as f64;
            (k * (k + 2.0) / ((2.0 * k + 1.0) * (2.0 * k + 3.0))).sqrt()
        })
        .collect();
    let n = m + 1;
    let nf = n as f64;
    let mut nodes = Vec::with_capacity(m);
    for g in jacobi_eigenvalues(&off) {
        let v = newton_polish(g, BasisKind::Legendre, m, |x| {
            let (p, pm1) = legendre(n, x);
            let dp = nf * (x * p - pm1) / (x * x - 1.0);
            let d2p = (2.0 * x * dp - nf * (nf + 1.0) * p) / (1.0 - x * x);
            dp / d2p
        })?;
        nodes.push(v);
    }
    let scale = 2.0 / (nf * (nf + 1.0));
    let weights = nodes
        .iter()
        .map(|&v| {
            let (p, _) = legendre(n, v);
            scale / (p * p)
        })
        .collect();
    Ok((nodes, weights))
}
