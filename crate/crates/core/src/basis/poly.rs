//! Barycentric Lagrange interpolation on arbitrary distinct nodes.

use ndarray::Array2;

/// Barycentric weights `1 / Π_{k≠j} (x_j − x_k)`, rescaled so the largest
/// magnitude is one. The scaling cancels in every formula that uses them and
/// keeps wide node sets (large Hermite rules) out of overflow.
pub(crate) fn barycentric_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut log_mag = vec![0.0; n];
    let mut sign = vec![1.0; n];
    for j in 0..n {
        for k in 0..n {
            if k != j {
                let d = x[j] - x[k];
                log_mag[j] -= d.abs().ln();
                if d < 0.0 {
                    sign[j] = -sign[j];
                }
            }
        }
    }
    let top = log_mag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    log_mag
        .iter()
        .zip(&sign)
        .map(|(l, s)| s * (l - top).exp())
        .collect()
}

/// First and second collocation derivative matrices of the Lagrange basis.
/// Diagonals use the negative-sum identity so that rows annihilate constants.
pub(crate) fn derivative_matrices(x: &[f64], w: &[f64]) -> (Array2<f64>, Array2<f64>) {
    let n = x.len();
    let mut d1 = Array2::zeros((n, n));
    for k in 0..n {
        for j in 0..n {
            if j != k {
                d1[[k, j]] = (w[j] / w[k]) / (x[k] - x[j]);
            }
        }
        d1[[k, k]] = -compensated_sum(d1.row(k).iter().copied());
    }
    let mut d2 = Array2::zeros((n, n));
    for k in 0..n {
        for j in 0..n {
            if j != k {
                d2[[k, j]] = 2.0 * d1[[k, j]] * (d1[[k, k]] - 1.0 / (x[k] - x[j]));
            }
        }
        d2[[k, k]] = -compensated_sum(d2.row(k).iter().copied());
    }
    (d1, d2)
}

/// Neumaier summation; row sums of Hermite differentiation matrices cancel
/// entries of size `e^{z²}`.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + comp
}

/// Second (true) barycentric formula.
pub(crate) fn interpolate(x: &[f64], w: &[f64], f: &[f64], t: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&xj, &wj), &fj) in x.iter().zip(w).zip(f) {
        let d = t - xj;
        if d == 0.0 {
            return fj;
        }
        let c = wj / d;
        num += c * fj;
        den += c;
    }
    num / den
}
