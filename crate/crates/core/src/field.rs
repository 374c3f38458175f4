//! Charge density by velocity quadrature and the zero-mean field solve.
//!
//! The field is stored through its trigonometric expansion in the reference
//! coordinate,
//!
//! ```text
//! E(x) = -Σ_{n=1}^{N/2} (1/n) [â_n sin(n x) − b̂_n cos(n x)],
//! ```
//!
//! where `â_n`, `b̂_n` are the cosine and sine DFT coefficients of the density
//! divided by `x_scale`, so that `dE/dx = 1 − ρ` holds in physical units.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::stepper::DistributionState;

/// Threshold on `|mean(1 − ρ)|` above which a solve is flagged as charge
/// imbalanced.
pub const CHARGE_IMBALANCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    /// `E(x_i)` at the space nodes.
    pub values: Vec<f64>,
    /// `â_n`, `n = 1..=N/2` (index `n - 1`).
    pub sin_coeffs: Vec<f64>,
    /// `b̂_n`, `n = 1..=N/2` (index `n - 1`).
    pub cos_coeffs: Vec<f64>,
    /// Mean of `E`; zero by construction.
    pub mean: f64,
    /// Mean of `1 − ρ` that was projected out before inversion.
    pub charge_imbalance: f64,
}

impl FieldState {
    pub fn zero(n: usize) -> Self {
        FieldState {
            values: vec![0.0; n],
            sin_coeffs: vec![0.0; n / 2],
            cos_coeffs: vec![0.0; n / 2],
            mean: 0.0,
            charge_imbalance: 0.0,
        }
    }

    /// Field from prescribed nodal values (e.g. a frozen external field).
    /// Mode coefficients are left at zero.
    pub fn from_values(values: Vec<f64>) -> Self {
        let n = values.len();
        FieldState {
            values,
            ..FieldState::zero(n)
        }
    }

    /// Evaluate the stored expansion at reference coordinate `x`.
    pub fn evaluate(&self, x: f64) -> f64 {
        -self
            .sin_coeffs
            .iter()
            .zip(&self.cos_coeffs)
            .enumerate()
            .map(|(k, (a, b))| {
                let n = (k + 1) as f64;
                (a * (n * x).sin() - b * (n * x).cos()) / n
            })
            .sum::<f64>()
    }

    pub fn is_charge_imbalanced(&self) -> bool {
        self.charge_imbalance.abs() > CHARGE_IMBALANCE_TOL
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `ρ(x_i) = Σ_j c_ij w_j`, with `w_j` the physical velocity weights.
pub fn compute_density(state: &DistributionState, grid: &PhaseGrid) -> Result<DensityProfile> {
    let c = &state.coeffs;
    if c.dim() != (grid.n(), grid.m()) {
        return Err(Error::SizeMismatch {
            expected: format!("{}x{}", grid.n(), grid.m()),
            got: format!("{}x{}", c.nrows(), c.ncols()),
        });
    }
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("distribution coefficients".into()));
    }
    let w = grid.v_weights();
    let values = c
        .rows()
        .into_iter()
        .map(|row| row.iter().zip(&w).map(|(c, w)| c * w).sum())
        .collect();
    Ok(DensityProfile { values })
}

fn trig_table(n: usize, mode: usize, i: usize) -> (f64, f64) {
    let angle = TAU * ((mode * i) % n) as f64 / n as f64;
    angle.sin_cos()
}

/// Zero-mean antiderivative of `1 − ρ` on the periodic space grid.
pub fn solve_field(rho: &DensityProfile, grid: &PhaseGrid) -> FieldState {
    let n = grid.n();
    let half = n / 2;
    let mean_source = rho.values.iter().map(|r| 1.0 - r).sum::<f64>() / n as f64;

    let mut sin_coeffs = vec![0.0; half];
    let mut cos_coeffs = vec![0.0; half];
    // The Nyquist cosine of ρ has no antiderivative visible at the nodes.
    for mode in 1..half {
        let (mut a, mut b) = (0.0, 0.0);
        for (i, r) in rho.values.iter().enumerate() {
            let (s, c) = trig_table(n, mode, i);
            a += r * c;
            b += r * s;
        }
        let norm = 2.0 / (n as f64 * grid.x_scale);
        sin_coeffs[mode - 1] = a * norm;
        cos_coeffs[mode - 1] = b * norm;
    }

    let values: Vec<f64> = (0..n)
        .map(|i| {
            -(1..half)
                .map(|mode| {
                    let (s, c) = trig_table(n, mode, i);
                    (sin_coeffs[mode - 1] * s - cos_coeffs[mode - 1] * c) / mode as f64
                })
                .sum::<f64>()
        })
        .collect();
    let mean = values.iter().sum::<f64>() / n as f64;

    FieldState {
        values,
        sin_coeffs,
        cos_coeffs,
        mean,
        charge_imbalance: mean_source,
    }
}

/// `|â₁|`, the magnitude of the first sine mode of the field expansion.
pub fn first_mode_magnitude(field: &FieldState) -> f64 {
    field.sin_coeffs.first().map_or(0.0, |a| a.abs())
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use ndarray::{Array1, Array2};

    use super::*;
    use crate::basis::BasisKind;
    use crate::config::SimConfig;
    use crate::grid::build_grid;
    use crate::stepper::Representation;

    fn unit_grid(n: usize) -> PhaseGrid {
        let mut c = SimConfig::two_stream(BasisKind::FourierPeriodic);
        c.n = n;
        c.x_extent = (0.0, TAU);
        build_grid(&c).unwrap()
    }

    fn profile(grid: &PhaseGrid, f: impl Fn(f64) -> f64) -> DensityProfile {
        DensityProfile {
            values: grid.x_phys.iter().map(|&x| f(x)).collect(),
        }
    }

    #[test]
    fn uniform_density_gives_zero_field() {
        let g = unit_grid(16);
        let e = solve_field(&profile(&g, |_| 1.0), &g);
        assert!(e.values.iter().all(|v| v.abs() < 1e-14));
        assert!(first_mode_magnitude(&e) < 1e-15);
        assert!(!e.is_charge_imbalanced());
    }

    #[test]
    fn cosine_density_gives_sine_field() {
        let g = unit_grid(16);
        let e = solve_field(&profile(&g, |x| 1.0 - x.cos()), &g);
        for (x, v) in g.x_phys.iter().zip(&e.values) {
            assert_abs_diff_eq!(*v, x.sin(), epsilon = 1e-10);
        }
        // E = sin x = -â₁ sin x with â₁ = -1.
        assert_abs_diff_eq!(e.sin_coeffs[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(first_mode_magnitude(&e), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn termwise_antiderivative() {
        // Oracle: dE/dx = 1 - ρ = cos 2x + 3 sin 5x integrates termwise to
        // E = sin(2x)/2 - (3/5) cos(5x), which has zero mean.
        let g = unit_grid(16);
        let e = solve_field(&profile(&g, |x| 1.0 - (2.0 * x).cos() - 3.0 * (5.0 * x).sin()), &g);
        for (x, v) in g.x_phys.iter().zip(&e.values) {
            assert_abs_diff_eq!(*v, 0.5 * (2.0 * x).sin() - 0.6 * (5.0 * x).cos(), epsilon = 1e-10);
        }
    }

    #[test]
    fn physical_scaling_on_long_interval() {
        // Ω_x = [0, 4π): ρ = 1 - cos(x/2) gives E = 2 sin(x/2).
        let g = build_grid(&SimConfig::two_stream(BasisKind::FourierPeriodic)).unwrap();
        let e = solve_field(&profile(&g, |x| 1.0 - (0.5 * x).cos()), &g);
        for (x, v) in g.x_phys.iter().zip(&e.values) {
            assert_abs_diff_eq!(*v, 2.0 * (0.5 * x).sin(), epsilon = 1e-10);
        }
    }

    #[test]
    fn first_mode_definition() {
        let g = unit_grid(16);
        // E = -0.25 sin x  ⇔  1 - ρ = -0.25 cos x.
        let e = solve_field(&profile(&g, |x| 1.0 + 0.25 * x.cos()), &g);
        for (x, v) in g.x_phys.iter().zip(&e.values) {
            assert_abs_diff_eq!(*v, -0.25 * x.sin(), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(first_mode_magnitude(&e), 0.25, epsilon = 1e-14);
        assert_eq!(first_mode_magnitude(&FieldState::zero(16)), 0.0);
    }

    #[test]
    fn expansion_matches_values_and_derivative() {
        let g = build_grid(&SimConfig::two_stream(BasisKind::FourierPeriodic)).unwrap();
        let rho = profile(&g, |x| 1.3 + 0.2 * (0.5 * x).cos() - 0.4 * (1.5 * x).sin() + 0.1 * (3.5 * x).cos());
        let e = solve_field(&rho, &g);
        assert!(e.values.iter().sum::<f64>().abs() <= 1e-10);
        assert!(e.mean.abs() <= 1e-12);
        assert!(e.is_charge_imbalanced());
        assert_abs_diff_eq!(e.charge_imbalance, -0.3, epsilon = 1e-12);
        for (xr, v) in g.space.nodes.iter().zip(&e.values) {
            assert_abs_diff_eq!(e.evaluate(*xr), *v, epsilon = 1e-10);
        }
        // D_x E in physical units equals (1 - ρ) minus its mean.
        let de = g.space.diff1.dot(&Array1::from(e.values.clone())) * g.x_scale;
        let mean: f64 = rho.values.iter().map(|r| 1.0 - r).sum::<f64>() / g.n() as f64;
        for (d, r) in de.iter().zip(&rho.values) {
            assert_abs_diff_eq!(*d, 1.0 - r - mean, epsilon = 1e-8);
        }
    }

    #[test]
    fn solve_is_linear() {
        let g = unit_grid(16);
        let r1 = profile(&g, |x| 1.0 + 0.3 * (2.0 * x).sin());
        let r2 = profile(&g, |x| 0.2 * x.cos() - 0.1 * (7.0 * x).sin());
        let sum = DensityProfile {
            values: r1.values.iter().zip(&r2.values).map(|(a, b)| a + 2.0 * b).collect(),
        };
        let (e1, e2, es) = (solve_field(&r1, &g), solve_field(&r2, &g), solve_field(&sum, &g));
        // E[ρ] is affine in ρ (the constant source shifts only the mean).
        let e0 = solve_field(&DensityProfile { values: vec![0.0; 16] }, &g);
        for i in 0..16 {
            let lin = e1.values[i] + 2.0 * (e2.values[i] - e0.values[i]);
            assert_abs_diff_eq!(es.values[i], lin, epsilon = 1e-13);
        }
    }

    #[test]
    fn density_quadrature() {
        let g = build_grid(&SimConfig::two_stream(BasisKind::Legendre)).unwrap();
        let zero = DistributionState::new(Array2::zeros((16, 16)), Representation::F);
        assert!(compute_density(&zero, &g).unwrap().values.iter().all(|&r| r == 0.0));

        let mut c = Array2::zeros((16, 16));
        c[[3, 7]] = 1.0;
        let rho = compute_density(&DistributionState::new(c, Representation::F), &g).unwrap();
        for (i, r) in rho.values.iter().enumerate() {
            let expect = if i == 3 { g.v_weights()[7] } else { 0.0 };
            assert_eq!(*r, expect);
        }

        let mut bad = Array2::zeros((16, 16));
        bad[[0, 0]] = f64::NAN;
        assert!(compute_density(&DistributionState::new(bad, Representation::F), &g).is_err());
        let wrong = DistributionState::new(Array2::zeros((8, 16)), Representation::F);
        assert!(compute_density(&wrong, &g).is_err());
    }
}
