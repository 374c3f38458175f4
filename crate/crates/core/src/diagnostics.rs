//! Discrete particle number, velocity moments and total energy.
//!
//! All quantities are physical integrals: the space trapezoid weight is
//! `|Ω_x| / N` and the velocity weights carry the map Jacobian. On reference
//! domains (`|Ω_x| = 2π`, unit velocity scale) this is the plain `2π/N`
//! prefactor.

use crate::error::{Error, Result};
use crate::field::{first_mode_magnitude, FieldState};
use crate::grid::PhaseGrid;
use crate::stepper::DistributionState;

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// Particle number `Q`.
    pub mass: f64,
    /// `(r, Q_r)` for each configured order.
    pub moments: Vec<(u32, f64)>,
    pub energy: f64,
    /// `|â₁|`.
    pub first_mode: f64,
    /// `|ℰ − ℰ₀| / |ℰ₀|`; NaN when `ℰ₀ = 0`.
    pub energy_drift: f64,
}

impl DiagnosticsRecord {
    pub fn moment(&self, r: u32) -> Option<f64> {
        self.moments.iter().find(|(k, _)| *k == r).map(|&(_, q)| q)
    }
}

/// `Q_r = (|Ω_x|/N) Σ_n Σ_m v_m^r c_nm w_m`.
pub fn moment(state: &DistributionState, grid: &PhaseGrid, r: u32) -> f64 {
    let w = grid.v_weights();
    let vr: Vec<f64> = grid.v_phys.iter().zip(&w).map(|(v, w)| v.powi(r as i32) * w).collect();
    let total: f64 = state
        .coeffs
        .rows()
        .into_iter()
        .map(|row| row.iter().zip(&vr).map(|(c, w)| c * w).sum::<f64>())
        .sum();
    grid.x_weight() * total
}

pub fn mass(state: &DistributionState, grid: &PhaseGrid) -> f64 {
    moment(state, grid, 0)
}

/// `ℰ = ½ (Q_2 + (|Ω_x|/N) Σ_n E(x_n)²)`.
pub fn total_energy(state: &DistributionState, field: &FieldState, grid: &PhaseGrid) -> f64 {
    let field_part: f64 = field.values.iter().map(|e| e * e).sum::<f64>() * grid.x_weight();
    0.5 * (moment(state, grid, 2) + field_part)
}

/// Relative energy variation against the first entry.
pub fn drift(energies: &[f64]) -> Result<Vec<f64>> {
    let Some(&e0) = energies.first() else {
        return Ok(Vec::new());
    };
    if e0 == 0.0 {
        return Err(Error::ZeroInitialEnergy);
    }
    Ok(energies.iter().map(|e| ((e - e0) / e0).abs()).collect())
}

pub fn record(
    t: f64,
    state: &DistributionState,
    field: &FieldState,
    grid: &PhaseGrid,
    orders: &[u32],
    energy0: f64,
) -> DiagnosticsRecord {
    let energy = total_energy(state, field, grid);
    let energy_drift = if energy0 == 0.0 {
        f64::NAN
    } else {
        ((energy - energy0) / energy0).abs()
    };
    DiagnosticsRecord {
        t,
        mass: mass(state, grid),
        moments: orders.iter().map(|&r| (r, moment(state, grid, r))).collect(),
        energy,
        first_mode: first_mode_magnitude(field),
        energy_drift,
    }
}
