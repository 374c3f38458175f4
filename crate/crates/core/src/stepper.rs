//! Semi-Lagrangian tendency and time stepping.
//!
//! Backtracking each node `(x_n, v_m)` one step along the characteristic and
//! Taylor-expanding the cardinal functions to first order gives the update
//! `c^{k+1} = c^k + Δt Φ^k` with
//!
//! ```text
//! Φ_nm = −v_m x_s Σ_i d^(N,1)_ni c_im + E(x_n) v_s Σ_j d^(M,1)_mj c_nj
//! ```
//!
//! (`x_s`, `v_s` the chain-rule factors of the grid). In the Hermite
//! representation `c = f e^{α² v²}`, so the velocity bracket gains
//! `−2α² v_m c_nm`. The BDF2 variant combines two backtracked levels.

use log::{info, warn};
use ndarray::{Array2, Zip};

use crate::basis::BasisKind;
use crate::config::{FieldCoupling, SimConfig, StepperKind};
use crate::datum::Forcing;
use crate::diagnostics::{self, DiagnosticsRecord};
use crate::error::{Error, InstabilityReport, Result};
use crate::field::{compute_density, solve_field, FieldState};
use crate::grid::{build_grid, PhaseGrid};

/// `|c|` beyond this is treated as a blow-up.
pub const BLOWUP_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// Coefficients are nodal values of `f`.
    F,
    /// Coefficients are nodal values of `p = f exp(α² v²)`.
    HermiteP,
}

impl Representation {
    pub fn for_basis(kind: BasisKind) -> Self {
        match kind {
            BasisKind::Hermite => Representation::HermiteP,
            _ => Representation::F,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionState {
    /// `N × M` coefficient matrix; row `n` is the space node, column `m` the
    /// velocity node.
    pub coeffs: Array2<f64>,
    pub step_index: usize,
    pub representation: Representation,
}

impl DistributionState {
    pub fn new(coeffs: Array2<f64>, representation: Representation) -> Self {
        DistributionState {
            coeffs,
            step_index: 0,
            representation,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Nodal values of `f` (the Hermite weight divided back out).
    pub fn f_values(&self, grid: &PhaseGrid) -> Array2<f64> {
        match self.representation {
            Representation::F => self.coeffs.clone(),
            Representation::HermiteP => {
                let w = &grid.velocity.weight_at_nodes;
                let mut out = self.coeffs.clone();
                for mut row in out.rows_mut() {
                    row.iter_mut().zip(w).for_each(|(c, w)| *c *= w);
                }
                out
            }
        }
    }
}

pub fn initialize_state(config: &SimConfig, grid: &PhaseGrid) -> Result<DistributionState> {
    let repr = Representation::for_basis(grid.kind());
    let w = &grid.velocity.weight_at_nodes;
    let coeffs = Array2::from_shape_fn((grid.n(), grid.m()), |(i, j)| {
        let f = config.datum.eval(grid.x_phys[i], grid.v_phys[j]);
        match repr {
            Representation::F => f,
            Representation::HermiteP => f / w[j],
        }
    });
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("initial datum samples".into()));
    }
    Ok(DistributionState::new(coeffs, repr))
}

fn check_shapes(state: &DistributionState, field: &FieldState, grid: &PhaseGrid) -> Result<()> {
    if state.coeffs.dim() != (grid.n(), grid.m()) || field.values.len() != grid.n() {
        return Err(Error::SizeMismatch {
            expected: format!("{}x{} coefficients and {} field values", grid.n(), grid.m(), grid.n()),
            got: format!(
                "{}x{} coefficients and {} field values",
                state.coeffs.nrows(),
                state.coeffs.ncols(),
                field.values.len()
            ),
        });
    }
    Ok(())
}

fn phi_of(coeffs: &Array2<f64>, repr: Representation, field: &FieldState, grid: &PhaseGrid) -> Array2<f64> {
    let dx = grid.space.diff1.dot(coeffs);
    let dv = coeffs.dot(&grid.velocity.diff1.t());
    let hermite_shift = match repr {
        Representation::HermiteP => 2.0 * grid.velocity.alpha * grid.velocity.alpha,
        Representation::F => 0.0,
    };
    let (xs, vs) = (grid.x_scale, grid.v_scale);
    let mut phi = Array2::zeros(coeffs.dim());
    for n in 0..grid.n() {
        let e = field.values[n] * vs;
        for m in 0..grid.m() {
            let v = grid.v_phys[m];
            let dv_nm = dv[[n, m]] - hermite_shift * v * coeffs[[n, m]];
            phi[[n, m]] = -v * xs * dx[[n, m]] + e * dv_nm;
        }
    }
    phi
}

/// Semi-Lagrangian tendency `Φ` for the current state and field.
pub fn compute_phi(state: &DistributionState, field: &FieldState, grid: &PhaseGrid) -> Result<Array2<f64>> {
    check_shapes(state, field, grid)?;
    Ok(phi_of(&state.coeffs, state.representation, field, grid))
}

/// `g(t, x_n, v_m)` in the state's representation, or `None` without forcing.
fn forcing_matrix(forcing: &Forcing, grid: &PhaseGrid, repr: Representation, t: f64) -> Option<Array2<f64>> {
    if forcing.is_none() {
        return None;
    }
    let w = &grid.velocity.weight_at_nodes;
    Some(Array2::from_shape_fn((grid.n(), grid.m()), |(n, m)| {
        let g = forcing.eval(t, grid.x_phys[n], grid.v_phys[m]);
        match repr {
            Representation::F => g,
            Representation::HermiteP => g / w[m],
        }
    }))
}

fn check_stability(coeffs: &Array2<f64>, step: usize, t: f64, grid: &PhaseGrid) -> Result<()> {
    let mut max_abs: f64 = 0.0;
    let mut finite = true;
    for &c in coeffs.iter() {
        if !c.is_finite() {
            finite = false;
        } else {
            max_abs = max_abs.max(c.abs());
        }
    }
    if !finite || max_abs > BLOWUP_THRESHOLD {
        return Err(Error::Instability(InstabilityReport {
            step,
            t,
            max_abs_coeff: if finite { max_abs } else { f64::INFINITY },
            basis: grid.kind(),
        }));
    }
    Ok(())
}

/// Forward Euler: `c^{k+1} = c^k + Δt Φ^k + Δt g(t^k)`.
pub fn euler_step(
    state: &DistributionState,
    field: &FieldState,
    grid: &PhaseGrid,
    forcing: &Forcing,
    t: f64,
    dt: f64,
) -> Result<DistributionState> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let phi = compute_phi(state, field, grid)?;
    let mut next = &state.coeffs + &(phi * dt);
    if let Some(g) = forcing_matrix(forcing, grid, state.representation, t) {
        next.scaled_add(dt, &g);
    }
    let step = state.step_index + 1;
    check_stability(&next, step, t + dt, grid)?;
    Ok(DistributionState {
        coeffs: next,
        step_index: step,
        representation: state.representation,
    })
}

/// Two-step BDF:
/// `c^{k+1} = (4/3) c^k − (1/3) c^{k-1} + (2/3) Δt [T^k] + (2/3) Δt g(t^{k+1})`,
/// where `T^k = 2Φ(c^k, E^k) − Φ(c^{k-1}, E^{k-1})` for
/// [`FieldCoupling::Extrapolated`] and `T^k = Φ(2c^k − c^{k-1}, E^k)` for
/// [`FieldCoupling::Frozen`].
#[allow(clippy::too_many_arguments)]
pub fn bdf2_step(
    state_k: &DistributionState,
    state_km1: &DistributionState,
    field_k: &FieldState,
    field_km1: &FieldState,
    coupling: FieldCoupling,
    grid: &PhaseGrid,
    forcing: &Forcing,
    t_next: f64,
    dt: f64,
) -> Result<DistributionState> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if state_k.representation != state_km1.representation || state_k.coeffs.dim() != state_km1.coeffs.dim() {
        return Err(Error::SizeMismatch {
            expected: "two states with matching shape and representation".into(),
            got: format!("{:?} vs {:?}", state_k.coeffs.dim(), state_km1.coeffs.dim()),
        });
    }
    check_shapes(state_k, field_k, grid)?;
    check_shapes(state_km1, field_km1, grid)?;
    let repr = state_k.representation;
    let tendency = match coupling {
        FieldCoupling::Extrapolated => {
            let phi_k = phi_of(&state_k.coeffs, repr, field_k, grid);
            let phi_km1 = phi_of(&state_km1.coeffs, repr, field_km1, grid);
            phi_k * 2.0 - phi_km1
        }
        FieldCoupling::Frozen => {
            let combo = &state_k.coeffs * 2.0 - &state_km1.coeffs;
            phi_of(&combo, repr, field_k, grid)
        }
    };
    let mut next = Array2::zeros(state_k.coeffs.dim());
    Zip::from(&mut next)
        .and(&state_k.coeffs)
        .and(&state_km1.coeffs)
        .and(&tendency)
        .for_each(|out, &ck, &ckm1, &tk| {
            *out = (4.0 / 3.0) * ck - (1.0 / 3.0) * ckm1 + (2.0 / 3.0) * dt * tk;
        });
    if let Some(g) = forcing_matrix(forcing, grid, repr, t_next) {
        next.scaled_add(2.0 / 3.0 * dt, &g);
    }
    let step = state_k.step_index + 1;
    check_stability(&next, step, t_next, grid)?;
    Ok(DistributionState {
        coeffs: next,
        step_index: step,
        representation: repr,
    })
}

/// Sufficient time-step bound keeping backtracked points inside the
/// neighbouring cell:
/// `2π (N max|v_m| + M^σ max|E(x_n)|)^{-1}`, halved for BDF2.
pub fn cfl_max_dt(field: &FieldState, grid: &PhaseGrid, sigma: f64, stepper: StepperKind) -> f64 {
    let vmax = grid.v_phys.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let emax = field.max_abs();
    let denom = grid.n() as f64 * vmax + (grid.m() as f64).powf(sigma) * emax;
    if denom == 0.0 {
        return f64::INFINITY;
    }
    let bound = std::f64::consts::TAU / denom;
    match stepper {
        StepperKind::Euler => bound,
        StepperKind::Bdf2 => 0.5 * bound,
    }
}

/// Density solve followed by the field solve.
pub fn field_of(state: &DistributionState, grid: &PhaseGrid) -> Result<FieldState> {
    Ok(solve_field(&compute_density(state, grid)?, grid))
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunOutcome {
    Completed,
    Unstable(InstabilityReport),
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub state: DistributionState,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub grid: PhaseGrid,
    pub records: Vec<DiagnosticsRecord>,
    /// Last finite state (the step before a blow-up, if any).
    pub final_state: DistributionState,
    pub final_field: FieldState,
    pub snapshots: Vec<Snapshot>,
    pub outcome: RunOutcome,
    /// Steps completed successfully.
    pub steps: usize,
    /// CFL bound on the initial field.
    pub cfl_bound: f64,
}

impl RunRecord {
    pub fn is_stable(&self) -> bool {
        self.outcome == RunOutcome::Completed
    }

    pub fn final_time(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.t)
    }
}

fn snapshot_steps(config: &SimConfig, steps: usize) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = config
        .snapshot_times
        .iter()
        .filter_map(|&ts| {
            let k = (ts / config.dt).round();
            if k < 0.0 || (k * config.dt - ts).abs() > 0.5 * config.dt || k as usize > steps {
                None
            } else {
                Some((k as usize, ts))
            }
        })
        .collect();
    out.sort_by_key(|&(k, _)| k);
    out.dedup_by_key(|p| p.0);
    out
}

/// Full time loop: density → field → coefficient update, with diagnostics
/// every `diag_every` steps. BDF2 starts from one Euler step.
pub fn advance(config: &SimConfig) -> Result<RunRecord> {
    config.validate()?;
    let grid = build_grid(config)?;
    let steps = config.steps();
    let dt = config.dt;

    let state0 = initialize_state(config, &grid)?;
    let field0 = field_of(&state0, &grid)?;
    let cfl_bound = cfl_max_dt(&field0, &grid, config.sigma(), config.stepper);
    info!(
        "{} basis N={} M={} dt={} ({} steps); CFL bound {:.4e}",
        grid.kind(),
        grid.n(),
        grid.m(),
        dt,
        steps,
        cfl_bound
    );
    if dt > cfl_bound {
        warn!("dt = {dt} exceeds the CFL bound {cfl_bound:.4e} on the initial field");
    }
    let mut imbalance_warned = false;
    let mut warn_imbalance = |f: &FieldState| {
        if !imbalance_warned && f.is_charge_imbalanced() {
            warn!("charge imbalance {:.3e} projected out of the field source", f.charge_imbalance);
            imbalance_warned = true;
        }
    };
    warn_imbalance(&field0);

    let energy0 = diagnostics::total_energy(&state0, &field0, &grid);
    let mut records = vec![diagnostics::record(
        0.0,
        &state0,
        &field0,
        &grid,
        &config.moment_orders,
        energy0,
    )];
    let snap_plan = snapshot_steps(config, steps);
    let mut snapshots: Vec<Snapshot> = snap_plan
        .iter()
        .filter(|(k, _)| *k == 0)
        .map(|&(_, t)| Snapshot { t, state: state0.clone() })
        .collect();

    let mut prev: Option<(DistributionState, FieldState)> = None;
    let mut cur = (state0, field0);
    let mut outcome = RunOutcome::Completed;
    let mut done = 0;

    for k in 0..steps {
        let t = k as f64 * dt;
        let stepped = match (config.stepper, &prev) {
            (StepperKind::Bdf2, Some((ps, pf))) => bdf2_step(
                &cur.0,
                ps,
                &cur.1,
                pf,
                config.field_coupling,
                &grid,
                &config.forcing,
                t + dt,
                dt,
            ),
            _ => euler_step(&cur.0, &cur.1, &grid, &config.forcing, t, dt),
        };
        let next = match stepped {
            Ok(s) => s,
            Err(Error::Instability(report)) => {
                warn!("{report}");
                outcome = RunOutcome::Unstable(report);
                break;
            }
            Err(e) => return Err(e),
        };
        let next_field = field_of(&next, &grid)?;
        warn_imbalance(&next_field);
        done = k + 1;
        let t_next = done as f64 * dt;
        if done % config.diag_every == 0 || done == steps {
            records.push(diagnostics::record(
                t_next,
                &next,
                &next_field,
                &grid,
                &config.moment_orders,
                energy0,
            ));
        }
        for &(ks, ts) in &snap_plan {
            if ks == done {
                snapshots.push(Snapshot { t: ts, state: next.clone() });
            }
        }
        prev = Some(std::mem::replace(&mut cur, (next, next_field)));
    }

    Ok(RunRecord {
        grid,
        records,
        final_state: cur.0,
        final_field: cur.1,
        snapshots,
        outcome,
        steps: done,
        cfl_bound,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::TAU;

    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::datum::{InitialDatum, ManufacturedSolution, TwoStreamParams};
    use crate::diagnostics::{mass, moment};

    fn grid_for(kind: BasisKind) -> PhaseGrid {
        build_grid(&SimConfig::two_stream(kind)).unwrap()
    }

    fn two_stream_state(kind: BasisKind) -> (SimConfig, PhaseGrid, DistributionState, FieldState) {
        let cfg = SimConfig::two_stream(kind);
        let g = build_grid(&cfg).unwrap();
        let s = initialize_state(&cfg, &g).unwrap();
        let f = field_of(&s, &g).unwrap();
        (cfg, g, s, f)
    }

    #[test]
    fn initial_state_samples_datum() {
        let (_, g, s, _) = two_stream_state(BasisKind::FourierPeriodic);
        let p = TwoStreamParams::default();
        for n in 0..16 {
            for m in 0..16 {
                assert_eq!(s.coeffs[[n, m]], p.eval(g.x_phys[n], g.v_phys[m]));
            }
        }
        assert_eq!(s.representation, Representation::F);

        let (_, g, s, _) = two_stream_state(BasisKind::Hermite);
        assert_eq!(s.representation, Representation::HermiteP);
        let f = s.f_values(&g);
        for n in 0..16 {
            for m in 0..16 {
                let direct = p.eval(g.x_phys[n], g.v_phys[m]);
                assert_abs_diff_eq!(f[[n, m]], direct, epsilon = 1e-15);
                assert_abs_diff_eq!(s.coeffs[[n, m]] * (-g.v_phys[m].powi(2)).exp(), direct, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn zero_datum_and_non_finite_datum() {
        let mut cfg = SimConfig::two_stream(BasisKind::Legendre);
        cfg.datum = InitialDatum::Custom(std::sync::Arc::new(|_, _| 0.0));
        let g = build_grid(&cfg).unwrap();
        assert!(initialize_state(&cfg, &g).unwrap().coeffs.iter().all(|&c| c == 0.0));
        cfg.datum = InitialDatum::Custom(std::sync::Arc::new(|x, _| if x > 1.0 { f64::NAN } else { 0.0 }));
        assert!(matches!(initialize_state(&cfg, &g), Err(Error::NonFinite(_))));
    }

    #[test]
    fn phi_of_constant_state_is_zero() {
        let g = grid_for(BasisKind::FourierPeriodic);
        let s = DistributionState::new(Array2::ones((16, 16)), Representation::F);
        let phi = compute_phi(&s, &FieldState::zero(16), &g).unwrap();
        assert!(phi.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn phi_of_sine_in_x() {
        let g = grid_for(BasisKind::FourierPeriodic);
        let s = DistributionState::new(
            Array2::from_shape_fn((16, 16), |(n, _)| g.space.nodes[n].sin()),
            Representation::F,
        );
        let phi = compute_phi(&s, &FieldState::zero(16), &g).unwrap();
        for n in 0..16 {
            for m in 0..16 {
                let expect = -g.v_phys[m] * g.x_scale * g.space.nodes[n].cos();
                assert_abs_diff_eq!(phi[[n, m]], expect, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn phi_shape_mismatch() {
        let g = grid_for(BasisKind::FourierPeriodic);
        let s = DistributionState::new(Array2::ones((8, 16)), Representation::F);
        assert!(compute_phi(&s, &FieldState::zero(16), &g).is_err());
    }

    /// Φ against −v f_x + E f_v of a smooth function, differentiated by
    /// central differences of its closed form.
    #[test]
    fn phi_matches_finite_differences() {
        let cases = [BasisKind::FourierPeriodic, BasisKind::Legendre, BasisKind::Hermite];
        for kind in cases {
            let g = grid_for(kind);
            // Smooth state inside each interpolation space.
            let f = |x: f64, v: f64| -> f64 {
                let xv = 1.0 + 0.3 * (0.5 * x).cos() + 0.1 * (1.0 * x).sin();
                let vv = match kind {
                    BasisKind::FourierPeriodic => 1.0 + 0.4 * (TAU * (v + 5.0) / 10.0).sin(),
                    BasisKind::Legendre => (1.0 - (v / 5.0).powi(2)) * (1.0 + 0.1 * v),
                    BasisKind::Hermite => (-v * v).exp() * (1.0 + 0.2 * v - 0.05 * v.powi(3)),
                };
                xv * vv
            };
            let e_of = |x: f64| 0.7 * (0.5 * x).sin();
            let field = FieldState::from_values(g.x_phys.iter().map(|&x| e_of(x)).collect());
            let repr = Representation::for_basis(kind);
            let coeffs = Array2::from_shape_fn((16, 16), |(n, m)| {
                let v = f(g.x_phys[n], g.v_phys[m]);
                match repr {
                    Representation::F => v,
                    Representation::HermiteP => v / g.velocity.weight_at_nodes[m],
                }
            });
            let phi = compute_phi(&DistributionState::new(coeffs, repr), &field, &g).unwrap();
            let h = 1e-5;
            for n in 0..16 {
                for m in 0..16 {
                    let (x, v) = (g.x_phys[n], g.v_phys[m]);
                    let fx = (f(x + h, v) - f(x - h, v)) / (2.0 * h);
                    let fv = (f(x, v + h) - f(x, v - h)) / (2.0 * h);
                    let mut expect = -v * fx + e_of(x) * fv;
                    let mut got = phi[[n, m]];
                    if repr == Representation::HermiteP {
                        expect /= g.velocity.weight_at_nodes[m];
                        got *= 1.0;
                    }
                    let scale = expect.abs().max(1.0);
                    assert!((got - expect).abs() / scale <= 1e-6, "{kind} n={n} m={m}: {got} vs {expect}");
                }
            }
        }
    }

    #[test]
    fn euler_conserves_mass_each_basis() {
        for kind in [BasisKind::FourierPeriodic, BasisKind::Hermite] {
            let (_, g, s, f) = two_stream_state(kind);
            let next = euler_step(&s, &f, &g, &Forcing::None, 0.0, 0.01).unwrap();
            let (q0, q1) = (mass(&s, &g), mass(&next, &g));
            assert!(((q1 - q0) / q0).abs() <= 1e-12, "{kind}");
            assert_eq!(next.step_index, 1);
        }
    }

    #[test]
    fn euler_constant_state_is_fixed() {
        let g = grid_for(BasisKind::FourierPeriodic);
        let s = DistributionState::new(Array2::from_elem((16, 16), 0.1), Representation::F);
        let f = field_of(&s, &g).unwrap();
        let next = euler_step(&s, &f, &g, &Forcing::None, 0.0, 0.01).unwrap();
        for (a, b) in next.coeffs.iter().zip(s.coeffs.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(mass(&next, &g), mass(&s, &g), epsilon = 1e-12);
    }

    #[test]
    fn euler_small_dt_limit_and_bad_dt() {
        let (_, g, s, f) = two_stream_state(BasisKind::Legendre);
        let next = euler_step(&s, &f, &g, &Forcing::None, 0.0, 1e-14).unwrap();
        for (a, b) in next.coeffs.iter().zip(s.coeffs.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
        assert!(euler_step(&s, &f, &g, &Forcing::None, 0.0, 0.0).is_err());
    }

    #[test]
    fn euler_is_linear_for_frozen_field() {
        let g = grid_for(BasisKind::Hermite);
        let field = FieldState::from_values(g.x_phys.iter().map(|x| 0.3 * (0.5 * x).cos()).collect());
        let a = Array2::from_shape_fn((16, 16), |(n, m)| ((n * 7 + m * 3) % 11) as f64 * 0.1);
        let b = Array2::from_shape_fn((16, 16), |(n, m)| ((n * 5 + m) % 13) as f64 * -0.07);
        let step = |c: Array2<f64>| {
            euler_step(
                &DistributionState::new(c, Representation::HermiteP),
                &field,
                &g,
                &Forcing::None,
                0.0,
                0.01,
            )
            .unwrap()
            .coeffs
        };
        let sum = step(&a + &b);
        let parts = step(a) + step(b);
        for (x, y) in sum.iter().zip(parts.iter()) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn bdf2_constant_is_fixed_point() {
        let g = grid_for(BasisKind::FourierPeriodic);
        let c = DistributionState::new(Array2::from_elem((16, 16), 0.3), Representation::F);
        let zero = FieldState::zero(16);
        for coupling in [FieldCoupling::Extrapolated, FieldCoupling::Frozen] {
            let next = bdf2_step(&c, &c, &zero, &zero, coupling, &g, &Forcing::None, 0.01, 0.01).unwrap();
            for v in next.coeffs.iter() {
                assert_abs_diff_eq!(*v, 0.3, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn bdf2_couplings_agree_for_equal_fields() {
        let (_, g, s0, f0) = two_stream_state(BasisKind::Hermite);
        let s1 = euler_step(&s0, &f0, &g, &Forcing::None, 0.0, 0.01).unwrap();
        let a = bdf2_step(&s1, &s0, &f0, &f0, FieldCoupling::Extrapolated, &g, &Forcing::None, 0.02, 0.01).unwrap();
        let b = bdf2_step(&s1, &s0, &f0, &f0, FieldCoupling::Frozen, &g, &Forcing::None, 0.02, 0.01).unwrap();
        for (x, y) in a.coeffs.iter().zip(b.coeffs.iter()) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn bdf2_mass_recurrence() {
        for kind in [BasisKind::FourierPeriodic, BasisKind::Hermite] {
            let (_, g, s0, f0) = two_stream_state(kind);
            // Perturb the older level so Q^{k-1} ≠ Q^k.
            let mut older = s0.clone();
            older.coeffs.mapv_inplace(|c| c * 1.01);
            let fo = field_of(&older, &g).unwrap();
            let next = bdf2_step(&s0, &older, &f0, &fo, FieldCoupling::Extrapolated, &g, &Forcing::None, 0.01, 0.01)
                .unwrap();
            let expect = 4.0 / 3.0 * mass(&s0, &g) - 1.0 / 3.0 * mass(&older, &g);
            assert!((mass(&next, &g) - expect).abs() <= 1e-12 * expect.abs(), "{kind}");
        }
    }

    #[test]
    fn bdf2_rejects_mismatched_levels() {
        let (_, g, s0, f0) = two_stream_state(BasisKind::FourierPeriodic);
        let other = DistributionState::new(s0.coeffs.clone(), Representation::HermiteP);
        assert!(bdf2_step(&s0, &other, &f0, &f0, FieldCoupling::Frozen, &g, &Forcing::None, 0.01, 0.01).is_err());
    }

    #[test]
    fn instability_is_reported() {
        let g = grid_for(BasisKind::FourierPeriodic);
        let mut c = Array2::zeros((16, 16));
        c[[2, 3]] = 2e12;
        let s = DistributionState::new(c, Representation::F);
        match euler_step(&s, &FieldState::zero(16), &g, &Forcing::None, 0.0, 1e-3) {
            Err(Error::Instability(r)) => {
                assert_eq!(r.step, 1);
                assert_eq!(r.basis, BasisKind::FourierPeriodic);
                assert!(r.max_abs_coeff > BLOWUP_THRESHOLD);
            }
            other => panic!("expected instability, got {other:?}"),
        }
    }

    #[test]
    fn cfl_bound() {
        let g = grid_for(BasisKind::Legendre);
        let zero = FieldState::zero(16);
        // Legendre nodes stay inside (-5, 5); the bound uses the largest |v_m|.
        let vmax = g.v_phys.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert_abs_diff_eq!(cfl_max_dt(&zero, &g, 2.0, StepperKind::Euler), TAU / (16.0 * vmax), epsilon = 1e-15);
        assert_abs_diff_eq!(
            cfl_max_dt(&zero, &g, 2.0, StepperKind::Bdf2),
            0.5 * TAU / (16.0 * vmax),
            epsilon = 1e-15
        );

        let mut cfg = SimConfig::two_stream(BasisKind::FourierPeriodic);
        cfg.v_extent = crate::config::VelocityExtent::Finite { lo: -5.0, hi: 5.0 };
        let g16 = build_grid(&cfg).unwrap();
        assert_abs_diff_eq!(cfl_max_dt(&zero, &g16, 1.0, StepperKind::Euler), TAU / 80.0, epsilon = 1e-15);
        cfg.n = 32;
        let g32 = build_grid(&cfg).unwrap();
        assert_abs_diff_eq!(
            cfl_max_dt(&FieldState::zero(32), &g32, 1.0, StepperKind::Euler),
            0.5 * TAU / 80.0,
            epsilon = 1e-15
        );

        let mut cfg = SimConfig::two_stream(BasisKind::Hermite);
        cfg.datum = InitialDatum::Custom(std::sync::Arc::new(|_, _| 0.0));
        let gh = build_grid(&cfg).unwrap();
        let mut gz = gh.clone();
        gz.v_phys = vec![0.0; 16];
        assert_eq!(cfl_max_dt(&zero, &gz, 2.0, StepperKind::Euler), f64::INFINITY);
    }

    #[test]
    fn advance_with_zero_end_time() {
        let mut cfg = SimConfig::two_stream(BasisKind::FourierPeriodic);
        cfg.t_end = 0.0;
        let run = advance(&cfg).unwrap();
        assert_eq!(run.records.len(), 1);
        assert_eq!(run.steps, 0);
        assert!(run.is_stable());
    }

    #[test]
    fn advance_records_cadence_and_snapshots() {
        let mut cfg = SimConfig::two_stream(BasisKind::FourierPeriodic);
        cfg.t_end = 0.5;
        cfg.diag_every = 7;
        cfg.snapshot_times = vec![0.0, 0.25, 0.5, 9.0];
        let run = advance(&cfg).unwrap();
        assert_eq!(run.steps, 50);
        let ts: Vec<f64> = run.records.iter().map(|r| r.t).collect();
        assert_eq!(ts.len(), 1 + 7 + 1);
        assert_abs_diff_eq!(*ts.last().unwrap(), 0.5, epsilon = 1e-12);
        let snap_t: Vec<f64> = run.snapshots.iter().map(|s| s.t).collect();
        assert_eq!(snap_t, vec![0.0, 0.25, 0.5]);
        assert_eq!(run.snapshots[2].state, run.final_state);
    }

    #[test]
    fn hermite_representation_commutes_with_diagnostics() {
        // Q_r from p-coefficients with absorbed weights equals Q_r from
        // f-values with the plain Gauss weights divided back by ω.
        let mut cfg = SimConfig::two_stream(BasisKind::Hermite);
        cfg.t_end = 0.2;
        let run = advance(&cfg).unwrap();
        let g = &run.grid;
        let f = run.final_state.f_values(g);
        for r in 0..3 {
            let mut direct = 0.0;
            for n in 0..16 {
                for m in 0..16 {
                    let w = g.velocity.quad_weights[m] / g.velocity.weight_at_nodes[m];
                    direct += g.v_phys[m].powi(r) * f[[n, m]] * w;
                }
            }
            direct *= g.x_weight();
            let q = moment(&run.final_state, g, r as u32);
            assert!((q - direct).abs() <= 1e-12 * q.abs().max(1.0));
        }
    }

    #[test]
    fn manufactured_forcing_single_step_is_second_order_locally() {
        // Euler local error is O(dt²): halving dt quarters the one-step error.
        let mut cfg = SimConfig::two_stream(BasisKind::FourierPeriodic);
        let ms = ManufacturedSolution::for_basis(cfg.basis, cfg.v_extent, 1.0, 0.5);
        cfg.datum = InitialDatum::Manufactured(ms);
        cfg.forcing = Forcing::Manufactured(ms);
        let g = build_grid(&cfg).unwrap();
        let s0 = initialize_state(&cfg, &g).unwrap();
        let f0 = field_of(&s0, &g).unwrap();
        let err = |dt: f64| {
            let s1 = euler_step(&s0, &f0, &g, &cfg.forcing, 0.0, dt).unwrap();
            let mut e: f64 = 0.0;
            for n in 0..16 {
                for m in 0..16 {
                    e = e.max((s1.coeffs[[n, m]] - ms.f(dt, g.x_phys[n], g.v_phys[m])).abs());
                }
            }
            e
        };
        let ratio = err(0.02) / err(0.01);
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }
}
