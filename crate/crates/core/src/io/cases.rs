//! Benchmark cases driven by the CLI.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::basis::BasisKind;
use crate::config::{default_v_extent, SimConfig, StepperKind};
use crate::datum::{InitialDatum, TwoStreamParams};
use crate::error::{Error, Result};
use crate::grid::build_grid;
use crate::stepper::advance;

/// Uniform evaluation grid of the interpolation study.
pub const STUDY_POINTS: usize = 1001;
pub const STUDY_INTERVAL: (f64, f64) = (-5.0, 5.0);

#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationSample {
    pub v: f64,
    pub exact: f64,
    pub approx: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationRow {
    pub basis: BasisKind,
    pub alpha: f64,
    pub m: usize,
    pub max_error: f64,
}

pub fn study_points() -> Vec<f64> {
    let (lo, hi) = STUDY_INTERVAL;
    (0..STUDY_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (STUDY_POINTS - 1) as f64)
        .collect()
}

/// Interpolate the two-stream velocity profile `ξ` from `M` nodes of `basis`
/// onto `points` (physical velocities).
pub fn interpolate_profile(basis: BasisKind, m: usize, alpha: f64, points: &[f64]) -> Result<Vec<InterpolationSample>> {
    let params = TwoStreamParams::default();
    let mut cfg = SimConfig::two_stream(basis);
    cfg.m = m;
    cfg.alpha = alpha;
    cfg.v_extent = default_v_extent(basis);
    let grid = build_grid(&cfg)?;
    let samples: Vec<f64> = grid.v_phys.iter().map(|&v| params.xi(v)).collect();
    let reference: Vec<f64> = points.iter().map(|&v| grid.v_unmap(v)).collect();
    let approx = grid.velocity.interpolate(&samples, &reference)?;
    Ok(points
        .iter()
        .zip(approx)
        .map(|(&v, a)| InterpolationSample {
            v,
            exact: params.xi(v),
            approx: a,
        })
        .collect())
}

pub fn sup_error(samples: &[InterpolationSample]) -> f64 {
    samples.iter().map(|s| (s.exact - s.approx).abs()).fold(0.0, f64::max)
}

fn table_name(basis: BasisKind, alpha: f64, m: usize) -> String {
    match basis {
        BasisKind::Hermite => format!("interp_{basis}_alpha{alpha}_M{m}.csv"),
        _ => format!("interp_{basis}_M{m}.csv"),
    }
}

/// Error tables of `ξ` for every basis at `M` and `2M`, each Hermite stretch
/// in `config.interp_alphas`, plus a summary of sup-norm errors.
pub fn run_interpolation_study(config: &SimConfig, out_dir: &Path) -> Result<Vec<InterpolationRow>> {
    let points = study_points();
    let mut runs: Vec<(BasisKind, f64)> = vec![(BasisKind::FourierPeriodic, 1.0), (BasisKind::Legendre, 1.0)];
    runs.extend(config.interp_alphas.iter().map(|&a| (BasisKind::Hermite, a)));
    let mut rows = Vec::new();
    for m in [config.m, 2 * config.m] {
        for &(basis, alpha) in &runs {
            let samples = interpolate_profile(basis, m, alpha, &points)?;
            let mut w = BufWriter::new(File::create(out_dir.join(table_name(basis, alpha, m)))?);
            writeln!(w, "v,exact,approx,error")?;
            for s in &samples {
                writeln!(w, "{},{},{},{}", s.v, s.exact, s.approx, s.approx - s.exact)?;
            }
            w.flush()?;
            rows.push(InterpolationRow {
                basis,
                alpha,
                m,
                max_error: sup_error(&samples),
            });
        }
    }
    let mut w = BufWriter::new(File::create(out_dir.join("interp_summary.csv"))?);
    writeln!(w, "basis,alpha,M,max_error")?;
    for r in &rows {
        writeln!(w, "{},{},{},{}", r.basis, r.alpha, r.m, r.max_error)?;
    }
    w.flush()?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub stepper: StepperKind,
    pub dt: f64,
    pub error: f64,
    /// `log2(e(2Δt) / e(Δt))` against the previous, coarser row.
    pub slope: Option<f64>,
}

/// Max nodal error of `f` at `t_end` against the manufactured solution.
pub fn manufactured_error(config: &SimConfig) -> Result<f64> {
    let InitialDatum::Manufactured(ms) = config.datum else {
        return Err(Error::Config("manufactured error needs the manufactured datum".into()));
    };
    let run = advance(config)?;
    if let crate::stepper::RunOutcome::Unstable(r) = run.outcome {
        return Err(Error::Instability(r));
    }
    let g = &run.grid;
    let f = run.final_state.f_values(g);
    let t = run.steps as f64 * config.dt;
    let mut err: f64 = 0.0;
    for (n, &x) in g.x_phys.iter().enumerate() {
        for (m, &v) in g.v_phys.iter().enumerate() {
            err = err.max((f[[n, m]] - ms.f(t, x, v)).abs());
        }
    }
    Ok(err)
}

/// Time steps `Δt, Δt/2, Δt/4, Δt/8`.
pub fn dt_ladder(dt: f64) -> Vec<f64> {
    (0..4).map(|k| dt / f64::powi(2.0, k)).collect()
}

/// Euler and BDF2 errors over the ladder, written to `convergence.csv`.
pub fn run_convergence(config: &SimConfig, out_dir: &Path) -> Result<Vec<ConvergenceRow>> {
    let mut rows = Vec::new();
    for stepper in [StepperKind::Euler, StepperKind::Bdf2] {
        let mut prev: Option<f64> = None;
        for dt in dt_ladder(config.dt) {
            let mut c = config.clone();
            c.stepper = stepper;
            c.dt = dt;
            let error = manufactured_error(&c)?;
            rows.push(ConvergenceRow {
                stepper,
                dt,
                error,
                slope: prev.map(|p| (p / error).log2()),
            });
            prev = Some(error);
        }
    }
    let mut w = BufWriter::new(File::create(out_dir.join("convergence.csv"))?);
    writeln!(w, "stepper,dt,error,slope")?;
    for r in &rows {
        let slope = r.slope.map_or(String::new(), |s| s.to_string());
        writeln!(w, "{},{},{},{}", r.stepper, r.dt, r.error, slope)?;
    }
    w.flush()?;
    Ok(rows)
}

/// Least-squares slope of `ln e` against `ln Δt`.
pub fn fitted_order(rows: &[ConvergenceRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.dt.ln(), r.error.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::CaseKind;
    use crate::io::config_text::{attach_case_data, case_defaults};

    #[test]
    fn study_grid() {
        let p = study_points();
        assert_eq!(p.len(), 1001);
        assert_eq!(p[0], -5.0);
        assert_eq!(p[1000], 5.0);
        assert!((p[500]).abs() < 1e-15);
    }

    #[test]
    fn profile_is_reproduced_at_nodes() {
        for (basis, alpha) in [
            (BasisKind::FourierPeriodic, 1.0),
            (BasisKind::Legendre, 1.0),
            (BasisKind::Hermite, 1.3),
        ] {
            let mut cfg = SimConfig::two_stream(basis);
            cfg.alpha = alpha;
            let g = build_grid(&cfg).unwrap();
            let s = interpolate_profile(basis, 16, alpha, &g.v_phys).unwrap();
            for x in &s {
                assert!((x.exact - x.approx).abs() <= 1e-12 * x.exact.abs().max(1.0), "{basis}");
            }
        }
    }

    #[test]
    fn refinement_reduces_error() {
        let p = study_points();
        for basis in [BasisKind::FourierPeriodic, BasisKind::Legendre, BasisKind::Hermite] {
            let e16 = sup_error(&interpolate_profile(basis, 16, 1.0, &p).unwrap());
            let e32 = sup_error(&interpolate_profile(basis, 32, 1.0, &p).unwrap());
            assert!(e32 < e16, "{basis}: {e32} vs {e16}");
        }
    }

    #[test]
    fn study_writes_tables() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = case_defaults(CaseKind::InterpolationStudy, BasisKind::FourierPeriodic);
        c.interp_alphas = vec![0.9, 1.8];
        attach_case_data(&mut c);
        let rows = run_interpolation_study(&c, dir.path()).unwrap();
        assert_eq!(rows.len(), 2 * 4);
        for name in ["interp_summary.csv", "interp_fourier_M16.csv", "interp_hermite_alpha1.8_M32.csv"] {
            assert!(dir.path().join(name).exists(), "{name}");
        }
        let table = std::fs::read_to_string(dir.path().join("interp_legendre_M16.csv")).unwrap();
        assert_eq!(table.lines().count(), 1 + STUDY_POINTS);
    }

    #[test]
    fn ladder_and_fit() {
        assert_eq!(dt_ladder(4e-3), vec![4e-3, 2e-3, 1e-3, 5e-4]);
        let rows: Vec<ConvergenceRow> = dt_ladder(0.1)
            .into_iter()
            .map(|dt| ConvergenceRow {
                stepper: StepperKind::Bdf2,
                dt,
                error: 3.0 * dt * dt,
                slope: None,
            })
            .collect();
        assert!((fitted_order(&rows) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn manufactured_error_requires_manufactured_datum() {
        let c = SimConfig::two_stream(BasisKind::FourierPeriodic);
        assert!(manufactured_error(&c).is_err());
    }
}
