//! Simulation configuration shared by the grid, the stepper and the CLI.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::basis::BasisKind;
use crate::datum::{Forcing, InitialDatum};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VelocityExtent {
    Finite { lo: f64, hi: f64 },
    WholeLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepperKind {
    Euler,
    Bdf2,
}

impl fmt::Display for StepperKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepperKind::Euler => "euler",
            StepperKind::Bdf2 => "bdf2",
        })
    }
}

impl FromStr for StepperKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "euler" => Ok(StepperKind::Euler),
            "bdf2" | "bdf" => Ok(StepperKind::Bdf2),
            other => Err(Error::InvalidParameter(format!("unknown stepper `{other}`"))),
        }
    }
}

/// Which field multiplies the velocity derivative of the older level in BDF2.
///
/// `Extrapolated` evaluates each tendency with its own field,
/// `2 Φ(c^k, E^k) − Φ(c^{k-1}, E^{k-1})`, and is second order in `Δt`.
/// `Frozen` applies `E^k` to the extrapolated coefficients `2c^k − c^{k-1}`;
/// it coincides with `Extrapolated` for a static field but drops to first
/// order when the field evolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldCoupling {
    Extrapolated,
    Frozen,
}

impl fmt::Display for FieldCoupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldCoupling::Extrapolated => "extrapolated",
            FieldCoupling::Frozen => "frozen",
        })
    }
}

impl FromStr for FieldCoupling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "extrapolated" => Ok(FieldCoupling::Extrapolated),
            "frozen" => Ok(FieldCoupling::Frozen),
            other => Err(Error::InvalidParameter(format!("unknown BDF field coupling `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    TwoStream,
    InterpolationStudy,
    ManufacturedConvergence,
    Custom,
}

impl CaseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseKind::TwoStream => "two_stream",
            CaseKind::InterpolationStudy => "interpolation_study",
            CaseKind::ManufacturedConvergence => "manufactured_convergence",
            CaseKind::Custom => "custom",
        }
    }
}

impl fmt::Display for CaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "two_stream" => Ok(CaseKind::TwoStream),
            "interpolation_study" | "interpolation" => Ok(CaseKind::InterpolationStudy),
            "manufactured_convergence" | "manufactured" => Ok(CaseKind::ManufacturedConvergence),
            "custom" => Ok(CaseKind::Custom),
            other => Err(Error::InvalidParameter(format!("unknown case `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub case: CaseKind,
    pub basis: BasisKind,
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    /// Physical periodic interval `[lo, hi)`.
    pub x_extent: (f64, f64),
    pub v_extent: VelocityExtent,
    pub dt: f64,
    pub t_end: f64,
    pub stepper: StepperKind,
    pub field_coupling: FieldCoupling,
    /// CFL exponent on `M`; `None` picks the per-basis default.
    pub cfl_sigma: Option<f64>,
    pub datum: InitialDatum,
    pub forcing: Forcing,
    /// Record diagnostics every this many steps (the final step is always
    /// recorded).
    pub diag_every: usize,
    pub snapshot_times: Vec<f64>,
    pub moment_orders: Vec<u32>,
    pub out_dir: PathBuf,
    /// Hermite stretches for the interpolation study.
    pub interp_alphas: Vec<f64>,
}

impl SimConfig {
    /// Two-stream benchmark defaults on `[0, 4π) × [-5, 5]`.
    pub fn two_stream(basis: BasisKind) -> Self {
        SimConfig {
            case: CaseKind::TwoStream,
            basis,
            n: 16,
            m: 16,
            alpha: 1.0,
            x_extent: (0.0, 4.0 * PI),
            v_extent: default_v_extent(basis),
            dt: 0.01,
            t_end: 30.0,
            stepper: StepperKind::Bdf2,
            field_coupling: FieldCoupling::Extrapolated,
            cfl_sigma: None,
            datum: InitialDatum::two_stream(),
            forcing: Forcing::None,
            diag_every: 1,
            snapshot_times: vec![25.0, 30.0],
            moment_orders: vec![0, 1, 2],
            out_dir: PathBuf::from("out"),
            interp_alphas: vec![0.4, 0.9, 1.0, 1.1, 1.8],
        }
    }

    pub fn sigma(&self) -> f64 {
        self.cfl_sigma.unwrap_or(match self.basis {
            BasisKind::FourierPeriodic => 1.0,
            BasisKind::Legendre | BasisKind::Hermite => 2.0,
        })
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return bad(format!("t_end must be non-negative, got {}", self.t_end));
        }
        if let Some(s) = self.cfl_sigma {
            if !(s.is_finite() && s > 0.0) {
                return bad(format!("cfl_sigma must be positive, got {s}"));
            }
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if self.basis != BasisKind::Hermite && self.alpha != 1.0 {
            return bad(format!("alpha = {} is only allowed with the Hermite basis", self.alpha));
        }
        let (xl, xh) = self.x_extent;
        if !(xl.is_finite() && xh.is_finite() && xh > xl) {
            return bad(format!("x extent [{xl}, {xh}) has non-positive length"));
        }
        match (self.basis, self.v_extent) {
            (BasisKind::Hermite, VelocityExtent::Finite { .. }) => {
                return bad("the Hermite basis requires the whole real line as velocity extent".into())
            }
            (BasisKind::FourierPeriodic | BasisKind::Legendre, VelocityExtent::WholeLine) => {
                return bad(format!("the {} basis requires a finite velocity extent", self.basis))
            }
            (_, VelocityExtent::Finite { lo, hi }) if !(lo.is_finite() && hi.is_finite() && hi > lo) => {
                return bad(format!("velocity extent [{lo}, {hi}] has non-positive length"))
            }
            _ => {}
        }
        if self.diag_every == 0 {
            return bad("diag_every must be at least 1".into());
        }
        if self.interp_alphas.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return bad("interpolation alphas must be positive".into());
        }
        Ok(())
    }
}

pub fn default_v_extent(basis: BasisKind) -> VelocityExtent {
    match basis {
        BasisKind::Hermite => VelocityExtent::WholeLine,
        _ => VelocityExtent::Finite { lo: -5.0, hi: 5.0 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_stream_defaults_validate() {
        for kind in [BasisKind::FourierPeriodic, BasisKind::Legendre, BasisKind::Hermite] {
            let c = SimConfig::two_stream(kind);
            c.validate().unwrap();
            assert_eq!(c.steps(), 3000);
        }
    }

    #[test]
    fn validation_rules() {
        let mut c = SimConfig::two_stream(BasisKind::Legendre);
        c.alpha = 2.0;
        assert!(c.validate().is_err());
        let mut c = SimConfig::two_stream(BasisKind::FourierPeriodic);
        c.dt = -1.0;
        assert!(c.validate().is_err());
        let mut c = SimConfig::two_stream(BasisKind::Legendre);
        c.v_extent = VelocityExtent::WholeLine;
        assert!(c.validate().is_err());
        let mut c = SimConfig::two_stream(BasisKind::Hermite);
        c.v_extent = VelocityExtent::Finite { lo: -5.0, hi: 5.0 };
        assert!(c.validate().is_err());
        let mut c = SimConfig::two_stream(BasisKind::FourierPeriodic);
        c.x_extent = (1.0, 1.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn sigma_defaults() {
        assert_eq!(SimConfig::two_stream(BasisKind::FourierPeriodic).sigma(), 1.0);
        assert_eq!(SimConfig::two_stream(BasisKind::Hermite).sigma(), 2.0);
        let mut c = SimConfig::two_stream(BasisKind::Legendre);
        c.cfl_sigma = Some(1.5);
        assert_eq!(c.sigma(), 1.5);
    }
}
