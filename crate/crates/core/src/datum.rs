//! Initial data and source terms, all in physical coordinates.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::basis::BasisKind;
use crate::config::VelocityExtent;

/// Double-Gaussian two-stream parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStreamParams {
    /// Thermal spread of each beam.
    pub a: f64,
    /// Beam velocity.
    pub beta: f64,
    /// Density perturbation amplitude.
    pub epsilon: f64,
    /// Perturbation wavenumber.
    pub kappa: f64,
}

impl Default for TwoStreamParams {
    fn default() -> Self {
        TwoStreamParams {
            a: 1.0 / 8f64.sqrt(),
            beta: 1.0,
            epsilon: 1e-3,
            kappa: 0.5,
        }
    }
}

impl TwoStreamParams {
    /// Unnormalized velocity profile: sum of the two beam Gaussians.
    pub fn xi(&self, v: f64) -> f64 {
        let s = self.a * 2f64.sqrt();
        (-((v - self.beta) / s).powi(2)).exp() + (-((v + self.beta) / s).powi(2)).exp()
    }

    pub fn eval(&self, x: f64, v: f64) -> f64 {
        let norm = 1.0 / (2.0 * self.a * (2.0 * PI).sqrt());
        norm * self.xi(v) * (1.0 + self.epsilon * (self.kappa * x).cos())
    }
}

/// Velocity profile `h(v)` of a manufactured solution, normalized to unit
/// integral over the velocity domain and exactly representable in the
/// matching basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VelocityProfile {
    /// `(1 + cos θ / 2) / L`, `θ = 2π (v - lo) / L`: one periodic mode.
    Periodic { lo: f64, hi: f64 },
    /// `3 (1 - s²) / (2L)`, `s` the affine image of `v` in `[-1, 1]`.
    Bubble { lo: f64, hi: f64 },
    /// `(α/√π) exp(-α² v²) (1 + tilt·v)`.
    Gaussian { alpha: f64, tilt: f64 },
}

impl VelocityProfile {
    pub fn value(&self, v: f64) -> f64 {
        match *self {
            VelocityProfile::Periodic { lo, hi } => {
                let l = hi - lo;
                let th = 2.0 * PI * (v - lo) / l;
                (1.0 + 0.5 * th.cos()) / l
            }
            VelocityProfile::Bubble { lo, hi } => {
                let l = hi - lo;
                let s = (2.0 * v - lo - hi) / l;
                1.5 * (1.0 - s * s) / l
            }
            VelocityProfile::Gaussian { alpha, tilt } => {
                alpha / PI.sqrt() * (-(alpha * v).powi(2)).exp() * (1.0 + tilt * v)
            }
        }
    }

    pub fn derivative(&self, v: f64) -> f64 {
        match *self {
            VelocityProfile::Periodic { lo, hi } => {
                let l = hi - lo;
                let th = 2.0 * PI * (v - lo) / l;
                -0.5 * th.sin() * (2.0 * PI / l) / l
            }
            VelocityProfile::Bubble { lo, hi } => {
                let l = hi - lo;
                let s = (2.0 * v - lo - hi) / l;
                1.5 * (-2.0 * s) * (2.0 / l) / l
            }
            VelocityProfile::Gaussian { alpha, tilt } => {
                let g = alpha / PI.sqrt() * (-(alpha * v).powi(2)).exp();
                g * (tilt - 2.0 * alpha * alpha * v * (1.0 + tilt * v))
            }
        }
    }
}

/// Exact solution `f = h(v) (1 + A e^{-t} cos κx)` of the forced
/// Vlasov–Poisson system `f_t + v f_x − E f_v = g`, `E_x = 1 − ρ`.
///
/// With `∫h = 1` the density is `ρ = 1 + A e^{-t} cos κx` and the
/// zero-mean field is `E = −(A/κ) e^{-t} sin κx`; `g` follows by
/// substituting both into the equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedSolution {
    pub amplitude: f64,
    pub kappa: f64,
    pub profile: VelocityProfile,
}

impl ManufacturedSolution {
    /// Profile suited to `kind` on `v_extent`; `kappa` must fit a whole
    /// number of periods into the space interval.
    pub fn for_basis(kind: BasisKind, v_extent: VelocityExtent, alpha: f64, kappa: f64) -> Self {
        let profile = match (kind, v_extent) {
            (BasisKind::FourierPeriodic, VelocityExtent::Finite { lo, hi }) => VelocityProfile::Periodic { lo, hi },
            (BasisKind::Legendre, VelocityExtent::Finite { lo, hi }) => VelocityProfile::Bubble { lo, hi },
            _ => VelocityProfile::Gaussian { alpha, tilt: 0.3 },
        };
        ManufacturedSolution {
            amplitude: 0.5,
            kappa,
            profile,
        }
    }

    pub fn f(&self, t: f64, x: f64, v: f64) -> f64 {
        self.profile.value(v) * (1.0 + self.amplitude * (-t).exp() * (self.kappa * x).cos())
    }

    pub fn field(&self, t: f64, x: f64) -> f64 {
        -(self.amplitude / self.kappa) * (-t).exp() * (self.kappa * x).sin()
    }

    pub fn density(&self, t: f64, x: f64) -> f64 {
        1.0 + self.amplitude * (-t).exp() * (self.kappa * x).cos()
    }

    pub fn source(&self, t: f64, x: f64, v: f64) -> f64 {
        let decay = self.amplitude * (-t).exp();
        let h = self.profile.value(v);
        let f_t = -decay * (self.kappa * x).cos() * h;
        let f_x = -decay * self.kappa * (self.kappa * x).sin() * h;
        let f_v = (1.0 + decay * (self.kappa * x).cos()) * self.profile.derivative(v);
        f_t + v * f_x - self.field(t, x) * f_v
    }
}

pub type DatumFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type SourceFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Initial distribution `f̄(x, v)`.
#[derive(Clone)]
pub enum InitialDatum {
    TwoStream(TwoStreamParams),
    Manufactured(ManufacturedSolution),
    Custom(DatumFn),
}

impl InitialDatum {
    pub fn two_stream() -> Self {
        InitialDatum::TwoStream(TwoStreamParams::default())
    }

    pub fn eval(&self, x: f64, v: f64) -> f64 {
        match self {
            InitialDatum::TwoStream(p) => p.eval(x, v),
            InitialDatum::Manufactured(m) => m.f(0.0, x, v),
            InitialDatum::Custom(f) => f(x, v),
        }
    }
}

impl fmt::Debug for InitialDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialDatum::TwoStream(p) => f.debug_tuple("TwoStream").field(p).finish(),
            InitialDatum::Manufactured(m) => f.debug_tuple("Manufactured").field(m).finish(),
            InitialDatum::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl PartialEq for InitialDatum {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (InitialDatum::TwoStream(a), InitialDatum::TwoStream(b)) => a == b,
            (InitialDatum::Manufactured(a), InitialDatum::Manufactured(b)) => a == b,
            (InitialDatum::Custom(a), InitialDatum::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

/// Right-hand side `g(t, x, v)` of the Vlasov equation.
#[derive(Clone, Default)]
pub enum Forcing {
    #[default]
    None,
    Manufactured(ManufacturedSolution),
    Custom(SourceFn),
}

impl Forcing {
    pub fn is_none(&self) -> bool {
        matches!(self, Forcing::None)
    }

    pub fn eval(&self, t: f64, x: f64, v: f64) -> f64 {
        match self {
            Forcing::None => 0.0,
            Forcing::Manufactured(m) => m.source(t, x, v),
            Forcing::Custom(g) => g(t, x, v),
        }
    }
}

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Forcing::None => f.write_str("None"),
            Forcing::Manufactured(m) => f.debug_tuple("Manufactured").field(m).finish(),
            Forcing::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl PartialEq for Forcing {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Forcing::None, Forcing::None) => true,
            (Forcing::Manufactured(a), Forcing::Manufactured(b)) => a == b,
            (Forcing::Custom(a), Forcing::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}
