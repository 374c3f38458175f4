//! Semi-Lagrangian spectral solver for the 1D-1V Vlasov–Poisson system.
//!
//! The distribution function is represented by its values at a tensor grid of
//! collocation nodes: periodic Fourier nodes in `x` and one of three velocity
//! discretizations in `v` (periodic Fourier, Legendre with homogeneous
//! Dirichlet data at the interval ends, or scaled Hermite with a Gaussian
//! weight). Each time step backtracks the characteristics to first order and
//! advances the nodal coefficients with forward Euler or a two-step BDF
//! formula. The electric field comes from a spectral antiderivative of the
//! charge density.
//!
//! Module map:
//!
//! - [`basis`]: nodes, quadrature weights, cardinal functions, differentiation
//!   matrices and interpolation.
//! - [`grid`]: physical phase-space extents and maps to the reference domains.
//! - [`field`]: charge density and the zero-mean field solve.
//! - [`stepper`]: tendency assembly, Euler/BDF2 steps, CFL bound, time loop.
//! - [`diagnostics`]: mass, velocity moments, energy and drift.
//! - [`io`]: config parsing, run cases and output files.

pub mod basis;
pub mod config;
pub mod datum;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod stepper;

pub use basis::{build_space_basis, build_velocity_basis, BasisKind, Cardinal, SpaceBasis, VelocityBasis};
pub use config::{FieldCoupling, SimConfig, StepperKind, VelocityExtent};
pub use diagnostics::DiagnosticsRecord;
pub use error::{Error, InstabilityReport, Result};
pub use field::{DensityProfile, FieldState};
pub use grid::PhaseGrid;
pub use stepper::{advance, DistributionState, Representation, RunOutcome, RunRecord};
