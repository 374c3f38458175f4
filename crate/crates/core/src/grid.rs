//! Physical phase space, reference domains and the chain-rule factors
//! between them.
//!
//! The solver works on `[0, 2π)` in `x` and on the basis's reference interval
//! in `v`. Physical derivatives pick up `x_scale` and `v_scale`; physical
//! integrals over `x` and `v` pick up `1/x_scale` and `1/v_scale`.

use std::f64::consts::TAU;

use crate::basis::{build_space_basis, build_velocity_basis, BasisKind, SpaceBasis, VelocityBasis};
use crate::config::{SimConfig, VelocityExtent};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct PhaseGrid {
    pub x_extent: (f64, f64),
    pub v_extent: VelocityExtent,
    /// `2π / |Ω_x|`.
    pub x_scale: f64,
    /// Derivative of the inverse velocity map (`d v_ref / d v_phys`).
    pub v_scale: f64,
    pub space: SpaceBasis,
    pub velocity: VelocityBasis,
    /// Physical coordinates of the space nodes.
    pub x_phys: Vec<f64>,
    /// Physical coordinates of the velocity nodes.
    pub v_phys: Vec<f64>,
    v_origin: f64,
    v_ref_origin: f64,
}

pub fn build_grid(config: &SimConfig) -> Result<PhaseGrid> {
    let (xl, xh) = config.x_extent;
    if !xl.is_finite() || !xh.is_finite() || xh <= xl {
        return Err(Error::Config(format!("x extent [{xl}, {xh}) has non-positive length")));
    }
    let space = build_space_basis(config.n)?;
    let velocity = build_velocity_basis(config.basis, config.m, config.alpha)?;
    let x_scale = TAU / (xh - xl);

    // v_phys = v_origin + (v_ref - v_ref_origin) / v_scale
    let (v_scale, v_origin, v_ref_origin) = match (config.basis, config.v_extent) {
        (BasisKind::Hermite, VelocityExtent::WholeLine) => (1.0, 0.0, 0.0),
        (BasisKind::Hermite, VelocityExtent::Finite { .. }) => {
            return Err(Error::Config("finite velocity extent given for the Hermite basis".into()))
        }
        (_, VelocityExtent::WholeLine) => {
            return Err(Error::Config(format!("the {} basis needs a finite velocity extent", config.basis)))
        }
        (kind, VelocityExtent::Finite { lo, hi }) => {
            if !lo.is_finite() || !hi.is_finite() || hi <= lo {
                return Err(Error::Config(format!("velocity extent [{lo}, {hi}] has non-positive length")));
            }
            match kind {
                BasisKind::FourierPeriodic => (TAU / (hi - lo), lo, 0.0),
                _ => (2.0 / (hi - lo), 0.5 * (lo + hi), 0.0),
            }
        }
    };

    let mut grid = PhaseGrid {
        x_extent: config.x_extent,
        v_extent: config.v_extent,
        x_scale,
        v_scale,
        x_phys: Vec::new(),
        v_phys: Vec::new(),
        space,
        velocity,
        v_origin,
        v_ref_origin,
    };
    grid.x_phys = grid.space.nodes.iter().map(|&x| grid.x_map(x)).collect();
    grid.v_phys = grid.velocity.nodes.iter().map(|&v| grid.v_map(v)).collect();
    Ok(grid)
}

impl PhaseGrid {
    pub fn n(&self) -> usize {
        self.space.n
    }

    pub fn m(&self) -> usize {
        self.velocity.m
    }

    pub fn kind(&self) -> BasisKind {
        self.velocity.kind
    }

    pub fn x_length(&self) -> f64 {
        self.x_extent.1 - self.x_extent.0
    }

    pub fn x_map(&self, x_ref: f64) -> f64 {
        self.x_extent.0 + x_ref / self.x_scale
    }

    pub fn x_unmap(&self, x: f64) -> f64 {
        (x - self.x_extent.0) * self.x_scale
    }

    pub fn v_map(&self, v_ref: f64) -> f64 {
        self.v_origin + (v_ref - self.v_ref_origin) / self.v_scale
    }

    pub fn v_unmap(&self, v: f64) -> f64 {
        self.v_ref_origin + (v - self.v_origin) * self.v_scale
    }

    /// `d v_phys / d v_ref`, the measure factor for velocity quadrature.
    pub fn v_jacobian(&self) -> f64 {
        1.0 / self.v_scale
    }

    /// Physical quadrature weights for `∫ · dv` (Hermite weights keep the
    /// Gaussian factor absorbed).
    pub fn v_weights(&self) -> Vec<f64> {
        let jac = self.v_jacobian();
        self.velocity.quad_weights.iter().map(|w| w * jac).collect()
    }

    /// Weight of a single space node for `∫ · dx` (trapezoid rule).
    pub fn x_weight(&self) -> f64 {
        self.x_length() / self.n() as f64
    }
}
