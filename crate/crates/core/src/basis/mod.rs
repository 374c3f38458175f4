//! Collocation bases for the space and velocity directions.
//!
//! Space is always periodic (trigonometric cardinal functions on `N` equispaced
//! nodes of `[0, 2π)`). Velocity uses one of:
//!
//! - `FourierPeriodic`: the same trigonometric basis on `M` nodes of `[0, 2π)`.
//! - `Legendre`: the `M` zeros of `P'_{M+1}` in `(-1, 1)`, with cardinal
//!   functions `B_j(v) = (v²-1) P'_{M+1}(v) / ((M+1)(M+2)(v-v_j) P_{M+1}(v_j))`,
//!   which vanish at `v = ±1`.
//! - `Hermite`: the zeros of `H_M` divided by the stretch `α`, for the weight
//!   `exp(-α² v²)`.
//!
//! All matrices and node vectors are in reference coordinates; physical maps
//! live in [`crate::grid`].

mod orthopoly;
mod poly;
mod trig;

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    FourierPeriodic,
    Legendre,
    Hermite,
}

impl BasisKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BasisKind::FourierPeriodic => "fourier",
            BasisKind::Legendre => "legendre",
            BasisKind::Hermite => "hermite",
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fourier" | "fourier_periodic" | "periodic" => Ok(BasisKind::FourierPeriodic),
            "legendre" => Ok(BasisKind::Legendre),
            "hermite" => Ok(BasisKind::Hermite),
            other => Err(Error::InvalidParameter(format!("unknown basis kind `{other}`"))),
        }
    }
}

/// Cardinal (Lagrangian) functions attached to a node set.
pub trait Cardinal {
    fn size(&self) -> usize;

    fn nodes(&self) -> &[f64];

    /// Closed-form `B_j(v)`. Evaluation exactly at a node returns the
    /// Kronecker delta without forming the quotient.
    fn eval_lagrangian(&self, j: usize, v: f64) -> Result<f64>;
}

fn check_index(j: usize, len: usize) -> Result<()> {
    if j < len {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index: j, len })
    }
}

fn node_hit(nodes: &[f64], j: usize, v: f64) -> Option<f64> {
    nodes
        .iter()
        .position(|&x| x == v)
        .map(|k| if k == j { 1.0 } else { 0.0 })
}

/// Periodic basis for `x` on `[0, 2π)`.
#[derive(Debug, Clone)]
pub struct SpaceBasis {
    pub n: usize,
    pub nodes: Vec<f64>,
    pub diff1: Array2<f64>,
}

pub fn build_space_basis(n: usize) -> Result<SpaceBasis> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "space resolution N must be even and at least 4, got {n}"
        )));
    }
    Ok(SpaceBasis {
        n,
        nodes: trig::nodes(n),
        diff1: trig::first_derivative(n),
    })
}

impl SpaceBasis {
    /// `d^(N,s)` for `s ∈ {0, 1, 2}`.
    pub fn diff_matrix(&self, s: usize) -> Result<Array2<f64>> {
        match s {
            0 => Ok(Array2::eye(self.n)),
            1 => Ok(self.diff1.clone()),
            2 => Ok(trig::second_derivative(self.n)),
            _ => Err(Error::InvalidParameter(format!("derivative order {s} not supported"))),
        }
    }

    pub fn interpolate(&self, samples: &[f64], points: &[f64]) -> Result<Vec<f64>> {
        check_len(samples.len(), self.n)?;
        Ok(points.iter().map(|&x| trig::interpolate(samples, x)).collect())
    }
}

impl Cardinal for SpaceBasis {
    fn size(&self) -> usize {
        self.n
    }

    fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    fn eval_lagrangian(&self, j: usize, x: f64) -> Result<f64> {
        check_index(j, self.n)?;
        if let Some(d) = node_hit(&self.nodes, j, x) {
            return Ok(d);
        }
        Ok(trig::cardinal(self.n, j, x))
    }
}

#[derive(Debug, Clone)]
enum Interpolant {
    Trig,
    /// Polynomial barycentric data. For Legendre the node list is extended
    /// by the endpoints ±1 where the interpolant is pinned to zero.
    Poly {
        nodes: Vec<f64>,
        bary: Vec<f64>,
        pinned_ends: bool,
    },
}

/// Velocity discretization: nodes, quadrature, differentiation and weight.
#[derive(Debug, Clone)]
pub struct VelocityBasis {
    pub kind: BasisKind,
    pub m: usize,
    pub alpha: f64,
    pub nodes: Vec<f64>,
    pub quad_weights: Vec<f64>,
    pub diff1: Array2<f64>,
    /// `ω(v_j)`: one for Fourier and Legendre, `exp(-α² v_j²)` for Hermite.
    pub weight_at_nodes: Vec<f64>,
    diff2: Array2<f64>,
    interp: Interpolant,
}

pub fn build_velocity_basis(kind: BasisKind, m: usize, alpha: f64) -> Result<VelocityBasis> {
    if m < 4 {
        return Err(Error::InvalidParameter(format!("velocity resolution M must be at least 4, got {m}")));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    if kind != BasisKind::Hermite && alpha != 1.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha = {alpha} is only meaningful for the Hermite basis"
        )));
    }
    match kind {
        BasisKind::FourierPeriodic => {
            if !m.is_multiple_of(2) {
                return Err(Error::InvalidParameter(format!(
                    "Fourier velocity basis needs even M, got {m}"
                )));
            }
            Ok(VelocityBasis {
                kind,
                m,
                alpha,
                nodes: trig::nodes(m),
                quad_weights: vec![std::f64::consts::TAU / m as f64; m],
                diff1: trig::first_derivative(m),
                weight_at_nodes: vec![1.0; m],
                diff2: trig::second_derivative(m),
                interp: Interpolant::Trig,
            })
        }
        BasisKind::Legendre => {
            let (nodes, quad_weights) = orthopoly::lobatto_interior(m)?;
            let mut ext = Vec::with_capacity(m + 2);
            ext.push(-1.0);
            ext.extend_from_slice(&nodes);
            ext.push(1.0);
            let bary = poly::barycentric_weights(&ext);
            let (d1, d2) = poly::derivative_matrices(&ext, &bary);
            let interior = |d: &Array2<f64>| d.slice(ndarray::s![1..=m, 1..=m]).to_owned();
            Ok(VelocityBasis {
                kind,
                m,
                alpha,
                diff1: interior(&d1),
                diff2: interior(&d2),
                weight_at_nodes: vec![1.0; m],
                nodes,
                quad_weights,
                interp: Interpolant::Poly {
                    nodes: ext,
                    bary,
                    pinned_ends: true,
                },
            })
        }
        BasisKind::Hermite => {
            let (unit_nodes, unit_weights) = orthopoly::gauss_hermite(m)?;
            let bary = poly::barycentric_weights(&unit_nodes);
            let nodes: Vec<f64> = unit_nodes.iter().map(|z| z / alpha).collect();
            // Weight ratios are invariant under the stretch; building on the
            // stretched nodes keeps the diagonal an exact negative row sum.
            let (d1, d2) = poly::derivative_matrices(&nodes, &bary);
            Ok(VelocityBasis {
                kind,
                m,
                alpha,
                quad_weights: unit_weights.iter().map(|w| w / alpha).collect(),
                diff1: d1,
                diff2: d2,
                weight_at_nodes: unit_nodes.iter().map(|z| (-z * z).exp()).collect(),
                interp: Interpolant::Poly {
                    nodes: nodes.clone(),
                    bary,
                    pinned_ends: false,
                },
                nodes,
            })
        }
    }
}

fn check_len(got: usize, expected: usize) -> Result<()> {
    if got == expected {
        Ok(())
    } else {
        Err(Error::SizeMismatch {
            expected: expected.to_string(),
            got: got.to_string(),
        })
    }
}

impl VelocityBasis {
    /// `d^(M,s)` for `s ∈ {0, 1, 2}`.
    pub fn diff_matrix(&self, s: usize) -> Result<Array2<f64>> {
        match s {
            0 => Ok(Array2::eye(self.m)),
            1 => Ok(self.diff1.clone()),
            2 => Ok(self.diff2.clone()),
            _ => Err(Error::InvalidParameter(format!("derivative order {s} not supported"))),
        }
    }

    /// Weight function `ω(v)` of the quadrature rule.
    pub fn weight(&self, v: f64) -> f64 {
        match self.kind {
            BasisKind::Hermite => (-(self.alpha * v).powi(2)).exp(),
            _ => 1.0,
        }
    }

    /// Evaluate the basis interpolant of `samples` (values of `f` at the
    /// nodes) at `points`, all in reference coordinates. In the Hermite case
    /// the interpolant is `q(v) exp(-α² v²)` with `q` the polynomial through
    /// `samples_j / ω(v_j)`.
    pub fn interpolate(&self, samples: &[f64], points: &[f64]) -> Result<Vec<f64>> {
        check_len(samples.len(), self.m)?;
        Ok(match &self.interp {
            Interpolant::Trig => points.iter().map(|&v| trig::interpolate(samples, v)).collect(),
            Interpolant::Poly {
                nodes,
                bary,
                pinned_ends: true,
            } => {
                let mut ext = Vec::with_capacity(self.m + 2);
                ext.push(0.0);
                ext.extend_from_slice(samples);
                ext.push(0.0);
                points
                    .iter()
                    .map(|&v| poly::interpolate(nodes, bary, &ext, v))
                    .collect()
            }
            Interpolant::Poly { nodes, bary, .. } => {
                let p: Vec<f64> = samples
                    .iter()
                    .zip(&self.weight_at_nodes)
                    .map(|(s, w)| s / w)
                    .collect();
                points
                    .iter()
                    .map(|&v| {
                        if let Some(k) = nodes.iter().position(|&x| x == v) {
                            samples[k]
                        } else {
                            poly::interpolate(nodes, bary, &p, v) * self.weight(v)
                        }
                    })
                    .collect()
            }
        })
    }
}

impl Cardinal for VelocityBasis {
    fn size(&self) -> usize {
        self.m
    }

    fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    fn eval_lagrangian(&self, j: usize, v: f64) -> Result<f64> {
        check_index(j, self.m)?;
        if let Some(d) = node_hit(&self.nodes, j, v) {
            return Ok(d);
        }
        let m = self.m;
        Ok(match self.kind {
            BasisKind::FourierPeriodic => trig::cardinal(m, j, v),
            BasisKind::Legendre => {
                let n = m + 1;
                let (pj, _) = orthopoly::legendre(n, self.nodes[j]);
                orthopoly::legendre_bubble(n, v)
                    / ((n * (n + 1)) as f64 * (v - self.nodes[j]) * pj)
            }
            BasisKind::Hermite => {
                let z = self.alpha * v;
                let zj = self.alpha * self.nodes[j];
                let (p, _) = orthopoly::hermite_orthonormal(m, z);
                p / ((z - zj) * orthopoly::hermite_orthonormal_derivative(m, zj))
            }
        })
    }
}

/// Free-function form of [`VelocityBasis::interpolate`].
pub fn interpolate_function(basis: &VelocityBasis, samples: &[f64], eval_points: &[f64]) -> Result<Vec<f64>> {
    basis.interpolate(samples, eval_points)
}
