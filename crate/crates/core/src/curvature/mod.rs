//! The graph metric `g_T + df⊗df` and its scalar invariants.
//!
//! Scalar curvature is assembled as the divergence of a node-wise vector
//! field,
//!
//! `R = div W`, `W_j = (f_ii f_j - f_ij f_i) / (1 + |Df|²)`,
//!
//! and the divergence uses the same central stencil as the gradient. The
//! discrete divergence of any periodic field sums to zero, so `∫R = 0`
//! holds to round-off on every grid.

mod geodesic;

use alloc::vec::Vec;

pub use geodesic::{graph_diameter, GraphDiameter, STENCIL_FACTOR};

use crate::error::{Error, Result};
use crate::field::{Derivatives, ScalarField};
use crate::math::{self, dot, sym_mul_vec, sym_trace};

/// Relative agreement required between `∫R⁺` and `-∫R⁻`.
pub const EXCESS_TOLERANCE: f64 = 1e-8;

/// Node-wise scalar curvature of the graph metric.
pub fn scalar_curvature(field: &ScalarField, derivatives: &Derivatives) -> Vec<f64> {
    let grid = field.grid();
    let n = grid.n();
    let inv = grid.torus().inverse();
    // Lattice components A⁻¹W, one array per axis.
    let mut wl = [alloc::vec![0.0; grid.len()], alloc::vec![0.0; grid.len()], alloc::vec![0.0; grid.len()]];
    for (idx, (g, h)) in derivatives.gradient.iter().zip(&derivatives.hessian).enumerate() {
        let g2 = dot(*g, *g);
        let hg = sym_mul_vec(h, *g);
        let tr = sym_trace(h);
        let weight = 1.0 / (1.0 + g2);
        let w = [weight * (tr * g[0] - hg[0]), weight * (tr * g[1] - hg[1]), weight * (tr * g[2] - hg[2])];
        let l = inv.mul_vec(w);
        for a in 0..3 {
            wl[a][idx] = l[a];
        }
    }
    let half_n = n as f64 / 2.0;
    let mut r = Vec::with_capacity(grid.len());
    for i in 0..n {
        let (ip, im) = ((i + 1) % n, (i + n - 1) % n);
        for j in 0..n {
            let (jp, jm) = ((j + 1) % n, (j + n - 1) % n);
            for k in 0..n {
                let (kp, km) = ((k + 1) % n, (k + n - 1) % n);
                let d = (wl[0][grid.index(ip, j, k)] - wl[0][grid.index(im, j, k)])
                    + (wl[1][grid.index(i, jp, k)] - wl[1][grid.index(i, jm, k)])
                    + (wl[2][grid.index(i, j, kp)] - wl[2][grid.index(i, j, km)]);
                r.push(d * half_n);
            }
        }
    }
    r
}

/// `m(f) = -∫R⁻` together with `∫R⁺`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Excess {
    pub negative: f64,
    pub positive: f64,
}

/// Integrates both parts of `R` and checks they balance.
pub fn negative_excess(field: &ScalarField, curvature: &[f64]) -> Result<Excess> {
    let grid = field.grid();
    let mut neg = 0.0;
    let mut pos = 0.0;
    for &r in curvature {
        if r < 0.0 {
            neg -= r;
        } else {
            pos += r;
        }
    }
    let cell = grid.cell_volume();
    let (negative, positive) = (neg * cell, pos * cell);
    // The absolute floor covers fields whose curvature is pure round-off.
    let scale = negative.max(positive);
    let floor = 1e-12 * (negative + positive) + f64::MIN_POSITIVE;
    if (negative - positive).abs() > EXCESS_TOLERANCE * scale + floor {
        return Err(Error::DiscretizationInconsistency { positive, negative });
    }
    Ok(Excess { negative, positive })
}

/// `min R ≥ -ε ⟹ m ≤ vol(T)·ε`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowerBoundCheck {
    pub epsilon: f64,
    pub min_curvature: f64,
    pub excess: f64,
    pub bound: f64,
    /// `None` when the premise `min R ≥ -ε` fails.
    pub holds: Option<bool>,
}

impl LowerBoundCheck {
    pub fn margin(&self) -> f64 {
        self.bound - self.excess
    }
}

/// Integrand `√(1+|Df|²)` of the graph volume form.
pub fn area_element(derivatives: &Derivatives) -> Vec<f64> {
    derivatives.gradient.iter().map(|g| math::sqrt(1.0 + dot(*g, *g))).collect()
}

/// `vol(M) = ∫ √(1+|Df|²)`.
pub fn graph_volume(field: &ScalarField, derivatives: &Derivatives) -> f64 {
    field.grid().integrate(&area_element(derivatives))
}

/// A field together with its graph-metric invariants.
#[derive(Clone, Debug)]
pub struct GraphTorus {
    field: ScalarField,
    derivatives: Derivatives,
    curvature: Vec<f64>,
    excess: Excess,
    graph_volume: f64,
}

impl GraphTorus {
    pub fn new(field: ScalarField) -> Result<GraphTorus> {
        let derivatives = field.derivatives();
        let curvature = scalar_curvature(&field, &derivatives);
        let excess = negative_excess(&field, &curvature)?;
        let graph_volume = graph_volume(&field, &derivatives);
        Ok(GraphTorus { field, derivatives, curvature, excess, graph_volume })
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn derivatives(&self) -> &Derivatives {
        &self.derivatives
    }

    /// Node-wise `R(f)`.
    pub fn scalar_curvature(&self) -> &[f64] {
        &self.curvature
    }

    /// `m(f)`.
    pub fn excess(&self) -> f64 {
        self.excess.negative
    }

    /// `∫R⁺`, equal to `m(f)` up to [`EXCESS_TOLERANCE`].
    pub fn positive_part(&self) -> f64 {
        self.excess.positive
    }

    /// Discrete `∫R`.
    pub fn total_curvature(&self) -> f64 {
        self.field.grid().integrate(&self.curvature)
    }

    pub fn graph_volume(&self) -> f64 {
        self.graph_volume
    }

    pub fn min_f(&self) -> f64 {
        self.field.min()
    }

    pub fn min_curvature(&self) -> f64 {
        self.curvature.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_curvature(&self) -> f64 {
        self.curvature.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn lower_bound_check(&self, epsilon: f64) -> LowerBoundCheck {
        let min_curvature = self.min_curvature();
        let bound = self.field.torus().volume() * epsilon;
        let excess = self.excess();
        let holds = if min_curvature >= -epsilon { Some(excess <= bound * (1.0 + 1e-12)) } else { None };
        LowerBoundCheck { epsilon, min_curvature, excess, bound, holds }
    }

    /// Upper estimate of the intrinsic diameter of the graph.
    pub fn diameter(&self) -> GraphDiameter {
        graph_diameter(&self.field, &self.derivatives)
    }
}
