//! Sequence experiments: field families whose excess tends to zero,
//! converging lattice sequences, and the bi-Lipschitz flat-distance
//! estimate.
//!
//! Nothing here computes an intrinsic flat distance. The outputs are the
//! computable upper-bound ingredients.

use alloc::vec::Vec;

use crate::curvature::GraphTorus;
use crate::error::{Error, Result};
use crate::field::{FieldFamily, Grid};
use crate::lattice::FlatTorus;
use crate::levelset::{uniform_heights, LevelSetAnalyzer};
use crate::math::{self, Mat3};
use crate::membership::{class_membership, MembershipTolerances};
use crate::stability::{StabilityOptions, StabilityReport};

/// Parameterized families indexed by `j ≥ 1`.
#[derive(Clone, Debug, PartialEq)]
pub enum SweepFamily {
    /// Centred well of depth `depth0 / j` on a fixed torus.
    RadialWell { torus: FlatTorus, depth0: f64, radius: f64 },
    /// Torus with third generator scaled by `1/j`, carrying a centred well
    /// of depth `depth0 / j` and radius `radius / j`. The volume tends to 0.
    Collapsing { torus: FlatTorus, depth0: f64, radius: f64 },
}

impl SweepFamily {
    pub fn member(&self, j: usize) -> Result<(FlatTorus, FieldFamily)> {
        if j == 0 {
            return Err(Error::Parameter { name: "j", value: 0.0, expected: ">= 1" });
        }
        let s = 1.0 / j as f64;
        match self {
            SweepFamily::RadialWell { torus, depth0, radius } => {
                Ok((torus.clone(), FieldFamily::centered_well(torus, depth0 * s, *radius)))
            }
            SweepFamily::Collapsing { torus, depth0, radius } => {
                let [a1, a2, a3] = *torus.generators();
                let t = FlatTorus::new([a1, a2, math::scale(a3, s)])?;
                let w = FieldFamily::centered_well(&t, depth0 * s, radius * s);
                Ok((t, w))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRecord {
    pub j: usize,
    pub m: f64,
    pub min_f: f64,
    pub min_curvature: f64,
    pub h0: f64,
    pub h0_uncertainty: f64,
    pub h0_bound: f64,
    pub vol_t: f64,
    pub vol_m: f64,
    pub vol_upper: f64,
    pub flat_bound_closed_form: f64,
    pub flat_bound_direct: f64,
    /// `|min f| m²`.
    pub tracker: f64,
    pub admissible: bool,
    /// Per-instance checks: `h0` bound, volume sandwich, fills, comparison.
    pub checks_pass: bool,
}

/// Builds member `j` and runs the full stability chain on it.
pub fn sweep_instance(
    family: &SweepFamily,
    j: usize,
    n: usize,
    options: &StabilityOptions,
) -> Result<ConvergenceRecord> {
    let (torus, member) = family.member(j)?;
    let field = member.sample(Grid::new(torus, n)?)?;
    let graph = GraphTorus::new(field)?;
    let analyzer = LevelSetAnalyzer::new(graph.field(), graph.derivatives());
    let profile = analyzer.perimeter_profile(&uniform_heights(graph.min_f(), graph.field().max(), options.heights));
    let membership = class_membership(
        graph.field(),
        &profile,
        MembershipTolerances::relative_to(graph.field()),
        analyzer.options().convexity_tol,
    );
    let report = StabilityReport::compute(&graph, &analyzer, &profile, options)?;
    let checks_pass = report.h0_bound_pass()
        && report.volumes.sandwich_pass()
        && report.flat.direct_pass(0.0)
        && report.flat.plus_pass()
        && report.comparison_pass();
    Ok(ConvergenceRecord {
        j,
        m: report.m,
        min_f: report.min_f,
        min_curvature: graph.min_curvature(),
        h0: report.h0,
        h0_uncertainty: report.h0_uncertainty(),
        h0_bound: report.h0_bound,
        vol_t: report.volumes.torus_volume,
        vol_m: report.volumes.graph_volume,
        vol_upper: report.volumes.upper,
        flat_bound_closed_form: report.flat.closed_form,
        flat_bound_direct: report.flat.direct(),
        tracker: report.flat.tracker,
        admissible: membership.passes(),
        checks_pass,
    })
}

/// Sequential sweep. Failed instances are returned in place as errors.
pub fn run_sweep(
    family: &SweepFamily,
    indices: &[usize],
    n: usize,
    options: &StabilityOptions,
) -> Vec<(usize, Result<ConvergenceRecord>)> {
    indices.iter().map(|&j| (j, sweep_instance(family, j, n, options))).collect()
}

/// True when `values` never increases over its second half.
pub fn eventually_non_increasing(values: &[f64]) -> bool {
    let start = values.len() / 2;
    values[start..].windows(2).all(|w| w[1] <= w[0])
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSequenceRecord {
    pub index: usize,
    pub generators: Mat3,
    pub limit: Mat3,
    pub sigma_max: f64,
    pub sigma_min: f64,
}

impl LatticeSequenceRecord {
    /// `max(σ_max - 1, 1/σ_min - 1)`.
    pub fn lipschitz_gap(&self) -> f64 {
        (self.sigma_max - 1.0).max(1.0 / self.sigma_min - 1.0)
    }

    /// Bi-Lipschitz constant `1 + gap` of `A_∞ A_i⁻¹`.
    pub fn lambda(&self) -> f64 {
        1.0 + self.lipschitz_gap()
    }
}

/// Singular values of `A_∞ A_i⁻¹` for each matrix of generators.
pub fn lattice_sequence(sequence: &[Mat3], limit: &Mat3) -> Result<Vec<LatticeSequenceRecord>> {
    let ld = limit.det();
    if !(ld > 0.0) {
        return Err(Error::InvalidLattice { determinant: ld });
    }
    sequence
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let d = a.det();
            let inv = if d > 0.0 { a.inverse() } else { None };
            let inv = inv.ok_or(Error::InvalidLattice { determinant: d })?;
            let sv = limit.mul(&inv).singular_values();
            Ok(LatticeSequenceRecord {
                index: i + 1,
                generators: *a,
                limit: *limit,
                sigma_max: sv[0],
                sigma_min: sv[2],
            })
        })
        .collect()
}

/// `c(λ, n) = ½ (n+1) λ^{n-1} (λ - 1)`.
pub fn bilipschitz_constant(lambda: f64, n: u32) -> Result<f64> {
    if !(lambda >= 1.0) {
        return Err(Error::Parameter { name: "lambda", value: lambda, expected: ">= 1" });
    }
    if n == 0 {
        return Err(Error::Parameter { name: "n", value: 0.0, expected: ">= 1" });
    }
    Ok(0.5 * (n + 1) as f64 * math::pow(lambda, (n - 1) as f64) * (lambda - 1.0))
}

/// `c(λ, n) max(diam_a, diam_b) (mass + boundary_mass)`.
pub fn bilipschitz_if_bound(
    lambda: f64,
    n: u32,
    diam_a: f64,
    diam_b: f64,
    mass: f64,
    boundary_mass: f64,
) -> Result<f64> {
    if !(mass >= 0.0 && boundary_mass >= 0.0) {
        return Err(Error::Parameter { name: "mass", value: mass.min(boundary_mass), expected: ">= 0" });
    }
    Ok(bilipschitz_constant(lambda, n)? * diam_a.max(diam_b) * (mass + boundary_mass))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_sequence_has_no_gap() {
        let seq = alloc::vec![Mat3::IDENTITY; 3];
        let recs = lattice_sequence(&seq, &Mat3::IDENTITY).unwrap();
        for r in recs {
            assert!((r.sigma_max - 1.0).abs() < 1e-14 && (r.sigma_min - 1.0).abs() < 1e-14);
            assert!(r.lipschitz_gap().abs() < 1e-13);
        }
    }

    #[test]
    fn singular_member_rejected() {
        let seq = alloc::vec![Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]])];
        assert!(lattice_sequence(&seq, &Mat3::IDENTITY).is_err());
    }

    #[test]
    fn constant_values() {
        assert_eq!(bilipschitz_constant(1.0, 3).unwrap(), 0.0);
        assert!((bilipschitz_constant(1.1, 3).unwrap() - 0.242).abs() < 1e-12);
        assert!((bilipschitz_if_bound(1.1, 3, 1.0, 0.5, 1.0, 0.0).unwrap() - 0.242).abs() < 1e-12);
        assert!(bilipschitz_constant(0.9, 3).is_err());
    }

    #[test]
    fn collapsing_member_shrinks() {
        let f = SweepFamily::Collapsing { torus: FlatTorus::unit_cube(), depth0: 0.1, radius: 0.3 };
        let (t, _) = f.member(4).unwrap();
        assert!((t.volume() - 0.25).abs() < 1e-15);
        assert!(f.member(0).is_err());
    }
}
