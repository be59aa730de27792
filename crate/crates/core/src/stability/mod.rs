//! The height selector `h0`, the comparison equation, volume bounds for
//! the deep and bulk parts of the graph, and the flat-distance bound built
//! from the two fill regions
//!
//! `B₊ = {h0 ≤ t ≤ f}`, `B₋ = {max(f, -L) ≤ t ≤ h0}`.

pub mod ode;

use alloc::vec::Vec;

use crate::curvature::{area_element, GraphTorus};
use crate::error::{Error, Result};
use crate::levelset::{isoperimetric_volume, sublevel_integral, HeightRecord, LevelSetAnalyzer, LevelSetProfile};
use crate::math::{self, PI};

pub use ode::{solve_comparison_ode, threshold, Trajectory};

/// Isoperimetric constant `1/(6√π)` of the lower fill.
pub const FILL_CONSTANT: f64 = 0.09403159725795939;

/// `(3√3 / 8π) √(4√π)`.
pub fn h0_constant() -> f64 {
    3.0 * math::sqrt(3.0) / (8.0 * PI) * math::sqrt(4.0 * math::sqrt(PI))
}

/// `C ℋ²(∂D)^{1/4} m^{1/2}`.
pub fn h0_bound(m: f64, boundary_area: f64) -> f64 {
    h0_constant() * math::pow(boundary_area, 0.25) * math::sqrt(m.max(0.0))
}

fn check_xi(xi: f64) -> Result<()> {
    if xi >= 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter { name: "xi", value: xi, expected: "xi >= 1" })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum H0Branch {
    /// Some sampled regular height has `V ≤ threshold`.
    Supremum,
    /// No height qualifies; `h0 = min f`.
    Minimum,
}

#[derive(Clone, Debug, PartialEq)]
pub struct H0Selection {
    pub h0: f64,
    /// Half the width of the bracket containing the true supremum.
    pub uncertainty: f64,
    pub threshold: f64,
    pub branch: H0Branch,
    /// Record at `h0`, present on the supremum branch.
    pub record: Option<HeightRecord>,
    /// Records added by bisection, sorted by height.
    pub refinement: Vec<HeightRecord>,
}

/// Bisection stops once `V` changes by less than this fraction of the
/// threshold across the bracket.
pub const H0_REFINE_TOLERANCE: f64 = 1e-4;
const H0_MAX_BISECTIONS: usize = 40;

/// Largest sampled regular height with `V(h) ≤ (1+ξ)²m²/16π`, refined by
/// bisection against the next sampled height.
pub fn compute_h0(analyzer: &LevelSetAnalyzer<'_>, profile: &LevelSetProfile, m: f64, xi: f64) -> Result<H0Selection> {
    check_xi(xi)?;
    if !(m > 0.0) {
        return Err(Error::Parameter { name: "m", value: m, expected: "> 0" });
    }
    let tau = threshold(m, xi);
    let recs = &profile.records;
    let best = recs.iter().rposition(|r| r.regular && r.area <= tau);
    let Some(i) = best else {
        return Ok(H0Selection {
            h0: profile.min_f,
            uncertainty: 0.0,
            threshold: tau,
            branch: H0Branch::Minimum,
            record: None,
            refinement: Vec::new(),
        });
    };
    let mut lo = recs[i];
    let mut hi_h = recs.get(i + 1).map(|r| r.h).unwrap_or(profile.max_f);
    let mut hi_area = recs.get(i + 1).map(|r| r.area);
    let mut refinement = Vec::new();
    for _ in 0..H0_MAX_BISECTIONS {
        if let Some(a) = hi_area {
            if a - lo.area < H0_REFINE_TOLERANCE * tau {
                break;
            }
        }
        let mid = 0.5 * (lo.h + hi_h);
        if mid <= lo.h || mid >= hi_h {
            break;
        }
        let r = analyzer.record(mid);
        refinement.push(r);
        if r.regular && r.area <= tau {
            lo = r;
        } else {
            hi_h = mid;
            hi_area = Some(r.area);
        }
    }
    refinement.sort_by(|a, b| a.h.total_cmp(&b.h));
    Ok(H0Selection {
        h0: lo.h,
        uncertainty: 0.5 * (hi_h - lo.h),
        threshold: tau,
        branch: H0Branch::Supremum,
        record: Some(lo),
        refinement,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Margin {
    pub h: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// `V(h) - Y(h)` at every regular height in `[h0, 0]`; passes when
/// `Y ≤ V (1 + rel_tol)`.
pub fn check_ode_comparison(records: &[HeightRecord], trajectory: &Trajectory, rel_tol: f64) -> Vec<Margin> {
    records
        .iter()
        .filter(|r| r.regular)
        .filter_map(|r| {
            let y = trajectory.value_at(r.h)?;
            Some(Margin { h: r.h, lhs: y, rhs: r.area, pass: y <= r.area * (1.0 + rel_tol) })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeEstimates {
    pub torus_volume: f64,
    pub graph_volume: f64,
    /// `vol_M(Ω_{h0})` by direct integration.
    pub deep_actual: f64,
    /// `(1+ξ)³/(6√π) m³/(16π)^{3/2} + (1+ξ)² m²/(16π) |min f|`.
    pub deep_bound: f64,
    /// `vol_M(M ∖ Ω_{h0})`.
    pub bulk_actual: f64,
    /// `vol(T) + C ℋ²(∂D)^{5/4} m^{1/2}`.
    pub bulk_bound: f64,
    pub upper: f64,
}

impl VolumeEstimates {
    pub fn deep_pass(&self, tol: f64) -> bool {
        self.deep_actual <= self.deep_bound + tol
    }

    pub fn bulk_pass(&self, tol: f64) -> bool {
        self.bulk_actual <= self.bulk_bound + tol
    }

    /// `vol(T) ≤ vol(M) ≤ upper`.
    pub fn sandwich_pass(&self) -> bool {
        self.torus_volume <= self.graph_volume && self.graph_volume <= self.upper
    }
}

pub fn volume_estimates(graph: &GraphTorus, h0: f64, xi: f64) -> Result<VolumeEstimates> {
    check_xi(xi)?;
    let torus = graph.field().torus();
    let m = graph.excess();
    let vol_t = torus.volume();
    let s = (1.0 + xi) * (1.0 + xi) / (16.0 * PI);
    let deep_bound =
        (1.0 + xi) * s * math::sqrt(s) * m * m * m / (6.0 * math::sqrt(PI)) + s * m * m * graph.min_f().abs();
    let bulk_bound = vol_t + h0_constant() * math::pow(torus.boundary_area(), 1.25) * math::sqrt(m);
    let weights = area_element(graph.derivatives());
    let deep_actual = if h0 > graph.min_f() { sublevel_integral(graph.field(), h0, &weights) } else { 0.0 };
    let graph_volume = graph.graph_volume();
    Ok(VolumeEstimates {
        torus_volume: vol_t,
        graph_volume,
        deep_actual,
        deep_bound,
        bulk_actual: graph_volume - deep_actual,
        bulk_bound,
        upper: deep_bound + bulk_bound,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlatBound {
    /// `C ℋ²(∂D)^{1/4} vol(D) m^{1/2} + c ((1+ξ)²/16π)^{3/2} min(|min f|, L) m³`.
    pub closed_form: f64,
    /// `vol(B₊) = ∫ (f - h0)⁺`.
    pub fill_plus: f64,
    /// `vol(B₋) = ∫ (h0 - max(f, -L))⁺`.
    pub fill_minus: f64,
    /// `|h0| vol(D)`.
    pub plus_bound: f64,
    /// `c ((1+ξ)²/16π)^{3/2} min(|min f|, L) m³`.
    pub minus_bound: f64,
    /// `|min f| m²`.
    pub tracker: f64,
}

impl FlatBound {
    pub fn direct(&self) -> f64 {
        self.fill_plus + self.fill_minus
    }

    pub fn plus_pass(&self) -> bool {
        self.fill_plus <= self.plus_bound * (1.0 + 1e-6)
    }

    pub fn minus_pass(&self, tol: f64) -> bool {
        self.fill_minus <= self.minus_bound + tol
    }

    pub fn direct_pass(&self, tol: f64) -> bool {
        self.direct() <= self.closed_form + tol
    }
}

/// Masses of the two fills and the closed-form bound. `L` must exceed
/// `|h0|`; pass `f64::INFINITY` for no window.
pub fn flat_distance_bound(graph: &GraphTorus, h0: f64, xi: f64, window: f64) -> Result<FlatBound> {
    check_xi(xi)?;
    if !(window > h0.abs()) {
        return Err(Error::Parameter { name: "L", value: window, expected: "L > |h0|" });
    }
    let field = graph.field();
    let torus = field.torus();
    let m = graph.excess();
    let grid = field.grid();
    let plus: Vec<f64> = field.samples().iter().map(|f| (f - h0).max(0.0)).collect();
    let minus: Vec<f64> = field.samples().iter().map(|f| (h0 - f.max(-window)).max(0.0)).collect();
    let s = (1.0 + xi) * (1.0 + xi) / (16.0 * PI);
    let depth = graph.min_f().abs().min(window);
    let minus_bound = FILL_CONSTANT * s * math::sqrt(s) * depth * m * m * m;
    let closed_form =
        h0_constant() * math::pow(torus.boundary_area(), 0.25) * torus.volume() * math::sqrt(m) + minus_bound;
    Ok(FlatBound {
        closed_form,
        fill_plus: grid.integrate(&plus),
        fill_minus: grid.integrate(&minus),
        plus_bound: h0.abs() * torus.volume(),
        minus_bound,
        tracker: graph.min_f().abs() * m * m,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityOptions {
    pub xi: f64,
    /// Depth window `L` of the lower fill.
    pub window: f64,
    pub ode_step: f64,
    pub heights: usize,
    /// Relative tolerance on `Y ≤ V`.
    pub comparison_tol: f64,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        StabilityOptions {
            xi: 1.0,
            window: f64::INFINITY,
            ode_step: 1e-4,
            heights: crate::levelset::DEFAULT_HEIGHTS,
            comparison_tol: 1e-3,
        }
    }
}

/// Everything computed downstream of `m(f)` for one field.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    pub xi: f64,
    pub window: f64,
    pub m: f64,
    pub min_f: f64,
    pub boundary_area: f64,
    /// `m = 0`: the graph is the flat torus and every distance vanishes.
    pub rigid: bool,
    pub selection: Option<H0Selection>,
    pub h0: f64,
    pub h0_bound: f64,
    pub trajectory: Option<Trajectory>,
    pub comparison: Vec<Margin>,
    pub volumes: VolumeEstimates,
    pub flat: FlatBound,
}

impl StabilityReport {
    /// Runs the whole chain on the graph. `profile` must come from an
    /// analyzer over the same field.
    pub fn compute(
        graph: &GraphTorus,
        analyzer: &LevelSetAnalyzer<'_>,
        profile: &LevelSetProfile,
        options: &StabilityOptions,
    ) -> Result<StabilityReport> {
        check_xi(options.xi)?;
        let m = graph.excess();
        let torus = graph.field().torus();
        let boundary_area = torus.boundary_area();
        if m <= 0.0 {
            let vol = torus.volume();
            return Ok(StabilityReport {
                xi: options.xi,
                window: options.window,
                m: 0.0,
                min_f: graph.min_f(),
                boundary_area,
                rigid: true,
                selection: None,
                h0: 0.0,
                h0_bound: 0.0,
                trajectory: None,
                comparison: Vec::new(),
                volumes: VolumeEstimates {
                    torus_volume: vol,
                    graph_volume: graph.graph_volume(),
                    deep_actual: 0.0,
                    deep_bound: 0.0,
                    bulk_actual: graph.graph_volume(),
                    bulk_bound: vol,
                    upper: vol,
                },
                flat: FlatBound {
                    closed_form: 0.0,
                    fill_plus: 0.0,
                    fill_minus: 0.0,
                    plus_bound: 0.0,
                    minus_bound: 0.0,
                    tracker: 0.0,
                },
            });
        }
        let selection = compute_h0(analyzer, profile, m, options.xi)?;
        let h0 = selection.h0;
        let trajectory = solve_comparison_ode(m, h0, options.xi, options.ode_step)?;
        let mut records: Vec<HeightRecord> =
            profile.records.iter().chain(selection.refinement.iter()).filter(|r| r.h >= h0).copied().collect();
        records.sort_by(|a, b| a.h.total_cmp(&b.h));
        let comparison = check_ode_comparison(&records, &trajectory, options.comparison_tol);
        let volumes = volume_estimates(graph, h0, options.xi)?;
        let flat = flat_distance_bound(graph, h0, options.xi, options.window)?;
        Ok(StabilityReport {
            xi: options.xi,
            window: options.window,
            m,
            min_f: graph.min_f(),
            boundary_area,
            rigid: false,
            h0,
            h0_bound: h0_bound(m, boundary_area),
            selection: Some(selection),
            trajectory: Some(trajectory),
            comparison,
            volumes,
            flat,
        })
    }

    pub fn h0_uncertainty(&self) -> f64 {
        self.selection.as_ref().map_or(0.0, |s| s.uncertainty)
    }

    /// `|h0| < bound + uncertainty`.
    pub fn h0_bound_pass(&self) -> bool {
        self.rigid || self.h0.abs() < self.h0_bound + self.h0_uncertainty()
    }

    pub fn comparison_pass(&self) -> bool {
        self.comparison.iter().all(|c| c.pass)
    }

    pub fn threshold(&self) -> f64 {
        threshold(self.m, self.xi)
    }

    /// Volume of a ball with the threshold area.
    pub fn threshold_volume(&self) -> f64 {
        isoperimetric_volume(self.threshold())
    }
}
