//! Sublevel sets `Ω_h = {f < h}` and level surfaces `Σ_h = {f = h}`.
//!
//! Surfaces come from [`marching::extract`]. Curvature quantities are
//! evaluated at triangle centroids from trilinearly interpolated grid
//! derivatives, so they share their stencil with the scalar curvature.
//! Mean curvature is taken with respect to `-Df/|Df|`, which makes round
//! spheres around a minimum positively curved:
//!
//! `H = (Δf |Df|² - Df·D²f·Df) / |Df|³`.

pub mod marching;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{Derivatives, ScalarField};
use crate::math::{self, dot, norm, sym_mul_vec, sym_trace, Sym3, Vec3, PI};

pub use marching::{extract, sublevel_integral, LevelMesh, MeshTriangle};

/// Default number of uniformly spaced heights in a profile.
pub const DEFAULT_HEIGHTS: usize = 129;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelSetOptions {
    /// Absolute floor of the regularity threshold.
    pub regular_floor: f64,
    /// Regularity threshold relative to the median `|Df|` on the surface.
    pub regular_relative: f64,
    /// Principal curvatures above `-convexity_tol` count as convex.
    pub convexity_tol: f64,
}

impl Default for LevelSetOptions {
    fn default() -> Self {
        LevelSetOptions { regular_floor: 1e-6, regular_relative: 0.01, convexity_tol: 1e-6 }
    }
}

/// Interpolated derivative data at one triangle centroid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceSample {
    pub area: f64,
    pub gradient: Vec3,
    pub hessian: Sym3,
}

impl SurfaceSample {
    pub fn grad_norm(&self) -> f64 {
        norm(self.gradient)
    }

    /// Mean curvature with respect to `-Df/|Df|`.
    pub fn mean_curvature(&self) -> f64 {
        let g = self.gradient;
        let g2 = dot(g, g);
        let gn = math::sqrt(g2);
        (sym_trace(&self.hessian) * g2 - dot(g, sym_mul_vec(&self.hessian, g))) / (g2 * gn)
    }

    /// Principal curvatures `(κ_min, κ_max)` of the level surface: the
    /// eigenvalues of `P D²f P / |Df|` on the tangent plane.
    pub fn principal_curvatures(&self) -> (f64, f64) {
        let g = self.gradient;
        let gn = norm(g);
        let nrm = math::scale(g, 1.0 / gn);
        // tangent basis
        let helper = if nrm[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let e1 = {
            let c = math::cross(nrm, helper);
            math::scale(c, 1.0 / norm(c))
        };
        let e2 = math::cross(nrm, e1);
        let h = &self.hessian;
        let s11 = dot(e1, sym_mul_vec(h, e1)) / gn;
        let s22 = dot(e2, sym_mul_vec(h, e2)) / gn;
        let s12 = dot(e1, sym_mul_vec(h, e2)) / gn;
        let mean = 0.5 * (s11 + s22);
        let disc = math::sqrt((0.5 * (s11 - s22)) * (0.5 * (s11 - s22)) + s12 * s12);
        (mean - disc, mean + disc)
    }
}

/// A level surface with derivative samples and regularity diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSurface {
    pub mesh: LevelMesh,
    pub samples: Vec<SurfaceSample>,
    pub min_gradient: f64,
    pub median_gradient: f64,
    /// `δ_reg = max(floor, relative·median|Df|)`.
    pub regularity_threshold: f64,
}

impl LevelSurface {
    pub fn height(&self) -> f64 {
        self.mesh.height
    }

    pub fn area(&self) -> f64 {
        self.mesh.area
    }

    pub fn is_regular(&self) -> bool {
        self.samples.is_empty() || self.min_gradient > self.regularity_threshold
    }
}

/// `(∫H, ∫ |Df|²/(1+|Df|²) H, ∫ H/|Df|)` over a level surface, plus the
/// pointwise extremes used for the convexity flags.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureIntegrals {
    pub mean: f64,
    pub weighted: f64,
    pub vprime: f64,
    pub min_mean_curvature: f64,
    pub min_principal_curvature: f64,
}

/// Extracts level surfaces of one field, sharing its derivative arrays.
pub struct LevelSetAnalyzer<'a> {
    field: &'a ScalarField,
    derivatives: &'a Derivatives,
    options: LevelSetOptions,
    min_f: f64,
    max_f: f64,
}

impl<'a> LevelSetAnalyzer<'a> {
    pub fn new(field: &'a ScalarField, derivatives: &'a Derivatives) -> Self {
        Self::with_options(field, derivatives, LevelSetOptions::default())
    }

    pub fn with_options(field: &'a ScalarField, derivatives: &'a Derivatives, options: LevelSetOptions) -> Self {
        LevelSetAnalyzer { field, derivatives, options, min_f: field.min(), max_f: field.max() }
    }

    pub fn field(&self) -> &ScalarField {
        self.field
    }

    pub fn options(&self) -> &LevelSetOptions {
        &self.options
    }

    pub fn min_f(&self) -> f64 {
        self.min_f
    }

    pub fn max_f(&self) -> f64 {
        self.max_f
    }

    /// Extracts `Σ_h` without judging regularity.
    pub fn surface(&self, h: f64) -> LevelSurface {
        let mesh = if h <= self.min_f || h > self.max_f {
            LevelMesh {
                height: h,
                triangles: Vec::new(),
                area: 0.0,
                sublevel_volume: if h > self.max_f { self.field.torus().volume() } else { 0.0 },
            }
        } else {
            extract(self.field, h)
        };
        let samples: Vec<SurfaceSample> = mesh.triangles.iter().map(|t| self.sample(t)).collect();
        let mut norms: Vec<f64> = samples.iter().map(SurfaceSample::grad_norm).collect();
        let (min_gradient, median_gradient) = if norms.is_empty() {
            (f64::INFINITY, 0.0)
        } else {
            let mid = norms.len() / 2;
            let (_, median, _) = norms.select_nth_unstable_by(mid, f64::total_cmp);
            let median = *median;
            (norms.iter().copied().fold(f64::INFINITY, f64::min), median)
        };
        let regularity_threshold = self.options.regular_floor.max(self.options.regular_relative * median_gradient);
        LevelSurface { mesh, samples, min_gradient, median_gradient, regularity_threshold }
    }

    /// Extracts `Σ_h`, failing when `h` is not a regular value. Heights
    /// outside `[min f, max f)` give an empty surface; `h = max f` is a
    /// critical value.
    pub fn extract_surface(&self, h: f64) -> Result<LevelSurface> {
        if h == self.max_f && self.min_f < self.max_f {
            return Err(Error::IrregularLevel { height: h, min_gradient: 0.0, threshold: self.options.regular_floor });
        }
        let s = self.surface(h);
        if s.is_regular() {
            Ok(s)
        } else {
            Err(Error::IrregularLevel { height: h, min_gradient: s.min_gradient, threshold: s.regularity_threshold })
        }
    }

    fn sample(&self, t: &MeshTriangle) -> SurfaceSample {
        let grid = self.field.grid();
        let [x, y, z] = t.local_centroid;
        let [i, j, k] = t.cell;
        let mut gradient = [0.0; 3];
        let mut hessian = [0.0; 6];
        for (di, wx) in [(0, 1.0 - x), (1, x)] {
            for (dj, wy) in [(0, 1.0 - y), (1, y)] {
                for (dk, wz) in [(0, 1.0 - z), (1, z)] {
                    let w = wx * wy * wz;
                    if w == 0.0 {
                        continue;
                    }
                    let idx = grid.wrapped_index((i + di) as isize, (j + dj) as isize, (k + dk) as isize);
                    let g = self.derivatives.gradient[idx];
                    let h = &self.derivatives.hessian[idx];
                    for c in 0..3 {
                        gradient[c] += w * g[c];
                    }
                    for c in 0..6 {
                        hessian[c] += w * h[c];
                    }
                }
            }
        }
        SurfaceSample { area: t.area, gradient, hessian }
    }

    /// Curvature integrals over a regular surface.
    pub fn mean_curvature_integrals(&self, surface: &LevelSurface) -> Result<CurvatureIntegrals> {
        if !surface.is_regular() {
            return Err(Error::IrregularLevel {
                height: surface.height(),
                min_gradient: surface.min_gradient,
                threshold: surface.regularity_threshold,
            });
        }
        Ok(curvature_integrals(&surface.samples))
    }
}

pub fn curvature_integrals(samples: &[SurfaceSample]) -> CurvatureIntegrals {
    let mut out = CurvatureIntegrals {
        mean: 0.0,
        weighted: 0.0,
        vprime: 0.0,
        min_mean_curvature: f64::INFINITY,
        min_principal_curvature: f64::INFINITY,
    };
    for s in samples {
        let hc = s.mean_curvature();
        let g = s.grad_norm();
        let g2 = g * g;
        out.mean += hc * s.area;
        out.weighted += g2 / (1.0 + g2) * hc * s.area;
        out.vprime += hc / g * s.area;
        out.min_mean_curvature = out.min_mean_curvature.min(hc);
        out.min_principal_curvature = out.min_principal_curvature.min(s.principal_curvatures().0);
    }
    out
}

/// Per-height record of a perimeter profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeightRecord {
    pub h: f64,
    pub regular: bool,
    /// `V(h) = ℋ²(Σ_h)`.
    pub area: f64,
    pub sublevel_volume: f64,
    pub mean_integral: f64,
    pub weighted_integral: f64,
    /// `∫ H/|Df|`, the surface form of `V'(h)`.
    pub vprime_surface: f64,
    /// Centred difference of `V` over the neighbouring heights.
    pub vprime_fd: Option<f64>,
    pub min_mean_curvature: f64,
    pub min_principal_curvature: f64,
    pub mean_convex: bool,
    pub convex: bool,
    pub triangles: usize,
}

impl HeightRecord {
    /// `∫H / (4√π √V)`; equals 1 on round spheres.
    pub fn minkowski_ratio(&self) -> f64 {
        self.mean_integral / (4.0 * math::sqrt(PI) * math::sqrt(self.area))
    }

    /// `V^{3/2}/(6√π) - vol(Ω_h)`; nonnegative by the isoperimetric
    /// inequality.
    pub fn isoperimetric_margin(&self) -> f64 {
        isoperimetric_volume(self.area) - self.sublevel_volume
    }

    /// `6√π vol(Ω_h) / V^{3/2}`; equals 1 on balls.
    pub fn isoperimetric_ratio(&self) -> f64 {
        self.sublevel_volume / isoperimetric_volume(self.area)
    }
}

/// Largest volume enclosed by area `v` in ℝ³: `v^{3/2}/(6√π)`.
pub fn isoperimetric_volume(v: f64) -> f64 {
    v * math::sqrt(v) / (6.0 * math::sqrt(PI))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelSetProfile {
    pub min_f: f64,
    pub max_f: f64,
    pub records: Vec<HeightRecord>,
}

impl LevelSetProfile {
    pub fn regular(&self) -> impl Iterator<Item = &HeightRecord> {
        self.records.iter().filter(|r| r.regular)
    }

    /// Uniform spacing of the base ladder, if the profile was built on one.
    pub fn height_step(&self) -> f64 {
        if self.records.len() < 2 {
            return 0.0;
        }
        (self.records[self.records.len() - 1].h - self.records[0].h) / (self.records.len() - 1) as f64
    }
}

/// `count` uniformly spaced heights covering `[lo, hi]`.
pub fn uniform_heights(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return alloc::vec![lo];
    }
    (0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect()
}

impl LevelSetAnalyzer<'_> {
    /// Builds one record; heights outside `(min f, max f)` and irregular
    /// levels are flagged rather than rejected.
    pub fn record(&self, h: f64) -> HeightRecord {
        let interior = h > self.min_f && h < self.max_f;
        let surface = self.surface(h);
        let regular = interior && !surface.samples.is_empty() && surface.is_regular();
        let ci = curvature_integrals(&surface.samples);
        let tol = self.options.convexity_tol;
        HeightRecord {
            h,
            regular,
            area: surface.area(),
            sublevel_volume: surface.mesh.sublevel_volume,
            mean_integral: ci.mean,
            weighted_integral: ci.weighted,
            vprime_surface: ci.vprime,
            vprime_fd: None,
            min_mean_curvature: ci.min_mean_curvature,
            min_principal_curvature: ci.min_principal_curvature,
            mean_convex: ci.min_mean_curvature > 0.0,
            convex: ci.min_principal_curvature >= -tol,
            triangles: surface.samples.len(),
        }
    }

    /// `V(h)` and the associated integrals at every height, sorted.
    pub fn perimeter_profile(&self, heights: &[f64]) -> LevelSetProfile {
        let mut hs: Vec<f64> = heights.to_vec();
        hs.sort_by(f64::total_cmp);
        hs.dedup();
        let mut records: Vec<HeightRecord> = hs.iter().map(|h| self.record(*h)).collect();
        fill_finite_differences(&mut records);
        LevelSetProfile { min_f: self.min_f, max_f: self.max_f, records }
    }

    /// Profile on the default 129-height ladder over `[min f, max f]`.
    pub fn default_profile(&self) -> LevelSetProfile {
        self.perimeter_profile(&uniform_heights(self.min_f, self.max_f, DEFAULT_HEIGHTS))
    }
}

fn fill_finite_differences(records: &mut [HeightRecord]) {
    for k in 1..records.len().saturating_sub(1) {
        let (a, b, c) = (records[k - 1], records[k], records[k + 1]);
        if a.regular && b.regular && c.regular {
            records[k].vprime_fd = Some((c.area - a.area) / (c.h - a.h));
        }
    }
}

/// Margin of one checked inequality at one height.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeightMargin {
    pub h: f64,
    pub margin: f64,
    pub pass: bool,
}

/// `m(f) - ∫ |Df|²/(1+|Df|²) H` at every regular height; passes when the
/// margin is at least `-tol`.
pub fn check_mass_inequality(m: f64, profile: &LevelSetProfile, tol: f64) -> Vec<HeightMargin> {
    profile
        .regular()
        .map(|r| {
            let margin = m - r.weighted_integral;
            HeightMargin { h: r.h, margin, pass: margin >= -tol }
        })
        .collect()
}

/// Isoperimetric margins at every regular height, passing above `-tol`.
pub fn isoperimetric_check(profile: &LevelSetProfile, tol: f64) -> Vec<HeightMargin> {
    profile
        .regular()
        .map(|r| {
            let margin = r.isoperimetric_margin();
            HeightMargin { h: r.h, margin, pass: margin >= -tol }
        })
        .collect()
}

/// Both `V'` estimators at one height and the two derivative lower bounds
/// where they apply.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VPrimeRecord {
    pub h: f64,
    pub finite_difference: f64,
    pub surface: f64,
    /// `(V', (1/α)(∫H - (1+α⁻²)m))` at the maximizing `α`, when
    /// `V > m²/16π`.
    pub alpha_bound: Option<(f64, f64)>,
    /// `(V', (2/(3√3)) m [4√π V^{1/2}/m - 1]^{3/2})` when
    /// `V > (1+ξ)² m²/16π`.
    pub minkowski_bound: Option<(f64, f64)>,
}

impl VPrimeRecord {
    pub fn relative_disagreement(&self) -> f64 {
        (self.finite_difference - self.surface).abs() / self.surface.abs().max(f64::MIN_POSITIVE)
    }
}

/// `α = [3m / (4√π V^{1/2} - m)]^{1/2}`, the maximizer of the right-hand
/// side of the `α`-family of derivative bounds.
pub fn optimal_alpha(m: f64, v: f64) -> Option<f64> {
    let denom = 4.0 * math::sqrt(PI) * math::sqrt(v) - m;
    if m > 0.0 && denom > 0.0 {
        Some(math::sqrt(3.0 * m / denom))
    } else {
        None
    }
}

/// `(2/(3√3)) m [4√π V^{1/2}/m - 1]^{3/2}`, defined for `V > m²/16π`.
pub fn derivative_lower_bound(m: f64, v: f64) -> Option<f64> {
    let u = 4.0 * math::sqrt(PI) * math::sqrt(v) / m - 1.0;
    if m > 0.0 && u > 0.0 {
        Some(2.0 / (3.0 * math::sqrt(3.0)) * m * u * math::sqrt(u))
    } else {
        None
    }
}

pub fn vprime_estimates(profile: &LevelSetProfile, m: f64, xi: f64) -> Vec<VPrimeRecord> {
    let threshold = (1.0 + xi) * (1.0 + xi) * m * m / (16.0 * PI);
    profile
        .records
        .iter()
        .filter(|r| r.regular)
        .filter_map(|r| {
            let fd = r.vprime_fd?;
            let alpha_bound = optimal_alpha(m, r.area).map(|alpha| {
                let rhs = (r.mean_integral - (1.0 + 1.0 / (alpha * alpha)) * m) / alpha;
                (r.vprime_surface, rhs)
            });
            let minkowski_bound = if r.area > threshold {
                derivative_lower_bound(m, r.area).map(|rhs| (r.vprime_surface, rhs))
            } else {
                None
            };
            Some(VPrimeRecord {
                h: r.h,
                finite_difference: fd,
                surface: r.vprime_surface,
                alpha_bound,
                minkowski_bound,
            })
        })
        .collect()
}
