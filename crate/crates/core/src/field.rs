//! Periodic scalar fields sampled on an N³ grid in lattice coordinates.
//!
//! Node `(i, j, k)` sits at `λ = (i, j, k)/N`, i.e. at the physical point
//! `Aλ`. Samples are stored row-major with the third index fastest, which is
//! also the layout of raw field files. Derivatives are second-order central
//! differences taken in lattice coordinates and mapped to physical
//! coordinates with `A⁻ᵀ` (gradient) and `A⁻ᵀ(·)A⁻¹` (Hessian).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::FlatTorus;
use crate::math::{self, Sym3, Vec3, PI};

pub const MIN_RESOLUTION: usize = 8;

/// A periodic N³ grid over a flat torus.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    torus: FlatTorus,
    n: usize,
}

impl Grid {
    pub fn new(torus: FlatTorus, n: usize) -> Result<Grid> {
        if n < MIN_RESOLUTION {
            return Err(Error::InvalidGrid { reason: "resolution must be at least 8" });
        }
        if n > 1024 {
            return Err(Error::InvalidGrid { reason: "resolution above 1024 is not supported" });
        }
        Ok(Grid { torus, n })
    }

    pub fn torus(&self) -> &FlatTorus {
        &self.torus
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    /// Index with periodic wrap for any integer offsets.
    #[inline]
    pub fn wrapped_index(&self, i: isize, j: isize, k: isize) -> usize {
        let n = self.n as isize;
        self.index(i.rem_euclid(n) as usize, j.rem_euclid(n) as usize, k.rem_euclid(n) as usize)
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    pub fn node_lattice(&self, idx: usize) -> Vec3 {
        let [i, j, k] = self.coords(idx);
        let n = self.n as f64;
        [i as f64 / n, j as f64 / n, k as f64 / n]
    }

    pub fn node_position(&self, idx: usize) -> Vec3 {
        self.torus.to_physical(self.node_lattice(idx))
    }

    /// Physical volume carried by one node, `det A / N³`.
    pub fn cell_volume(&self) -> f64 {
        self.torus.volume() / self.len() as f64
    }

    /// Periodic trapezoidal rule `(det A/N³) Σ values`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        values.iter().sum::<f64>() * self.cell_volume()
    }

    /// Node indices of the ± neighbours along each lattice axis.
    fn neighbours(&self) -> [Vec<usize>; 2] {
        let n = self.n;
        let plus = (0..n).map(|i| (i + 1) % n).collect();
        let minus = (0..n).map(|i| (i + n - 1) % n).collect();
        [plus, minus]
    }
}

/// Sampled periodic scalar field.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    samples: Vec<f64>,
}

/// Node-wise physical gradient and Hessian.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivatives {
    pub gradient: Vec<Vec3>,
    pub hessian: Vec<Sym3>,
}

impl ScalarField {
    pub fn from_samples(grid: Grid, samples: Vec<f64>) -> Result<ScalarField> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidGrid { reason: "sample count is not N³" });
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid { reason: "samples must be finite" });
        }
        Ok(ScalarField { grid, samples })
    }

    /// Samples `f` at every node; `f` receives physical coordinates.
    pub fn from_fn(grid: Grid, f: impl Fn(Vec3) -> f64) -> ScalarField {
        let samples = (0..grid.len()).map(|idx| f(grid.node_position(idx))).collect();
        ScalarField { grid, samples }
    }

    pub fn zero(grid: Grid) -> ScalarField {
        let len = grid.len();
        ScalarField { grid, samples: vec![0.0; len] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn torus(&self) -> &FlatTorus {
        self.grid.torus()
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.samples.iter().enumerate() {
            if *v < self.samples[best] {
                best = i;
            }
        }
        best
    }

    /// Largest `|f|`, or 1 for the zero field. Used to scale tolerances.
    pub fn amplitude(&self) -> f64 {
        let a = self.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if a > 0.0 {
            a
        } else {
            1.0
        }
    }

    /// `c·f`.
    pub fn scaled(&self, c: f64) -> ScalarField {
        ScalarField { grid: self.grid.clone(), samples: self.samples.iter().map(|v| c * v).collect() }
    }

    /// Rolls the samples by whole grid steps; the field moves by
    /// `A·shift/N` on the torus.
    pub fn shifted(&self, shift: [isize; 3]) -> ScalarField {
        let g = &self.grid;
        let mut samples = vec![0.0; g.len()];
        for (idx, out) in samples.iter_mut().enumerate() {
            let [i, j, k] = g.coords(idx);
            let src = g.wrapped_index(i as isize - shift[0], j as isize - shift[1], k as isize - shift[2]);
            *out = self.samples[src];
        }
        ScalarField { grid: g.clone(), samples }
    }

    /// Gradient `Df = A⁻ᵀ ∇_λ f` with central differences.
    pub fn gradient(&self) -> Vec<Vec3> {
        let g = &self.grid;
        let n = g.n;
        let [plus, minus] = g.neighbours();
        let half_n = n as f64 / 2.0;
        let inv = g.torus.inverse();
        let s = &self.samples;
        let mut out = Vec::with_capacity(g.len());
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let dl = [
                        (s[g.index(plus[i], j, k)] - s[g.index(minus[i], j, k)]) * half_n,
                        (s[g.index(i, plus[j], k)] - s[g.index(i, minus[j], k)]) * half_n,
                        (s[g.index(i, j, plus[k])] - s[g.index(i, j, minus[k])]) * half_n,
                    ];
                    out.push(lattice_to_physical_covector(inv, dl));
                }
            }
        }
        out
    }

    /// Hessian `A⁻ᵀ H_λ A⁻¹`; mixed lattice derivatives use the four-point
    /// cross stencil so `H_λ` is symmetric by construction.
    pub fn hessian(&self) -> Vec<Sym3> {
        let g = &self.grid;
        let n = g.n;
        let [p, m] = g.neighbours();
        let n2 = (n * n) as f64;
        let inv = g.torus.inverse();
        let s = &self.samples;
        let mut out = Vec::with_capacity(g.len());
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let c = s[g.index(i, j, k)];
                    let d11 = (s[g.index(p[i], j, k)] - 2.0 * c + s[g.index(m[i], j, k)]) * n2;
                    let d22 = (s[g.index(i, p[j], k)] - 2.0 * c + s[g.index(i, m[j], k)]) * n2;
                    let d33 = (s[g.index(i, j, p[k])] - 2.0 * c + s[g.index(i, j, m[k])]) * n2;
                    let d12 = (s[g.index(p[i], p[j], k)] - s[g.index(p[i], m[j], k)] - s[g.index(m[i], p[j], k)]
                        + s[g.index(m[i], m[j], k)])
                        * n2
                        / 4.0;
                    let d13 = (s[g.index(p[i], j, p[k])] - s[g.index(p[i], j, m[k])] - s[g.index(m[i], j, p[k])]
                        + s[g.index(m[i], j, m[k])])
                        * n2
                        / 4.0;
                    let d23 = (s[g.index(i, p[j], p[k])] - s[g.index(i, p[j], m[k])] - s[g.index(i, m[j], p[k])]
                        + s[g.index(i, m[j], m[k])])
                        * n2
                        / 4.0;
                    let hl = [[d11, d12, d13], [d12, d22, d23], [d13, d23, d33]];
                    out.push(lattice_to_physical_hessian(inv, &hl));
                }
            }
        }
        out
    }

    pub fn derivatives(&self) -> Derivatives {
        Derivatives { gradient: self.gradient(), hessian: self.hessian() }
    }
}

/// `A⁻ᵀ v` for a lattice-coordinate covector `v`.
#[inline]
pub(crate) fn lattice_to_physical_covector(inv: &math::Mat3, v: Vec3) -> Vec3 {
    let a = &inv.0;
    [
        a[0][0] * v[0] + a[1][0] * v[1] + a[2][0] * v[2],
        a[0][1] * v[0] + a[1][1] * v[1] + a[2][1] * v[2],
        a[0][2] * v[0] + a[1][2] * v[1] + a[2][2] * v[2],
    ]
}

#[inline]
fn lattice_to_physical_hessian(inv: &math::Mat3, hl: &[[f64; 3]; 3]) -> Sym3 {
    let a = &inv.0;
    let entry = |r: usize, c: usize| -> f64 {
        let mut acc = 0.0;
        for p in 0..3 {
            if a[p][r] == 0.0 {
                continue;
            }
            for q in 0..3 {
                acc += a[p][r] * hl[p][q] * a[q][c];
            }
        }
        acc
    };
    [entry(0, 0), entry(1, 1), entry(2, 2), entry(0, 1), entry(0, 2), entry(1, 2)]
}

/// One Fourier mode `amplitude·sin(2π⟨k, λ⟩ + phase)` in lattice coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourierMode {
    pub wavevector: [i32; 3],
    pub amplitude: f64,
    pub phase: f64,
}

/// Built-in field families.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldFamily {
    Zero,
    /// `-depth·φ(|x - center|/radius)` with the C⁴ bump `φ(s) = (1-s²)⁵`
    /// on `s < 1`. Distances are measured on the torus.
    RadialWell {
        depth: f64,
        radius: f64,
        center: Vec3,
    },
    /// `amplitude·(cos(2πλ₁) - 1)`.
    Cosine1d {
        amplitude: f64,
    },
    /// Sum of Fourier modes.
    Fourier {
        modes: Vec<FourierMode>,
    },
}

impl FieldFamily {
    /// Canonical well centred in the fundamental domain of `torus`.
    pub fn centered_well(torus: &FlatTorus, depth: f64, radius: f64) -> FieldFamily {
        FieldFamily::RadialWell { depth, radius, center: torus.center() }
    }

    pub fn sample(&self, grid: Grid) -> Result<ScalarField> {
        match self {
            FieldFamily::Zero => Ok(ScalarField::zero(grid)),
            FieldFamily::RadialWell { depth, radius, center } => {
                if !(*radius > 0.0) || !(*depth >= 0.0) {
                    return Err(Error::Parameter {
                        name: "radial_well",
                        value: *radius,
                        expected: "radius > 0 and depth >= 0",
                    });
                }
                if *radius >= grid.torus().injectivity_radius() {
                    return Err(Error::Parameter {
                        name: "radius",
                        value: *radius,
                        expected: "below the injectivity radius of the torus",
                    });
                }
                let torus = grid.torus().clone();
                let (d, r, c) = (*depth, *radius, *center);
                Ok(ScalarField::from_fn(grid, |x| -d * bump(torus.distance(x, c) / r)))
            }
            FieldFamily::Cosine1d { amplitude } => {
                let torus = grid.torus().clone();
                let a = *amplitude;
                Ok(ScalarField::from_fn(grid, |x| {
                    let l = torus.to_lattice(x);
                    a * (math::cos(2.0 * PI * l[0]) - 1.0)
                }))
            }
            FieldFamily::Fourier { modes } => {
                let torus = grid.torus().clone();
                Ok(ScalarField::from_fn(grid, |x| {
                    let l = torus.to_lattice(x);
                    modes
                        .iter()
                        .map(|m| {
                            let k = [m.wavevector[0] as f64, m.wavevector[1] as f64, m.wavevector[2] as f64];
                            m.amplitude * math::sin(2.0 * PI * math::dot(k, l) + m.phase)
                        })
                        .sum()
                }))
            }
        }
    }
}

/// `φ(s) = (1-s²)⁵` for `s < 1`, else 0. Four times continuously
/// differentiable.
pub fn bump(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        let u = 1.0 - s * s;
        u * u * u * u * u
    }
}

/// Radius of the level sphere `{f = h}` of a radial well, `None` outside
/// `(-depth, 0)`.
pub fn well_level_radius(depth: f64, radius: f64, h: f64) -> Option<f64> {
    if !(h > -depth && h < 0.0) {
        return None;
    }
    let u = math::pow(-h / depth, 0.2);
    Some(radius * math::sqrt(1.0 - u))
}

/// `|f'(r)|` for a radial well at distance `r` from its centre.
pub fn well_radial_slope(depth: f64, radius: f64, r: f64) -> f64 {
    let s = r / radius;
    if s >= 1.0 {
        return 0.0;
    }
    let u = 1.0 - s * s;
    depth * 10.0 * s * u * u * u * u / radius
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(n: usize) -> Grid {
        Grid::new(FlatTorus::unit_cube(), n).unwrap()
    }

    #[test]
    fn grid_guards() {
        assert!(Grid::new(FlatTorus::unit_cube(), 4).is_err());
        assert!(ScalarField::from_samples(cube(8), vec![0.0; 10]).is_err());
    }

    #[test]
    fn zero_field_has_zero_derivatives() {
        let f = ScalarField::zero(cube(8));
        assert!(f.gradient().iter().all(|g| *g == [0.0; 3]));
        assert!(f.hessian().iter().all(|h| *h == [0.0; 6]));
    }

    #[test]
    fn integrals_of_constants_and_modes() {
        let t = FlatTorus::new([[1.0, 0.0, 0.0], [0.5, 1.2, 0.0], [0.0, 0.1, 0.9]]).unwrap();
        let g = Grid::new(t.clone(), 16).unwrap();
        let ones = vec![1.0; g.len()];
        assert!((g.integrate(&ones) - t.volume()).abs() < 1e-13);

        let g = cube(32);
        let s = FieldFamily::Fourier { modes: vec![FourierMode { wavevector: [1, 0, 0], amplitude: 1.0, phase: 0.0 }] }
            .sample(g.clone())
            .unwrap();
        assert!(g.integrate(s.samples()).abs() < 1e-14);
        let sq: Vec<f64> = s.samples().iter().map(|v| v * v).collect();
        assert!((g.integrate(&sq) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn hessian_of_cosine() {
        // f = cos(2πλ₁): f_11 = -4π² cos(2πλ₁)
        let g = cube(64);
        let f = FieldFamily::Fourier {
            modes: vec![FourierMode { wavevector: [1, 0, 0], amplitude: 1.0, phase: PI / 2.0 }],
        }
        .sample(g.clone())
        .unwrap();
        let h = f.hessian();
        let mut err: f64 = 0.0;
        for (idx, hv) in h.iter().enumerate() {
            let l = g.node_lattice(idx);
            err = err.max((hv[0] + 4.0 * PI * PI * math::cos(2.0 * PI * l[0])).abs());
            assert_eq!(hv[3], 0.0);
            assert_eq!(hv[4], 0.0);
            assert_eq!(hv[1], 0.0);
        }
        // leading error (2π)⁴/12 · h² · ... ≈ 0.032 at N = 64
        assert!(err < 0.05, "err {err}");
    }

    #[test]
    fn well_profile_inverse() {
        let r = well_level_radius(0.1, 0.25, -0.05).unwrap();
        let s = r / 0.25;
        assert!((-0.1 * bump(s) + 0.05).abs() < 1e-15);
        assert!(well_level_radius(0.1, 0.25, 0.0).is_none());
        assert!(well_level_radius(0.1, 0.25, -0.1).is_none());
    }

    #[test]
    fn shift_moves_samples() {
        let g = cube(8);
        let f = ScalarField::from_fn(g.clone(), |x| x[0] + 10.0 * x[1] + 100.0 * x[2]);
        let s = f.shifted([1, 0, 0]);
        assert_eq!(s.samples()[g.index(1, 0, 0)], f.samples()[g.index(0, 0, 0)]);
        assert_eq!(s.samples()[g.index(0, 0, 0)], f.samples()[g.index(7, 0, 0)]);
    }

    #[test]
    fn well_must_fit_in_torus() {
        let t = FlatTorus::unit_cube();
        let fam = FieldFamily::centered_well(&t, 0.1, 0.6);
        assert!(fam.sample(cube(8)).is_err());
    }
}
