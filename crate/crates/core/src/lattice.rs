//! Flat 3-tori ℝ³/Γ given by three lattice generators.
//!
//! The fundamental domain is the parallelepiped `D = {Aλ : λ ∈ [0,1]³}` where
//! the columns of `A` are the generators. Points are passed in physical
//! coordinates unless a function says otherwise.

use crate::error::{Error, Result};
use crate::math::{self, cross, norm, sub, Mat3, Vec3};

/// Largest `min|aⁱ| / σ_min(A)` accepted. This ratio bounds the index box
/// the shortest-vector search has to cover.
pub const MAX_ANISOTROPY: f64 = 10.0;

/// Offsets searched when minimizing over lattice translates.
const TRANSLATE_RADIUS: i32 = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct FlatTorus {
    generators: [Vec3; 3],
    matrix: Mat3,
    inverse: Mat3,
    volume: f64,
}

/// Grid estimate of the torus diameter with its additive uncertainty.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiameterEstimate {
    pub value: f64,
    pub uncertainty: f64,
}

impl FlatTorus {
    /// Builds the torus spanned by `generators`. Their determinant must be
    /// positive.
    pub fn new(generators: [Vec3; 3]) -> Result<FlatTorus> {
        let matrix = Mat3::from_columns(generators);
        let volume = matrix.det();
        if !(volume > 0.0) || !volume.is_finite() {
            return Err(Error::InvalidLattice { determinant: volume });
        }
        let inverse = matrix.inverse().ok_or(Error::InvalidLattice { determinant: volume })?;
        let torus = FlatTorus { generators, matrix, inverse, volume };
        let anisotropy = torus.anisotropy();
        if anisotropy > MAX_ANISOTROPY {
            return Err(Error::AnisotropyTooLarge { anisotropy, limit: MAX_ANISOTROPY });
        }
        Ok(torus)
    }

    /// The unit cube torus ℝ³/ℤ³.
    pub fn unit_cube() -> FlatTorus {
        FlatTorus::diagonal(1.0, 1.0, 1.0).expect("unit cube is a valid lattice")
    }

    pub fn diagonal(a: f64, b: f64, c: f64) -> Result<FlatTorus> {
        FlatTorus::new([[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]])
    }

    /// Torus whose generators are the columns of `m`.
    pub fn from_matrix(m: Mat3) -> Result<FlatTorus> {
        FlatTorus::new([m.column(0), m.column(1), m.column(2)])
    }

    pub fn generators(&self) -> &[Vec3; 3] {
        &self.generators
    }

    /// `A`, with the generators as columns.
    pub fn matrix(&self) -> &Mat3 {
        &self.matrix
    }

    /// `A⁻¹`.
    pub fn inverse(&self) -> &Mat3 {
        &self.inverse
    }

    /// `det A`, which is also `vol(T) = vol(D)`.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn to_physical(&self, lambda: Vec3) -> Vec3 {
        self.matrix.mul_vec(lambda)
    }

    pub fn to_lattice(&self, x: Vec3) -> Vec3 {
        self.inverse.mul_vec(x)
    }

    /// Center `A·(½,½,½)` of the fundamental domain.
    pub fn center(&self) -> Vec3 {
        self.to_physical([0.5, 0.5, 0.5])
    }

    fn anisotropy(&self) -> f64 {
        let shortest_generator = self.generators.iter().map(|g| norm(*g)).fold(f64::INFINITY, f64::min);
        shortest_generator / self.matrix.singular_values()[2]
    }

    /// Displacement `x - y` reduced to its shortest lattice translate.
    pub fn minimal_displacement(&self, x: Vec3, y: Vec3) -> Vec3 {
        let d = sub(x, y);
        // Pre-reduce so the bounded search is valid for arbitrary inputs,
        // not only for points inside D.
        let lam = self.to_lattice(d);
        let base = [math::floor(lam[0] + 0.5), math::floor(lam[1] + 0.5), math::floor(lam[2] + 0.5)];
        let d0 = sub(d, self.to_physical(base));
        let mut best = d0;
        let mut best_len2 = math::dot(d0, d0);
        let r = TRANSLATE_RADIUS;
        for i in -r..=r {
            for j in -r..=r {
                for k in -r..=r {
                    let shift = self.to_physical([i as f64, j as f64, k as f64]);
                    let cand = sub(d0, shift);
                    let l2 = math::dot(cand, cand);
                    if l2 < best_len2 {
                        best_len2 = l2;
                        best = cand;
                    }
                }
            }
        }
        best
    }

    /// Quotient distance `d_T(p(x), p(y)) = min_β |x - β(y)|`.
    pub fn distance(&self, x: Vec3, y: Vec3) -> f64 {
        norm(self.minimal_displacement(x, y))
    }

    /// Half the length of the shortest nonzero lattice vector.
    pub fn injectivity_radius(&self) -> f64 {
        self.shortest_vector_length() / 2.0
    }

    /// Bounded brute-force search over `|vᵢ| ≤ K`. Every excluded `v` has
    /// `|Av| ≥ σ_min (K+1)`, and `K` is chosen so that exceeds the shortest
    /// generator.
    pub fn shortest_vector_length(&self) -> f64 {
        let sigma_min = self.matrix.singular_values()[2];
        let mut best = self.generators.iter().map(|g| norm(*g)).fold(f64::INFINITY, f64::min);
        let k = (math::ceil(best / sigma_min) as i32).clamp(1, MAX_ANISOTROPY as i32);
        for i in -k..=k {
            for j in -k..=k {
                for l in -k..=k {
                    if i == 0 && j == 0 && l == 0 {
                        continue;
                    }
                    let len = norm(self.to_physical([i as f64, j as f64, l as f64]));
                    if len < best {
                        best = len;
                    }
                }
            }
        }
        best
    }

    /// Largest distance from the center of D over a `resolution³` sample of
    /// D. Converges from below to the Voronoi circumradius, i.e. `diam(T)`.
    pub fn diameter(&self, resolution: usize) -> Result<DiameterEstimate> {
        if resolution < 8 {
            return Err(Error::Parameter { name: "resolution", value: resolution as f64, expected: ">= 8" });
        }
        let c = self.center();
        let r = resolution as f64;
        let mut value: f64 = 0.0;
        for i in 0..resolution {
            for j in 0..resolution {
                for k in 0..resolution {
                    let x = self.to_physical([i as f64 / r, j as f64 / r, k as f64 / r]);
                    value = value.max(self.distance(x, c));
                }
            }
        }
        Ok(DiameterEstimate { value, uncertainty: self.cell_diagonal(resolution) })
    }

    /// Longest diagonal of one `1/resolution` cell of D.
    pub fn cell_diagonal(&self, resolution: usize) -> f64 {
        let mut best: f64 = 0.0;
        for s1 in [-1.0, 1.0] {
            for s2 in [-1.0, 1.0] {
                best = best.max(norm(self.to_physical([1.0, s1, s2])));
            }
        }
        best / resolution as f64
    }

    /// `{|a¹×a²|, |a²×a³|, |a¹×a³|}`: areas of the coordinate faces of D.
    pub fn face_areas(&self) -> [f64; 3] {
        let [a1, a2, a3] = self.generators;
        [norm(cross(a1, a2)), norm(cross(a2, a3)), norm(cross(a1, a3))]
    }

    /// `ℋ²(∂D)`: the six parallelogram faces.
    pub fn boundary_area(&self) -> f64 {
        2.0 * self.face_areas().iter().sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn skew() -> FlatTorus {
        FlatTorus::new([[1.0, 0.0, 0.0], [0.5, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap()
    }

    #[test]
    fn construction() {
        let t = FlatTorus::unit_cube();
        assert_eq!(t.volume(), 1.0);
        assert_eq!(t.to_physical([1.0, 1.0, 1.0]), [1.0, 1.0, 1.0]);
        assert_eq!(skew().volume(), 1.0);
        let degenerate = FlatTorus::new([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]]);
        assert!(matches!(degenerate, Err(Error::InvalidLattice { .. })));
        let flipped = FlatTorus::new([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(matches!(flipped, Err(Error::InvalidLattice { .. })));
    }

    #[test]
    fn too_anisotropic_is_rejected() {
        let t = FlatTorus::new([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.999, 0.999, 0.001]]);
        assert!(matches!(t, Err(Error::AnisotropyTooLarge { .. })));
    }

    #[test]
    fn distances() {
        let t = FlatTorus::unit_cube();
        assert!((t.distance([0.0; 3], [0.5, 0.0, 0.0]) - 0.5).abs() < 1e-15);
        assert!((t.distance([0.0; 3], [0.9, 0.0, 0.0]) - 0.1).abs() < 1e-15);
        assert!((skew().distance([0.0; 3], [0.75, 0.0, 0.0]) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn injectivity_radii() {
        assert_eq!(FlatTorus::unit_cube().injectivity_radius(), 0.5);
        assert_eq!(FlatTorus::diagonal(1.0, 1.0, 3.0).unwrap().injectivity_radius(), 0.5);
    }

    #[test]
    fn areas() {
        let t = FlatTorus::diagonal(2.0, 1.0, 1.0).unwrap();
        assert_eq!(t.face_areas(), [2.0, 1.0, 2.0]);
        assert_eq!(t.boundary_area(), 10.0);
        assert_eq!(FlatTorus::unit_cube().boundary_area(), 6.0);
    }

    #[test]
    fn diameter_resolution_guard() {
        assert!(FlatTorus::unit_cube().diameter(4).is_err());
    }
}
