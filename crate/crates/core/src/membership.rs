//! Diagnostics for the admissible field class: the maximum of `f` is 0,
//! `f` vanishes on the faces of the fundamental domain, and the sampled
//! level sets are mean convex and outer minimizing.
//!
//! Outer minimization is not checked directly. Convex level sets are outer
//! minimizing, so the fourth flag reports a convexity test and is labelled
//! a surrogate.

use crate::field::ScalarField;
use crate::levelset::LevelSetProfile;

/// Absolute tolerances for the two pointwise conditions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MembershipTolerances {
    pub max: f64,
    pub boundary: f64,
}

impl MembershipTolerances {
    /// `1e-10` times the amplitude of `field`.
    pub fn relative_to(field: &ScalarField) -> Self {
        let scale = field.amplitude().max(f64::MIN_POSITIVE);
        MembershipTolerances { max: 1e-10 * scale, boundary: 1e-10 * scale }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Condition {
    pub pass: bool,
    /// Positive when the condition holds with room to spare.
    pub margin: f64,
    /// No sampled height to test.
    pub vacuous: bool,
}

impl Condition {
    fn from_margin(margin: f64) -> Condition {
        Condition { pass: margin >= 0.0, margin, vacuous: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MembershipReport {
    pub max_is_zero: Condition,
    pub zero_on_faces: Condition,
    pub mean_convex: Condition,
    /// Convexity in place of outer minimization.
    pub convex_surrogate: Condition,
}

impl MembershipReport {
    pub fn passes(&self) -> bool {
        self.max_is_zero.pass && self.zero_on_faces.pass && self.mean_convex.pass && self.convex_surrogate.pass
    }

    pub fn conditions(&self) -> [(&'static str, Condition); 4] {
        [
            ("max_is_zero", self.max_is_zero),
            ("zero_on_faces", self.zero_on_faces),
            ("mean_convex", self.mean_convex),
            ("convex_surrogate", self.convex_surrogate),
        ]
    }
}

/// Evaluates the four conditions. The curvature flags read the regular
/// heights of `profile`.
pub fn class_membership(
    field: &ScalarField,
    profile: &LevelSetProfile,
    tolerances: MembershipTolerances,
    convexity_tol: f64,
) -> MembershipReport {
    let max_is_zero = Condition::from_margin(tolerances.max - field.max().abs());

    let grid = field.grid();
    let s = field.samples();
    let mut face_max: f64 = 0.0;
    for idx in 0..grid.len() {
        let [i, j, k] = grid.coords(idx);
        if i == 0 || j == 0 || k == 0 {
            face_max = face_max.max(s[idx].abs());
        }
    }
    let zero_on_faces = Condition::from_margin(tolerances.boundary - face_max);

    let mut min_mean = f64::INFINITY;
    let mut min_principal = f64::INFINITY;
    let mut any = false;
    for r in profile.regular() {
        any = true;
        min_mean = min_mean.min(r.min_mean_curvature);
        min_principal = min_principal.min(r.min_principal_curvature);
    }
    let (mean_convex, convex_surrogate) = if any {
        (
            Condition { pass: min_mean > 0.0, margin: min_mean, vacuous: false },
            Condition::from_margin(min_principal + convexity_tol),
        )
    } else {
        let v = Condition { pass: true, margin: 0.0, vacuous: true };
        (v, v)
    };
    MembershipReport { max_is_zero, zero_on_faces, mean_convex, convex_surrogate }
}
