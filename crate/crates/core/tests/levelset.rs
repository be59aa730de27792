use graphtori_core::curvature::GraphTorus;
use graphtori_core::field::{well_level_radius, FieldFamily, Grid, ScalarField};
use graphtori_core::lattice::FlatTorus;
use graphtori_core::levelset::{
    check_mass_inequality, isoperimetric_check, uniform_heights, vprime_estimates, LevelSetAnalyzer, LevelSetProfile,
};
use graphtori_core::math::PI;

const DEPTH: f64 = 0.1;
const RADIUS: f64 = 0.25;

fn well(n: usize) -> ScalarField {
    let t = FlatTorus::unit_cube();
    FieldFamily::centered_well(&t, DEPTH, RADIUS).sample(Grid::new(t, n).unwrap()).unwrap()
}

fn profile(f: &ScalarField, heights: &[f64]) -> LevelSetProfile {
    let d = f.derivatives();
    LevelSetAnalyzer::new(f, &d).perimeter_profile(heights)
}

/// Heights whose level spheres span at least five grid cells at N = 64.
fn resolved_heights() -> Vec<f64> {
    uniform_heights(-0.045, -0.015, 7)
}

#[test]
fn level_spheres_have_sphere_area_and_curvature() {
    let p = profile(&well(64), &resolved_heights());
    for r in &p.records {
        let radius = well_level_radius(DEPTH, RADIUS, r.h).unwrap();
        let area = 4.0 * PI * radius * radius;
        assert!(r.regular);
        assert!((r.area - area).abs() < 0.01 * area, "h={} {} vs {}", r.h, r.area, area);
        assert!((r.mean_integral - 8.0 * PI * radius).abs() < 0.02 * 8.0 * PI * radius);
        assert!((r.minkowski_ratio() - 1.0).abs() < 0.02);
        assert!(r.weighted_integral <= r.mean_integral);
    }
}

#[test]
fn areas_self_converge() {
    let hs = resolved_heights();
    let (a, b) = (profile(&well(64), &hs), profile(&well(128), &hs));
    for (x, y) in a.records.iter().zip(&b.records) {
        assert!((x.area - y.area).abs() < 0.005 * y.area, "h={}", x.h);
    }
}

#[test]
fn profile_invariants() {
    let f = well(64);
    let torus = f.torus().clone();
    let d = f.derivatives();
    let a = LevelSetAnalyzer::new(&f, &d);
    let p = a.default_profile();
    assert!(p.records.windows(2).all(|w| w[0].sublevel_volume <= w[1].sublevel_volume));
    assert!(p.records.iter().all(|r| r.area <= torus.boundary_area()));
    let regular: Vec<_> = p.regular().collect();
    assert!(regular.len() > 100);
    assert!(regular.windows(2).all(|w| w[0].area <= w[1].area));
    for r in &regular {
        if r.convex {
            assert!(r.minkowski_ratio() >= 1.0 - 0.025, "h={} {}", r.h, r.minkowski_ratio());
        }
    }
    for m in isoperimetric_check(&p, 0.0) {
        let rec = p.records.iter().find(|r| r.h == m.h).unwrap();
        assert!(m.margin >= -0.01 * rec.sublevel_volume, "h={}", m.h);
    }
}

#[test]
fn vprime_estimators_agree_in_the_interior() {
    let mut mean_disagreement = Vec::new();
    for n in [32, 64] {
        let f = well(n);
        let g = GraphTorus::new(f.clone()).unwrap();
        let a = LevelSetAnalyzer::new(g.field(), g.derivatives());
        let p = a.default_profile();
        let est = vprime_estimates(&p, g.excess(), 1.0);
        let interior: Vec<_> = est.iter().filter(|e| e.h > -0.75 * DEPTH && e.h < -0.25 * DEPTH).collect();
        if n == 64 {
            assert!(interior.iter().all(|e| e.relative_disagreement() < 0.05));
        }
        mean_disagreement.push(interior.iter().map(|e| e.relative_disagreement()).sum::<f64>() / interior.len() as f64);
        for e in &est {
            if let Some((lhs, rhs)) = e.minkowski_bound {
                assert!(lhs > rhs, "h={}", e.h);
            }
            if let Some((lhs, rhs)) = e.alpha_bound {
                assert!(lhs > rhs, "h={}", e.h);
            }
        }
    }
    assert!(mean_disagreement[1] < mean_disagreement[0], "{mean_disagreement:?}");
}

#[test]
fn mass_inequality_on_the_canonical_well() {
    let g = GraphTorus::new(well(64)).unwrap();
    let a = LevelSetAnalyzer::new(g.field(), g.derivatives());
    let p = a.default_profile();
    let m = g.excess();
    let margins = check_mass_inequality(m, &p, 1e-3);
    assert!(!margins.is_empty());
    assert!(margins.iter().all(|x| x.margin >= -1e-3));
}

#[test]
fn checks_are_translation_invariant() {
    let f = well(32);
    let shifted = f.shifted([5, -3, 11]);
    let hs = uniform_heights(-0.09, -0.01, 9);
    let (p, q) = (profile(&f, &hs), profile(&shifted, &hs));
    for (x, y) in p.records.iter().zip(&q.records) {
        assert!((x.area - y.area).abs() < 1e-12 * x.area);
        assert!((x.sublevel_volume - y.sublevel_volume).abs() < 1e-12);
        assert!((x.mean_integral - y.mean_integral).abs() < 1e-10 * x.mean_integral.abs());
    }
    let (g, h) = (GraphTorus::new(f).unwrap(), GraphTorus::new(shifted).unwrap());
    assert!((g.excess() - h.excess()).abs() < 1e-12 * g.excess());
}
