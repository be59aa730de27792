use graphtori_core::curvature::GraphTorus;
use graphtori_core::field::{well_level_radius, FieldFamily, Grid};
use graphtori_core::lattice::FlatTorus;
use graphtori_core::levelset::{LevelSetAnalyzer, LevelSetProfile};
use graphtori_core::math::PI;
use graphtori_core::stability::{
    compute_h0, flat_distance_bound, solve_comparison_ode, threshold, H0Branch, StabilityOptions, StabilityReport,
};

fn graph(depth: f64, n: usize, shift: [isize; 3]) -> GraphTorus {
    let t = FlatTorus::unit_cube();
    let f = FieldFamily::centered_well(&t, depth, 0.25).sample(Grid::new(t, n).unwrap()).unwrap();
    GraphTorus::new(f.shifted(shift)).unwrap()
}

fn with_profile<T>(g: &GraphTorus, run: impl FnOnce(&LevelSetAnalyzer<'_>, &LevelSetProfile) -> T) -> T {
    let a = LevelSetAnalyzer::new(g.field(), g.derivatives());
    let p = a.default_profile();
    run(&a, &p)
}

#[test]
fn h0_matches_radial_oracle_and_orders_in_xi() {
    let g = graph(0.2, 64, [0; 3]);
    let m = g.excess();
    with_profile(&g, |a, p| {
        let s1 = compute_h0(a, p, m, 1.0).unwrap();
        let s2 = compute_h0(a, p, m, 2.0).unwrap();
        assert_eq!(s1.branch, H0Branch::Supremum);
        assert!(s2.h0 >= s1.h0);
        // dense scan of the exact level-sphere areas
        let tau = threshold(m, 1.0);
        let steps = 200_000;
        let mut exact = -0.2;
        for k in 1..steps {
            let h = -0.2 + 0.2 * k as f64 / steps as f64;
            let r = well_level_radius(0.2, 0.25, h).unwrap();
            if 4.0 * PI * r * r <= tau {
                exact = h;
            }
        }
        let ladder_step = 0.2 / 128.0;
        assert!((s1.h0 - exact).abs() < ladder_step, "{} vs {}", s1.h0, exact);
        assert!(s1.uncertainty <= 0.5 * ladder_step);
        // no height has area below a tiny threshold: the minimum branch
        let s = compute_h0(a, p, 1e-9, 1.0).unwrap();
        assert_eq!(s.branch, H0Branch::Minimum);
        assert_eq!(s.h0, p.min_f);
        assert!(compute_h0(a, p, m, 0.5).is_err());
    });
}

#[test]
fn threshold_value() {
    assert!((threshold(0.1, 1.0) - 7.958e-4).abs() < 1e-6);
}

#[test]
fn comparison_ode_certificate() {
    let t = solve_comparison_ode(0.1, -0.05, 1.0, 1e-4).unwrap();
    assert!(t.final_residual() < 1e-6);
    assert!(t.max_residual < 1e-6);
    assert_eq!(t.values[0], threshold(0.1, 1.0));
}

#[test]
fn canonical_report_passes_every_check() {
    let g = graph(0.1, 64, [0; 3]);
    let r = with_profile(&g, |a, p| StabilityReport::compute(&g, a, p, &StabilityOptions::default()).unwrap());
    assert!(!r.rigid);
    assert!(r.h0 >= g.min_f() && r.h0 <= 0.0);
    assert!(r.h0_bound_pass());
    assert!(!r.comparison.is_empty());
    assert!(r.comparison_pass());
    let v = &r.volumes;
    assert!(v.deep_pass(0.0) && v.bulk_pass(0.0) && v.sandwich_pass());
    assert!(v.deep_bound > v.deep_actual && v.bulk_bound > v.bulk_actual);
    assert!(r.flat.plus_pass() && r.flat.minus_pass(0.0) && r.flat.direct_pass(0.0));
}

#[test]
fn window_limits_the_lower_fill() {
    let g = graph(0.1, 32, [0; 3]);
    let h0 = -0.03;
    let full = flat_distance_bound(&g, h0, 1.0, f64::INFINITY).unwrap();
    let cut = flat_distance_bound(&g, h0, 1.0, 0.06).unwrap();
    assert!(cut.fill_minus < full.fill_minus);
    assert!(cut.minus_bound < full.minus_bound);
    assert_eq!(cut.fill_plus, full.fill_plus);
}

#[test]
fn report_is_translation_invariant() {
    let opts = StabilityOptions::default();
    let a = graph(0.1, 32, [0; 3]);
    let b = graph(0.1, 32, [7, 3, -9]);
    let ra = with_profile(&a, |an, p| StabilityReport::compute(&a, an, p, &opts).unwrap());
    let rb = with_profile(&b, |an, p| StabilityReport::compute(&b, an, p, &opts).unwrap());
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1e-12);
    assert!(close(ra.m, rb.m));
    assert!(close(ra.h0, rb.h0));
    assert!(close(ra.flat.closed_form, rb.flat.closed_form));
    assert!(close(ra.flat.direct(), rb.flat.direct()));
    assert!(close(ra.volumes.deep_actual, rb.volumes.deep_actual));
}
