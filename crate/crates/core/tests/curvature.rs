use graphtori_core::curvature::{graph_volume, GraphTorus, STENCIL_FACTOR};
use graphtori_core::field::{FieldFamily, FourierMode, Grid, ScalarField};
use graphtori_core::lattice::FlatTorus;
use graphtori_core::math::PI;
use proptest::prelude::*;

fn modes() -> impl Strategy<Value = Vec<FourierMode>> {
    prop::collection::vec((prop::array::uniform3(-2i32..=2), -0.1f64..0.1, 0.0f64..6.3), 1..5)
        .prop_map(|m| m.into_iter().map(|(k, a, p)| FourierMode { wavevector: k, amplitude: a, phase: p }).collect())
}

fn lattice() -> impl Strategy<Value = FlatTorus> {
    (0.8f64..1.3, 0.8f64..1.3, 0.8f64..1.3, -0.2f64..0.2)
        .prop_map(|(a, b, c, s)| FlatTorus::new([[a, 0.0, 0.0], [s, b, 0.0], [0.0, s, c]]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn total_curvature_vanishes(t in lattice(), m in modes()) {
        let g = GraphTorus::new(FieldFamily::Fourier { modes: m }.sample(Grid::new(t.clone(), 16).unwrap()).unwrap()).unwrap();
        let scale = g.scalar_curvature().iter().fold(0.0f64, |a, r| a.max(r.abs())) * t.volume();
        prop_assert!(g.total_curvature().abs() <= 1e-10 * scale.max(f64::MIN_POSITIVE));
        prop_assert!(g.excess() >= 0.0);
        prop_assert!(g.graph_volume() >= t.volume());
    }

    #[test]
    fn one_dimensional_profiles_are_flat(a in prop::collection::vec(-0.1f64..0.1, 1..4), t in lattice()) {
        let modes = a.iter().enumerate().map(|(i, amp)| FourierMode { wavevector: [i as i32 + 1, 0, 0], amplitude: *amp, phase: 0.3 * i as f64 }).collect();
        let f = FieldFamily::Fourier { modes }.sample(Grid::new(t, 16).unwrap()).unwrap();
        let scale = f.hessian().iter().fold(0.0f64, |s, h| s.max(h[0].abs().max(h[1].abs()).max(h[2].abs())));
        let g = GraphTorus::new(f).unwrap();
        let max = g.scalar_curvature().iter().fold(0.0f64, |s, r| s.max(r.abs()));
        prop_assert!(max <= 1e-12 * scale.max(1.0), "{} vs {}", max, scale);
    }

    #[test]
    fn graph_volume_grows_with_amplitude(c1 in 0.0f64..1.0, c2 in 0.0f64..1.0) {
        let t = FlatTorus::unit_cube();
        let f = FieldFamily::centered_well(&t, 0.2, 0.3).sample(Grid::new(t, 16).unwrap()).unwrap();
        let (lo, hi) = if c1 <= c2 { (c1, c2) } else { (c2, c1) };
        let vl = { let s = f.scaled(lo); graph_volume(&s, &s.derivatives()) };
        let vh = { let s = f.scaled(hi); graph_volume(&s, &s.derivatives()) };
        prop_assert!(vl <= vh);
    }
}

fn sine_graph_volume(eps: f64, n: usize) -> f64 {
    let t = FlatTorus::unit_cube();
    let tt = t.clone();
    let f = ScalarField::from_fn(Grid::new(t, n).unwrap(), move |x| eps * (2.0 * PI * tt.to_lattice(x)[0]).sin());
    graph_volume(&f, &f.derivatives())
}

#[test]
fn graph_volume_of_sine_matches_quadrature() {
    let eps = 0.05;
    // composite Simpson on 20000 panels
    let k = 20000;
    let g = |l: f64| (1.0 + (2.0 * PI * eps * (2.0 * PI * l).cos()).powi(2)).sqrt();
    let hstep = 1.0 / k as f64;
    let mut acc = g(0.0) + g(1.0);
    for i in 1..k {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * hstep);
    }
    let exact = acc * hstep / 3.0;
    let (v64, v128) = (sine_graph_volume(eps, 64), sine_graph_volume(eps, 128));
    let ratio = (v64 - exact) / (v128 - exact);
    assert!((3.9..4.1).contains(&ratio), "{ratio}");
    let extrapolated = (4.0 * v128 - v64) / 3.0;
    assert!((extrapolated - exact).abs() < 1e-6, "{extrapolated} vs {exact}");
}

#[test]
fn diameter_dominates_depth_and_torus_diameter() {
    let t = FlatTorus::unit_cube();
    let torus_diam = t.diameter(32).unwrap();
    let mut last = 0.0;
    for depth in [0.1, 0.2, 0.4] {
        let g = GraphTorus::new(
            FieldFamily::centered_well(&t, depth, 0.3).sample(Grid::new(t.clone(), 24).unwrap()).unwrap(),
        )
        .unwrap();
        let d = g.diameter().value;
        assert!(g.min_f().abs() <= d);
        assert!(torus_diam.value <= d + torus_diam.uncertainty);
        assert!(d <= STENCIL_FACTOR * 2.0, "{d}");
        assert!(d > last);
        last = d;
    }
}

#[test]
fn excess_decreases_with_depth() {
    let t = FlatTorus::unit_cube();
    let mut last = f64::INFINITY;
    for j in 1..=6 {
        let f = FieldFamily::centered_well(&t, 0.2 / j as f64, 0.25).sample(Grid::new(t.clone(), 32).unwrap()).unwrap();
        let g = GraphTorus::new(f).unwrap();
        assert!((g.excess() - g.positive_part()).abs() <= 1e-8 * g.excess());
        assert!(g.excess() < last);
        last = g.excess();
    }
}

#[test]
fn remark_bound_at_minimum_curvature() {
    let t = FlatTorus::unit_cube();
    let g =
        GraphTorus::new(FieldFamily::centered_well(&t, 0.1, 0.25).sample(Grid::new(t, 32).unwrap()).unwrap()).unwrap();
    let c = g.lower_bound_check(-g.min_curvature());
    assert_eq!(c.holds, Some(true));
    assert!(c.margin() > 0.0);
}
