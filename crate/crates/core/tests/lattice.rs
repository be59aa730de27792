use graphtori_core::lattice::FlatTorus;
use graphtori_core::math::{norm, sub, Vec3};
use proptest::prelude::*;

fn brute_distance(t: &FlatTorus, x: Vec3, y: Vec3, r: i32) -> f64 {
    let mut best = f64::INFINITY;
    for i in -r..=r {
        for j in -r..=r {
            for k in -r..=r {
                let s = t.to_physical([i as f64, j as f64, k as f64]);
                best = best.min(norm(sub(sub(x, y), s)));
            }
        }
    }
    best
}

/// Lattices with bounded shear, so generators stay within a factor of
/// two of orthogonal.
fn near_orthogonal() -> impl Strategy<Value = FlatTorus> {
    (0.6f64..1.6, 0.6f64..1.6, 0.6f64..1.6, prop::array::uniform6(-0.3f64..0.3))
        .prop_map(|(a, b, c, s)| FlatTorus::new([[a, s[0], s[1]], [s[2], b, s[3]], [s[4], s[5], c]]).unwrap())
}

fn point_in(t: &FlatTorus) -> impl Strategy<Value = Vec3> {
    let t = t.clone();
    prop::array::uniform3(0.0f64..1.0).prop_map(move |l| t.to_physical(l))
}

fn torus_and_points() -> impl Strategy<Value = (FlatTorus, Vec3, Vec3, Vec3)> {
    near_orthogonal().prop_flat_map(|t| {
        let p = point_in(&t);
        (Just(t.clone()), p, point_in(&t), point_in(&t))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_a_metric((t, x, y, z) in torus_and_points()) {
        prop_assert_eq!(t.distance(x, y), t.distance(y, x));
        prop_assert!(t.distance(x, z) <= t.distance(x, y) + t.distance(y, z) + 1e-12);
        prop_assert!(t.distance(x, y) <= norm(sub(x, y)) + 1e-15);
        prop_assert!(t.distance(x, x) < 1e-15);
    }

    #[test]
    fn bounded_search_matches_wide_search((t, x, y, _z) in torus_and_points()) {
        prop_assert!((t.distance(x, y) - brute_distance(&t, x, y, 5)).abs() < 1e-12);
    }

    #[test]
    fn generator_lengths_bound_injectivity_radius(t in near_orthogonal()) {
        for g in t.generators() {
            prop_assert!(2.0 * t.injectivity_radius() <= norm(*g) + 1e-15);
        }
        prop_assert!((t.volume() - t.matrix().det()).abs() <= 1e-15 * t.volume());
        prop_assert!((2.0 * t.face_areas().iter().sum::<f64>() - t.boundary_area()).abs() < 1e-14);
    }

    #[test]
    fn boundary_area_bounded_by_diameter(t in near_orthogonal()) {
        let d = t.diameter(12).unwrap();
        let diam = d.value + d.uncertainty;
        prop_assert!(t.boundary_area() <= 6.0 * (2.0 * diam).powi(2));
    }

    #[test]
    fn smallest_face_over_diameter_bounded_by_injectivity(t in near_orthogonal()) {
        let d = t.diameter(12).unwrap();
        let a0 = t.face_areas().iter().copied().fold(f64::INFINITY, f64::min);
        // A generator of a reduced basis is at most 2·diam long.
        prop_assert!(a0 / (4.0 * d.value) <= t.injectivity_radius() + d.uncertainty);
    }
}

#[test]
fn half_diameter_face_estimate_fails_on_the_cube() {
    // min face 1, diameter √3/2, injectivity radius 1/2: A₀/(2D₀) = 1/√3.
    let t = FlatTorus::unit_cube();
    let d = t.diameter(32).unwrap().value;
    assert!(1.0 / (2.0 * d) > t.injectivity_radius());
    assert!(1.0 / (4.0 * d) <= t.injectivity_radius());
}

#[test]
fn skew_distance_matches_wide_search() {
    let t = FlatTorus::new([[1.0, 0.0, 0.0], [0.5, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
    let (x, y) = ([0.0; 3], [0.75, 0.0, 0.0]);
    assert!((t.distance(x, y) - 0.25).abs() < 1e-15);
    assert!((brute_distance(&t, x, y, 3) - 0.25).abs() < 1e-15);
}

#[test]
fn shortest_vector_may_combine_generators() {
    let t = FlatTorus::new([[1.0, 0.0, 0.0], [0.5, 0.1, 0.0], [0.0, 0.0, 1.0]]).unwrap();
    // 2a² - a¹ = (0, 0.2, 0)
    assert!((t.injectivity_radius() - 0.1).abs() < 1e-14);
}

#[test]
fn diameters() {
    let cube = FlatTorus::unit_cube();
    let d16 = cube.diameter(16).unwrap();
    let d32 = cube.diameter(32).unwrap();
    let exact = 3f64.sqrt() / 2.0;
    assert!(d16.value <= exact + 1e-12 && exact - d16.value <= d16.uncertainty);
    assert!((d16.value - d32.value).abs() < d16.uncertainty);
    let long = FlatTorus::diagonal(2.0, 1.0, 1.0).unwrap().diameter(32).unwrap();
    assert!(((6f64).sqrt() / 2.0 - long.value).abs() <= long.uncertainty);
}
