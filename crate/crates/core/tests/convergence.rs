use graphtori_core::convergence::{
    bilipschitz_constant, bilipschitz_if_bound, eventually_non_increasing, lattice_sequence, run_sweep, SweepFamily,
};
use graphtori_core::lattice::FlatTorus;
use graphtori_core::math::Mat3;
use graphtori_core::stability::StabilityOptions;
use proptest::prelude::*;

fn perturbation() -> Mat3 {
    // ‖E‖ = 0.1 after normalization
    let e = Mat3([[0.02, 0.05, 0.0], [-0.03, 0.01, 0.04], [0.0, 0.02, -0.05]]);
    e.scaled(0.1 / e.operator_norm())
}

fn sequence(e: &Mat3, count: usize) -> Vec<Mat3> {
    (1..=count).map(|i| Mat3::IDENTITY.add(&e.scaled(1.0 / i as f64))).collect()
}

#[test]
fn perturbed_identity_sequence_converges() {
    let e = perturbation();
    assert!((e.operator_norm() - 0.1).abs() < 1e-12);
    let recs = lattice_sequence(&sequence(&e, 10), &Mat3::IDENTITY).unwrap();
    for r in &recs {
        assert!(r.sigma_min <= 1.0 + 1e-15 && r.sigma_max >= 1.0 - 1e-15);
        assert!(r.lipschitz_gap() >= 0.0);
        let i = r.index as f64;
        assert!(r.lipschitz_gap() <= 0.1 / i / (1.0 - 0.1 / i) + 1e-12);
    }
    assert!(recs.windows(2).all(|w| w[1].lipschitz_gap() <= w[0].lipschitz_gap()));
    assert!(recs[9].lipschitz_gap() < 0.012);
}

#[test]
fn tori_along_the_sequence_converge() {
    let e = perturbation();
    let limit = FlatTorus::unit_cube();
    let ld = limit.diameter(16).unwrap();
    let mut last_gap = f64::INFINITY;
    for (i, a) in sequence(&e, 10).iter().enumerate() {
        let t = FlatTorus::from_matrix(*a).unwrap();
        let d = t.diameter(16).unwrap();
        let gap = (t.volume() - limit.volume()).abs();
        assert!(gap <= 0.35 / (i + 1) as f64);
        if i >= 4 {
            assert!(gap <= last_gap + 1e-12);
        }
        last_gap = gap;
        if i == 9 {
            assert!((d.value - ld.value).abs() < d.uncertainty + ld.uncertainty);
        }
    }
}

proptest! {
    #[test]
    fn bilipschitz_bound_is_continuous_at_one(l in 1.0f64..1.001, n in 1u32..6) {
        let c = bilipschitz_constant(l, n).unwrap();
        prop_assert!(c >= 0.0 && c <= 0.5 * (n + 1) as f64 * 1.001f64.powi(n as i32) * (l - 1.0) + 1e-15);
        prop_assert!(bilipschitz_if_bound(l, n, 1.0, 2.0, 1.0, 0.0).unwrap() <= 2.0 * c + 1e-15);
    }
}

#[test]
fn lattice_constants_drive_the_bound_to_zero() {
    let recs = lattice_sequence(&sequence(&perturbation(), 10), &Mat3::IDENTITY).unwrap();
    let bounds: Vec<f64> =
        recs.iter().map(|r| bilipschitz_if_bound(r.lambda(), 3, 1.0, 1.0, 1.0, 0.0).unwrap()).collect();
    assert!(bounds.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn coarse_sweep_trends() {
    let family = SweepFamily::RadialWell { torus: FlatTorus::unit_cube(), depth0: 0.2, radius: 0.25 };
    let rows: Vec<_> = run_sweep(&family, &[1, 2, 3, 4], 32, &StabilityOptions::default())
        .into_iter()
        .map(|(_, r)| r.unwrap())
        .collect();
    assert!(rows.windows(2).all(|w| w[1].m < w[0].m));
    assert!(rows.windows(2).all(|w| w[1].tracker < w[0].tracker));
    for r in &rows {
        assert!(r.vol_t <= r.vol_m && r.vol_m <= r.vol_upper);
        assert!(r.flat_bound_direct <= r.flat_bound_closed_form);
    }
    let excess: Vec<f64> = rows.iter().map(|r| r.vol_m - r.vol_t).collect();
    assert!(eventually_non_increasing(&excess));
}

#[test]
fn collapsing_family_loses_volume() {
    let family = SweepFamily::Collapsing { torus: FlatTorus::unit_cube(), depth0: 0.1, radius: 0.3 };
    let rows: Vec<_> =
        run_sweep(&family, &[1, 2], 16, &StabilityOptions::default()).into_iter().map(|(_, r)| r.unwrap()).collect();
    assert!(rows[1].vol_m < rows[0].vol_m);
    assert!((rows[1].vol_t - 0.5).abs() < 1e-15);
}
