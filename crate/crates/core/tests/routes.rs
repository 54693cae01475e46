use proptest::prelude::*;

use sosdw::closed_form::partition_permutation_sum;
use sosdw::contour::{partition_quadrature_auto, partition_residue, ContourSpec};
use sosdw::face_model::{configuration_count, enumerate_partition, lattice_partition};
use sosdw::yb_algebra::partition_algebraic;
use sosdw::{c64, partition, route_cap, validate, ModelParams, Route, SosError, C64};

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -0.8..0.8f64).prop_map(|(re, im)| c64(re, im))
}

/// γ, θ, μ and λ for `1..=max` sites, filtered by the permutation guards.
fn case(max: usize) -> impl Strategy<Value = (ModelParams, Vec<C64>)> {
    (1..=max)
        .prop_flat_map(|n| {
            (complex(), complex(), prop::collection::vec(complex(), n), prop::collection::vec(complex(), n))
        })
        .prop_map(|(g, t, mu, l)| (ModelParams { gamma: g, theta: t, mu }, l))
        .prop_filter("guards", |(p, l)| validate(p, l, Route::Permutation).is_ok())
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_routes_agree((p, l) in case(4)) {
        let face = enumerate_partition(&p, &l).unwrap();
        for z in [
            partition_algebraic(&p, &l).unwrap(),
            partition_permutation_sum(&p, &l).unwrap(),
            partition_residue(&p, &l).unwrap(),
        ] {
            prop_assert!(rel(face, z) < 1e-9, "{face} vs {z}");
        }
    }

    #[test]
    fn literal_theta_lattice_is_a_shift((p, l) in case(3)) {
        let shifted = ModelParams { theta: p.theta - p.gamma, ..p.clone() };
        prop_assume!(validate(&shifted, &l, Route::Face).is_ok());
        let a = lattice_partition(&p, &l).unwrap();
        let b = enumerate_partition(&shifted, &l).unwrap();
        prop_assert!(rel(a, b) < 1e-12);
    }

    #[test]
    fn quadrature_matches_residue((p, l) in case(2)) {
        prop_assume!(ContourSpec::auto(&l).is_ok());
        let q = partition_quadrature_auto(&p, &l).unwrap();
        let r = partition_residue(&p, &l).unwrap();
        prop_assert!(rel(q.value, r) < 1e-8);
    }

    #[test]
    fn spectral_symmetry((p, l) in case(4), k in 0usize..4) {
        let n = l.len();
        prop_assume!(n >= 2);
        let mut swapped = l.clone();
        swapped.swap(k % n, (k + 1) % n);
        let a = enumerate_partition(&p, &l).unwrap();
        let b = enumerate_partition(&p, &swapped).unwrap();
        prop_assert!(rel(a, b) < 1e-11);
    }
}

#[test]
fn pinned_two_site_value_by_every_route() {
    let p = ModelParams::new(c64(0.31, 0.0), c64(0.57, 0.0), vec![c64(0.13, 0.0), c64(-0.22, 0.0)]).unwrap();
    let l = [c64(0.41, 0.0), c64(0.18, 0.0)];
    let expect = c64(0.018_805_557_352_697_27, 0.0);
    for route in Route::PARTITION_ROUTES {
        let z = partition(route, &p, &l).unwrap();
        assert!(rel(z, expect) < 1e-10, "{route}: {z}");
    }
}

#[test]
fn alternating_sign_matrix_counts() {
    let counts: Vec<usize> = (1..=5).map(configuration_count).collect();
    assert_eq!(counts, vec![1, 2, 7, 42, 429]);
}

#[test]
fn caps_are_enforced() {
    let mu: Vec<C64> = (0..9).map(|k| c64(0.1 * k as f64, 0.05)).collect();
    let p = ModelParams::new(c64(0.3, 0.1), c64(0.4, -0.2), mu.clone()).unwrap();
    let l: Vec<C64> = mu.iter().map(|m| m + c64(0.03, 0.2)).collect();
    for route in [Route::Permutation, Route::Residue, Route::Quadrature] {
        assert!(l.len() > route_cap(route));
        assert!(matches!(partition(route, &p, &l), Err(SosError::TooLarge { .. })), "{route}");
    }
}

#[test]
fn coincident_spectral_parameters_rejected_where_singular() {
    let p = ModelParams::new(c64(0.3, 0.1), c64(0.4, -0.2), vec![c64(0.1, 0.0), c64(-0.2, 0.1)]).unwrap();
    let l = [c64(0.25, 0.1), c64(0.25, 0.1)];
    assert!(matches!(partition(Route::Permutation, &p, &l), Err(SosError::CoincidentSpectral { i: 0, j: 1 })));
    // the lattice itself is regular there
    let face = partition(Route::Face, &p, &l).unwrap();
    let alg = partition(Route::Algebra, &p, &l).unwrap();
    assert!(rel(face, alg) < 1e-12);
}
