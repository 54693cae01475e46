use proptest::prelude::*;

use sosdw::closed_form::{
    asymptotic_leading_coefficient, functional_equation_residual, ode_residual_l1, partition_l1,
    partition_permutation_sum, q_factorial,
};
use sosdw::face_model::{admissible_rings, hexagon_residual};
use sosdw::rmatrix::{dybe_residual, ice_residual, limit_ybe_residual, r_matrix, unitarity_residual};
use sosdw::yb_algebra::{cbb_residual, commutation_residuals};
use sosdw::{c64, validate, ModelParams, Route, SosError, C64};

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -0.8..0.8f64).prop_map(|(re, im)| c64(re, im))
}

fn model(n: usize) -> impl Strategy<Value = ModelParams> {
    (complex(), complex(), prop::collection::vec(complex(), n))
        .prop_map(|(gamma, theta, mu)| ModelParams { gamma, theta, mu })
        .prop_filter("guards", |p| validate(p, &p.mu, Route::Face).is_ok())
}

/// Skips draws rejected by a guard; any other error fails the case.
fn guarded<T>(r: Result<T, SosError>) -> Result<T, TestCaseError> {
    match r {
        Ok(v) => Ok(v),
        Err(e) if e.is_validation() => Err(TestCaseError::reject(e.to_string())),
        Err(e) => Err(TestCaseError::fail(e.to_string())),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dynamical_yang_baxter(l in prop::array::uniform3(complex()), th in complex(), g in complex()) {
        let r = guarded(dybe_residual(l[0], l[1], l[2], th, g))?;
        prop_assert!(r.below(1e-12), "{r:?}");
    }

    #[test]
    fn plain_yang_baxter_in_the_limit(l in prop::array::uniform3(complex()), g in complex()) {
        prop_assert!(limit_ybe_residual(l[0], l[1], l[2], g).below(1e-12));
    }

    #[test]
    fn ice_and_unitarity(l in complex(), th in complex(), g in complex()) {
        let r = guarded(r_matrix(l, th, g))?;
        prop_assert!(ice_residual(&r).below(1e-14));
        let u = guarded(unitarity_residual(l, th, g))?;
        prop_assert!(u.below(1e-13), "{u:?}");
    }

    #[test]
    fn hexagon(p in model(1), u in complex(), v in complex(), k in 0usize..20) {
        let ring = admissible_rings()[k];
        let r = guarded(hexagon_residual(u, v, ring, &p))?;
        prop_assert!(r.below(1e-12), "{ring:?} {r:?}");
    }

    #[test]
    fn commutation_two_sites(p in model(2), l1 in complex(), l2 in complex()) {
        let r = guarded(commutation_residuals(l1, l2, p.theta, &p))?;
        prop_assert!(r.worst().below(1e-11), "{:?}", r.named());
    }

    #[test]
    fn creation_annihilation_exchange(p in model(2), l in prop::collection::vec(complex(), 3)) {
        let r = guarded(cbb_residual(&l, p.theta, &p))?;
        prop_assert!(r.below(1e-10), "{r:?}");
    }

    #[test]
    fn functional_equation_two_sites(p in model(2), l in prop::collection::vec(complex(), 4)) {
        let r = guarded(functional_equation_residual(&p, &l, &partition_permutation_sum))?;
        prop_assert!(r.below(1e-9), "{r:?}");
    }

    #[test]
    fn single_site_second_order_equation(p in model(1), l in complex()) {
        let r = guarded(ode_residual_l1((l * 2.0).exp(), &p))?;
        prop_assert!(r.below(1e-12), "{r:?}");
    }
}

#[test]
fn q_factorial_small_cases() {
    let q = c64(0.3, 0.4);
    assert_eq!(q_factorial(0, q), c64(1.0, 0.0));
    let two = c64(1.0, 0.0) + q;
    assert!((q_factorial(2, q) - two).norm() < 1e-15);
    assert!((q_factorial(3, q) - two * (c64(1.0, 0.0) + q + q * q)).norm() < 1e-15);
    assert!((q_factorial(4, c64(1.0, 0.0)) - c64(24.0, 0.0)).norm() < 1e-13);
}

#[test]
fn single_site_leading_coefficient_by_hand() {
    // Z(λ) e^{−λ} as λ → +∞ along the real axis approaches the coefficient.
    let p = ModelParams::new(c64(0.3, 0.2), c64(0.4, -0.1), vec![c64(0.1, 0.05)]).unwrap();
    let lead = asymptotic_leading_coefficient(&p).unwrap();
    let lam = c64(18.0, 0.0);
    let approx = partition_l1(&p, lam).unwrap() * (-lam).exp();
    assert!((approx - lead).norm() < 1e-9 * lead.norm(), "{approx} vs {lead}");
}
