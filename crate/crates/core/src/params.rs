//! Parameter context shared by every evaluation route.
//!
//! Heights of the SOS model are always `θ + kγ` for an integer offset `k`;
//! only the offsets are ever stored, the complex heights are rebuilt on
//! demand from the [`ModelParams`].

use std::fmt;
use std::ops::Deref;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SosError};

pub type C64 = Complex64;

/// Smallest admissible `|s(·)|` for a denominator built from θ and γ.
pub const EPS_SING: f64 = 1e-8;
/// Smallest admissible `|s(λ_i − λ_j)|` (and `|s(μ_i − μ_j)|`) on routes
/// whose formulas divide by these differences.
pub const EPS_SEP: f64 = 1e-6;

/// The hyperbolic sine, `s(z) = sinh(z)`.
#[inline]
pub fn s(z: C64) -> C64 {
    z.sinh()
}

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Crossing parameter γ, dynamical parameter θ and inhomogeneities μ₁…μ_L.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub gamma: C64,
    pub theta: C64,
    pub mu: Vec<C64>,
}

impl ModelParams {
    pub fn new(gamma: C64, theta: C64, mu: Vec<C64>) -> Result<Self> {
        if mu.is_empty() {
            return Err(SosError::EmptyLattice);
        }
        Ok(ModelParams { gamma, theta, mu })
    }

    /// Lattice size L.
    pub fn size(&self) -> usize {
        self.mu.len()
    }

    /// Same model at a different dynamical parameter.
    pub fn with_theta(&self, theta: C64) -> Self {
        ModelParams { theta, ..self.clone() }
    }

    /// θ + kγ.
    pub fn height(&self, offset: i32) -> C64 {
        self.theta + self.gamma * f64::from(offset)
    }
}

/// Spectral parameters λ₁…λ_n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralVector(pub Vec<C64>);

impl SpectralVector {
    pub fn new(lambda: Vec<C64>) -> Self {
        SpectralVector(lambda)
    }
}

impl Deref for SpectralVector {
    type Target = [C64];
    fn deref(&self) -> &[C64] {
        &self.0
    }
}

impl From<Vec<C64>> for SpectralVector {
    fn from(v: Vec<C64>) -> Self {
        SpectralVector(v)
    }
}

/// Exponential variables q = e^γ, t = e^θ, x̄_i = e^{λ_i}, x_i = x̄_i²,
/// ū_i = e^{μ_i}, u_i = ū_i².
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedVariables {
    pub q: C64,
    pub t: C64,
    pub xbar: Vec<C64>,
    pub x: Vec<C64>,
    pub ubar: Vec<C64>,
    pub u: Vec<C64>,
}

impl DerivedVariables {
    pub fn new(params: &ModelParams, lambdas: &[C64]) -> Self {
        let xbar: Vec<C64> = lambdas.iter().map(|l| l.exp()).collect();
        let x = xbar.iter().map(|v| v * v).collect();
        let ubar: Vec<C64> = params.mu.iter().map(|m| m.exp()).collect();
        let u = ubar.iter().map(|v| v * v).collect();
        DerivedVariables {
            q: params.gamma.exp(),
            t: params.theta.exp(),
            xbar,
            x,
            ubar,
            u,
        }
    }
}

/// Evaluation routes, plus the functional-equation context which needs
/// λ₀…λ_{L+1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Face,
    Algebra,
    Permutation,
    Residue,
    Quadrature,
    Functional,
}

impl Route {
    pub const PARTITION_ROUTES: [Route; 5] = [
        Route::Face,
        Route::Algebra,
        Route::Permutation,
        Route::Residue,
        Route::Quadrature,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Route::Face => "face",
            Route::Algebra => "algebra",
            Route::Permutation => "permutation",
            Route::Residue => "residue",
            Route::Quadrature => "quadrature",
            Route::Functional => "functional",
        }
    }

    pub fn parse(name: &str) -> Option<Route> {
        match name {
            "face" => Some(Route::Face),
            "algebra" => Some(Route::Algebra),
            "permutation" | "permutation-sum" => Some(Route::Permutation),
            "residue" => Some(Route::Residue),
            "quadrature" => Some(Route::Quadrature),
            "functional" => Some(Route::Functional),
            _ => None,
        }
    }

    fn forbids_coincident_lambda(self) -> bool {
        matches!(self, Route::Permutation | Route::Residue | Route::Functional)
    }

    fn expected_len(self, size: usize) -> usize {
        match self {
            Route::Functional => size + 2,
            _ => size,
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Proof that a parameter set passed the guards of a route.
#[derive(Debug, Clone, Copy)]
pub struct Validated<'a> {
    pub params: &'a ModelParams,
    pub lambdas: &'a [C64],
    pub route: Route,
}

pub fn validate<'a>(
    params: &'a ModelParams,
    lambdas: &'a [C64],
    route: Route,
) -> Result<Validated<'a>> {
    let size = params.size();
    if size == 0 {
        return Err(SosError::EmptyLattice);
    }
    let expected = route.expected_len(size);
    if lambdas.len() != expected {
        return Err(SosError::BadLength { expected, found: lambdas.len() });
    }
    if s(params.gamma).norm() <= EPS_SING {
        return Err(SosError::DegenerateCrossing { gamma: params.gamma });
    }
    for n in 1..=(2 * size as i32 + 1) {
        let arg = params.height(n);
        if s(arg).norm() <= EPS_SING {
            return Err(SosError::SingularTheta { arg });
        }
    }
    if route.forbids_coincident_lambda() {
        check_separated(lambdas).map_err(|(i, j)| SosError::CoincidentSpectral { i, j })?;
    }
    if route == Route::Functional {
        check_separated(&params.mu)
            .map_err(|(i, j)| SosError::CoincidentInhomogeneity { i, j })?;
    }
    Ok(Validated { params, lambdas, route })
}

/// First pair (i, j) with `|s(v_i − v_j)| <= EPS_SEP`.
pub(crate) fn check_separated(values: &[C64]) -> std::result::Result<(), (usize, usize)> {
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            if s(values[i] - values[j]).norm() <= EPS_SEP {
                return Err((i, j));
            }
        }
    }
    Ok(())
}

pub(crate) fn nonsingular(arg: C64) -> Result<C64> {
    let value = s(arg);
    if value.norm() <= EPS_SING {
        Err(SosError::SingularTheta { arg })
    } else {
        Ok(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(gamma: f64, theta: f64, size: usize) -> ModelParams {
        let mu = (0..size).map(|k| c64(0.1 * k as f64, 0.05)).collect();
        ModelParams::new(c64(gamma, 0.0), c64(theta, 0.0), mu).unwrap()
    }

    #[test]
    fn sinh_basic_values() {
        assert_eq!(s(C64::new(0.0, 0.0)), C64::new(0.0, 0.0));
        let v = s(c64(0.0, PI / 2.0));
        assert!(v.re.abs() < 1e-16 && (v.im - 1.0).abs() < 1e-16);
        // 40-digit reference: sinh(0.3) = 0.3045202934471426189584353
        let r = s(c64(0.3, 0.0));
        assert!((r.re - 0.304_520_293_447_142_6).abs() < 1e-15);
        assert_eq!(r.im, 0.0);
    }

    #[test]
    fn singular_theta_detected() {
        let p = params(0.3, -0.6, 2);
        let l = [c64(0.1, 0.0), c64(0.2, 0.0)];
        assert!(matches!(
            validate(&p, &l, Route::Face),
            Err(SosError::SingularTheta { .. })
        ));
    }

    #[test]
    fn face_route_accepts_single_site() {
        let p = params(0.3, 0.5, 1);
        assert!(validate(&p, &[c64(0.2, 0.0)], Route::Face).is_ok());
    }

    #[test]
    fn coincident_spectral_rejected_on_permutation_route() {
        let p = params(0.3, 0.5, 2);
        let l = [c64(0.2, 0.0), c64(0.2 + 1e-9, 0.0)];
        assert_eq!(
            validate(&p, &l, Route::Permutation).unwrap_err(),
            SosError::CoincidentSpectral { i: 0, j: 1 }
        );
        assert!(validate(&p, &l, Route::Face).is_ok());
        assert!(validate(&p, &l, Route::Quadrature).is_ok());
    }

    #[test]
    fn bad_length_and_functional_length() {
        let p = params(0.3, 0.5, 2);
        let l = [c64(0.2, 0.0)];
        assert_eq!(
            validate(&p, &l, Route::Algebra).unwrap_err(),
            SosError::BadLength { expected: 2, found: 1 }
        );
        let l4 = [c64(0.1, 0.0), c64(0.2, 0.1), c64(0.3, 0.2), c64(0.4, 0.3)];
        assert!(validate(&p, &l4, Route::Functional).is_ok());
    }

    #[test]
    fn degenerate_crossing() {
        let p = ModelParams::new(c64(0.0, PI), c64(0.5, 0.0), vec![c64(0.0, 0.0)]).unwrap();
        assert!(matches!(
            validate(&p, &[c64(0.1, 0.0)], Route::Face),
            Err(SosError::DegenerateCrossing { .. })
        ));
    }

    #[test]
    fn coincident_inhomogeneity_on_functional_route() {
        let p = ModelParams::new(c64(0.3, 0.0), c64(0.5, 0.0), vec![c64(0.1, 0.0); 2]).unwrap();
        let l = [c64(0.1, 0.1), c64(0.2, 0.1), c64(0.3, 0.2), c64(0.4, 0.3)];
        assert_eq!(
            validate(&p, &l, Route::Functional).unwrap_err(),
            SosError::CoincidentInhomogeneity { i: 0, j: 1 }
        );
    }

    #[test]
    fn derived_variables_square_exactly() {
        let p = params(0.3, 0.5, 3);
        let l = [c64(0.2, 0.3), c64(-0.7, 0.1), c64(0.4, -0.6)];
        let d = DerivedVariables::new(&p, &l);
        for i in 0..3 {
            assert_eq!(d.x[i], d.xbar[i] * d.xbar[i]);
            assert_eq!(d.u[i], d.ubar[i] * d.ubar[i]);
        }
    }

    #[test]
    fn empty_lattice_rejected() {
        assert_eq!(
            ModelParams::new(c64(0.3, 0.0), c64(0.5, 0.0), vec![]).unwrap_err(),
            SosError::EmptyLattice
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn sinh_is_odd_and_antiperiodic(re in -2.0f64..2.0, im in -2.0f64..2.0) {
                let z = c64(re, im);
                let v = s(z);
                prop_assert!((s(-z) + v).norm() <= 1e-15 * (1.0 + v.norm()));
                prop_assert!((s(z + c64(0.0, PI)) + v).norm() < 1e-13 * (1.0 + v.norm()));
            }
        }
    }
}
