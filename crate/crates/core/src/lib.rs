//! Partition function of the trigonometric solid-on-solid model with
//! domain wall boundaries.
//!
//! Four independent evaluations are provided: exact enumeration of height
//! configurations ([`face_model`]), a string of dynamical B-operators
//! ([`yb_algebra`]), a sum over permutations ([`closed_form`]) and a
//! multiple contour integral evaluated by residues or quadrature
//! ([`contour`]). The remaining modules verify the identities linking
//! them and drive the `sosdw` command line tool.

pub mod bench;
pub mod closed_form;
pub mod contour;
pub mod error;
pub mod face_model;
pub mod params;
pub mod report;
pub mod residual;
pub mod rmatrix;
pub mod sampling;
pub mod summation;
pub mod verify;
pub mod yb_algebra;

pub use error::{Result, SosError};
pub use params::{c64, s, validate, DerivedVariables, ModelParams, Route, SpectralVector, C64};
pub use residual::Residual;

/// `Z_θ(λ_1 … λ_L)` by the chosen route. Quadrature uses the automatic
/// contour with node doubling.
pub fn partition(route: Route, params: &ModelParams, lambdas: &[C64]) -> Result<C64> {
    match route {
        Route::Face => face_model::enumerate_partition(params, lambdas),
        Route::Algebra => yb_algebra::partition_algebraic(params, lambdas),
        Route::Permutation => closed_form::partition_permutation_sum(params, lambdas),
        Route::Residue => contour::partition_residue(params, lambdas),
        Route::Quadrature => contour::partition_quadrature_auto(params, lambdas).map(|q| q.value),
        Route::Functional => Err(SosError::InvalidArgument(
            "the functional route evaluates a residual, not a partition value".into(),
        )),
    }
}

/// Largest supported L for a partition route.
pub fn route_cap(route: Route) -> usize {
    match route {
        Route::Face => face_model::max_l_face(),
        Route::Algebra => yb_algebra::MAX_L_ALG,
        Route::Permutation | Route::Residue => closed_form::MAX_L_PERM,
        Route::Quadrature => contour::MAX_L_QUAD,
        Route::Functional => closed_form::MAX_L_PERM,
    }
}
