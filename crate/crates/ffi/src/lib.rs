//! C ABI over the `sosdw` library.
//!
//! Models are opaque handles created by [`sosdw_model_new`] and released
//! with [`sosdw_model_free`]. Every function returns a [`SosdwStatus`];
//! on failure a description is available from [`sosdw_last_error`] on the
//! calling thread. Panics never cross the boundary.
//!
//! # Safety
//!
//! Pointer arguments must be null or valid for the stated number of
//! elements for the duration of the call. Null pointers are reported as
//! `SOSDW_STATUS_NULL_POINTER`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use num_complex::Complex64;
use sosdw::closed_form::{asymptotic_leading_coefficient, functional_equation_residual, partition_permutation_sum};
use sosdw::contour::partition_quadrature_auto;
use sosdw::{partition, ModelParams, Route, SosError};

/// Complex number with the layout of C99 `double _Complex`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SosdwComplex {
    pub re: f64,
    pub im: f64,
}

impl From<SosdwComplex> for Complex64 {
    fn from(z: SosdwComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl From<Complex64> for SosdwComplex {
    fn from(z: Complex64) -> Self {
        SosdwComplex { re: z.re, im: z.im }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SosdwStatus {
    Ok = 0,
    NullPointer = 1,
    EmptyLattice = 2,
    SingularTheta = 3,
    DegenerateCrossing = 4,
    CoincidentSpectral = 5,
    CoincidentInhomogeneity = 6,
    BadLength = 7,
    TooLarge = 8,
    InvalidQuartet = 9,
    InvalidBoundary = 10,
    SingularKFactor = 11,
    PoleHit = 12,
    ContourInvalid = 13,
    NoConvergence = 14,
    NoPolynomialFit = 15,
    InvalidArgument = 16,
    Panic = 17,
}

impl From<&SosError> for SosdwStatus {
    fn from(e: &SosError) -> Self {
        match e {
            SosError::EmptyLattice => SosdwStatus::EmptyLattice,
            SosError::SingularTheta { .. } => SosdwStatus::SingularTheta,
            SosError::DegenerateCrossing { .. } => SosdwStatus::DegenerateCrossing,
            SosError::CoincidentSpectral { .. } => SosdwStatus::CoincidentSpectral,
            SosError::CoincidentInhomogeneity { .. } => SosdwStatus::CoincidentInhomogeneity,
            SosError::BadLength { .. } => SosdwStatus::BadLength,
            SosError::TooLarge { .. } => SosdwStatus::TooLarge,
            SosError::InvalidQuartet(_) => SosdwStatus::InvalidQuartet,
            SosError::InvalidBoundary(_) => SosdwStatus::InvalidBoundary,
            SosError::SingularKFactor => SosdwStatus::SingularKFactor,
            SosError::PoleHit => SosdwStatus::PoleHit,
            SosError::ContourInvalid(_) => SosdwStatus::ContourInvalid,
            SosError::NoConvergence { .. } => SosdwStatus::NoConvergence,
            SosError::NoPolynomialFit { .. } => SosdwStatus::NoPolynomialFit,
            SosError::InvalidArgument(_) => SosdwStatus::InvalidArgument,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SosdwRoute {
    Face = 0,
    Algebra = 1,
    Permutation = 2,
    Residue = 3,
    Quadrature = 4,
}

impl From<SosdwRoute> for Route {
    fn from(r: SosdwRoute) -> Self {
        match r {
            SosdwRoute::Face => Route::Face,
            SosdwRoute::Algebra => Route::Algebra,
            SosdwRoute::Permutation => Route::Permutation,
            SosdwRoute::Residue => Route::Residue,
            SosdwRoute::Quadrature => Route::Quadrature,
        }
    }
}

/// Opaque model handle: γ, θ and the inhomogeneities.
pub struct SosdwModel {
    params: ModelParams,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

enum Failure {
    Null(&'static str),
    Model(SosError),
}

impl From<SosError> for Failure {
    fn from(e: SosError) -> Self {
        Failure::Model(e)
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> SosdwStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SosdwStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(&format!("null pointer: {what}"));
            SosdwStatus::NullPointer
        }
        Ok(Err(Failure::Model(e))) => {
            set_last_error(&e.to_string());
            SosdwStatus::from(&e)
        }
        Err(_) => {
            set_last_error("internal panic");
            SosdwStatus::Panic
        }
    }
}

unsafe fn complexes(ptr: *const SosdwComplex, len: usize, what: &'static str) -> Result<Vec<Complex64>, Failure> {
    if len == 0 {
        return Ok(Vec::new());
    }
    if ptr.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(slice::from_raw_parts(ptr, len).iter().map(|&z| z.into()).collect())
}

unsafe fn model<'a>(m: *const SosdwModel) -> Result<&'a ModelParams, Failure> {
    m.as_ref().map(|m| &m.params).ok_or(Failure::Null("model"))
}

unsafe fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

/// Creates a model with `size` inhomogeneities. On success `*out` owns
/// the handle.
#[no_mangle]
pub unsafe extern "C" fn sosdw_model_new(
    gamma: SosdwComplex,
    theta: SosdwComplex,
    mu: *const SosdwComplex,
    size: usize,
    out: *mut *mut SosdwModel,
) -> SosdwStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        out.write(ptr::null_mut());
        let mu = complexes(mu, size, "mu")?;
        let params = ModelParams::new(gamma.into(), theta.into(), mu)?;
        out.write(Box::into_raw(Box::new(SosdwModel { params })));
        Ok(())
    })
}

/// Releases a handle from [`sosdw_model_new`]. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sosdw_model_free(model: *mut SosdwModel) {
    if !model.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(model))));
    }
}

/// Lattice size L, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn sosdw_model_size(model: *const SosdwModel) -> usize {
    model.as_ref().map_or(0, |m| m.params.size())
}

/// Z at `lambda[0..len]` (len = L) by the chosen route.
#[no_mangle]
pub unsafe extern "C" fn sosdw_partition(
    model: *const SosdwModel,
    route: SosdwRoute,
    lambda: *const SosdwComplex,
    len: usize,
    out: *mut SosdwComplex,
) -> SosdwStatus {
    guard(|| {
        let params = self::model(model)?;
        let lambdas = complexes(lambda, len, "lambda")?;
        let z = partition(route.into(), params, &lambdas)?;
        write(out, z.into(), "out")
    })
}

/// Contour quadrature with node doubling; `out_nodes` (optional) receives
/// the final node count.
#[no_mangle]
pub unsafe extern "C" fn sosdw_partition_quadrature(
    model: *const SosdwModel,
    lambda: *const SosdwComplex,
    len: usize,
    out: *mut SosdwComplex,
    out_nodes: *mut usize,
) -> SosdwStatus {
    guard(|| {
        let params = self::model(model)?;
        let lambdas = complexes(lambda, len, "lambda")?;
        let q = partition_quadrature_auto(params, &lambdas)?;
        write(out, q.value.into(), "out")?;
        if !out_nodes.is_null() {
            out_nodes.write(q.nodes);
        }
        Ok(())
    })
}

/// Relative residual of the functional equation at `lambda[0..len]`
/// (len = L + 2), with Z from the permutation sum.
#[no_mangle]
pub unsafe extern "C" fn sosdw_functional_residual(
    model: *const SosdwModel,
    lambda: *const SosdwComplex,
    len: usize,
    out: *mut f64,
) -> SosdwStatus {
    guard(|| {
        let params = self::model(model)?;
        let lambdas = complexes(lambda, len, "lambda")?;
        let r = functional_equation_residual(params, &lambdas, &partition_permutation_sum)?;
        write(out, r.relative(), "out")
    })
}

/// Leading coefficient of Z in the limit of large spectral arguments.
#[no_mangle]
pub unsafe extern "C" fn sosdw_asymptotic_coefficient(model: *const SosdwModel, out: *mut SosdwComplex) -> SosdwStatus {
    guard(|| {
        let params = self::model(model)?;
        write(out, asymptotic_leading_coefficient(params)?.into(), "out")
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn sosdw_status_message(status: SosdwStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        SosdwStatus::Ok => b"ok\0",
        SosdwStatus::NullPointer => b"null pointer argument\0",
        SosdwStatus::EmptyLattice => b"lattice size must be at least 1\0",
        SosdwStatus::SingularTheta => b"dynamical argument in the singular band\0",
        SosdwStatus::DegenerateCrossing => b"degenerate crossing parameter\0",
        SosdwStatus::CoincidentSpectral => b"coincident spectral parameters\0",
        SosdwStatus::CoincidentInhomogeneity => b"coincident inhomogeneities\0",
        SosdwStatus::BadLength => b"wrong number of spectral parameters\0",
        SosdwStatus::TooLarge => b"lattice too large for the route\0",
        SosdwStatus::InvalidQuartet => b"inadmissible height quartet\0",
        SosdwStatus::InvalidBoundary => b"inadmissible hexagon boundary\0",
        SosdwStatus::SingularKFactor => b"singular K-factor\0",
        SosdwStatus::PoleHit => b"integrand evaluated on a pole\0",
        SosdwStatus::ContourInvalid => b"no admissible contour\0",
        SosdwStatus::NoConvergence => b"quadrature did not converge\0",
        SosdwStatus::NoPolynomialFit => b"no polynomial fit\0",
        SosdwStatus::InvalidArgument => b"invalid argument\0",
        SosdwStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Message of the last failure on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn sosdw_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn sosdw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;

    #[test]
    fn status_mapping_is_total() {
        for (e, s) in [
            (SosError::PoleHit, SosdwStatus::PoleHit),
            (SosError::EmptyLattice, SosdwStatus::EmptyLattice),
            (SosError::NoConvergence { nodes: 1, change: 1.0 }, SosdwStatus::NoConvergence),
        ] {
            assert_eq!(SosdwStatus::from(&e), s);
        }
        let msg = unsafe { CStr::from_ptr(sosdw_status_message(SosdwStatus::Panic)) };
        assert_eq!(msg.to_str().unwrap(), "internal panic");
    }

    #[test]
    fn panics_are_contained() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, SosdwStatus::Panic);
        assert!(!sosdw_last_error().is_null());
    }
}
