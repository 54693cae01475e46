use serde::Serialize;

use crate::error::{Result, SosError};
use crate::face_model::enumerate_partition;
use crate::params::{validate, ModelParams, Route, C64};

use super::cartan::VacuumStates;
use super::monodromy::{Entry, QuantumOperator};

pub const MAX_L_ALG: usize = 10;

/// Height offsets `g_j` of the B-string: `B(λ_j, θ + g_j γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BOffset {
    /// `g_j = j`.
    Pft,
    /// `g_j = j − 1`.
    Cbb,
}

impl BOffset {
    pub fn base(self) -> i32 {
        match self {
            BOffset::Pft => 1,
            BOffset::Cbb => 0,
        }
    }
}

/// `B(λ_1, θ+bγ) B(λ_2, θ+(b+1)γ) ⋯ B(λ_n, θ+(b+n−1)γ) |0⟩`.
pub fn b_string(params: &ModelParams, lambdas: &[C64], base: i32) -> Result<Vec<C64>> {
    let mut v = VacuumStates::new(params.size()).ket0;
    for (j, &lambda) in lambdas.iter().enumerate().rev() {
        let theta = params.height(base + j as i32);
        v = QuantumOperator::new(Entry::B, lambda, theta, params).apply(&v)?;
    }
    Ok(v)
}

pub fn partition_algebraic_with(params: &ModelParams, lambdas: &[C64], offset: BOffset) -> Result<C64> {
    validate(params, lambdas, Route::Algebra)?;
    let size = params.size();
    if size > MAX_L_ALG {
        return Err(SosError::TooLarge { route: "algebra", size, max: MAX_L_ALG });
    }
    let v = b_string(params, lambdas, offset.base())?;
    Ok(v[v.len() - 1])
}

/// `⟨0̄| B(λ_1, θ+γ) ⋯ B(λ_L, θ+Lγ) |0⟩`.
pub fn partition_algebraic(params: &ModelParams, lambdas: &[C64]) -> Result<C64> {
    partition_algebraic_with(params, lambdas, BOffset::Pft)
}

/// Outcome of matching the B-string against the face enumeration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reconciliation {
    pub offset: BOffset,
    /// Algebra / face ratio (mean over the draws).
    pub ratio: C64,
    /// Largest relative deviation of a single draw's ratio from the mean.
    pub spread: f64,
    /// Spread of the rejected convention.
    pub rejected_spread: f64,
}

/// Tries both offset conventions over the given λ draws and keeps the one
/// whose ratio to the face enumeration is λ-independent.
pub fn reconcile_convention(params: &ModelParams, draws: &[Vec<C64>], tol: f64) -> Result<Reconciliation> {
    if draws.is_empty() {
        return Err(SosError::InvalidArgument("reconciliation needs at least one draw".into()));
    }
    let measure = |offset: BOffset| -> Result<(C64, f64)> {
        let ratios = draws
            .iter()
            .map(|l| Ok(partition_algebraic_with(params, l, offset)? / enumerate_partition(params, l)?))
            .collect::<Result<Vec<C64>>>()?;
        let mean = ratios.iter().sum::<C64>() / ratios.len() as f64;
        let spread = ratios.iter().map(|r| (r - mean).norm() / mean.norm()).fold(0.0, f64::max);
        Ok((mean, spread))
    };
    let (pft_ratio, pft_spread) = measure(BOffset::Pft)?;
    let (cbb_ratio, cbb_spread) = measure(BOffset::Cbb)?;
    let rec = if pft_spread <= tol || pft_spread <= cbb_spread {
        Reconciliation { offset: BOffset::Pft, ratio: pft_ratio, spread: pft_spread, rejected_spread: cbb_spread }
    } else {
        Reconciliation { offset: BOffset::Cbb, ratio: cbb_ratio, spread: cbb_spread, rejected_spread: pft_spread }
    };
    Ok(rec)
}
