//! The dynamical R-matrix of the trigonometric SOS model.
//!
//! Basis ordering on `V ⊗ V` is `(++, +−, −+, −−)` with `+` the first basis
//! vector of each factor (`ĥ = diag(1, −1)`). Operator-valued dynamical
//! arguments `θ − γĥ_k` are resolved by branching on the computational
//! basis of space `k`.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::params::{c64, nonsingular, s, C64};
use crate::residual::Residual;

/// The six Boltzmann weights at one (λ, θ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSextet {
    pub a_plus: C64,
    pub a_minus: C64,
    pub b_plus: C64,
    pub b_minus: C64,
    pub c_plus: C64,
    pub c_minus: C64,
}

pub fn weights(lambda: C64, theta: C64, gamma: C64) -> Result<WeightSextet> {
    let st = nonsingular(theta)?;
    let a = s(lambda + gamma);
    let sl = s(lambda);
    let sg = s(gamma);
    Ok(WeightSextet {
        a_plus: a,
        a_minus: a,
        b_plus: sl * s(theta - gamma) / st,
        b_minus: sl * s(theta + gamma) / st,
        c_plus: sg * s(theta - lambda) / st,
        c_minus: sg * s(theta + lambda) / st,
    })
}

/// θ → ∞ limit of the weights: the non-dynamical trigonometric six-vertex
/// R-matrix in the same gauge.
pub fn limit_weights(lambda: C64, gamma: C64) -> WeightSextet {
    let a = s(lambda + gamma);
    WeightSextet {
        a_plus: a,
        a_minus: a,
        b_plus: s(lambda) * (-gamma).exp(),
        b_minus: s(lambda) * gamma.exp(),
        c_plus: s(gamma) * (-lambda).exp(),
        c_minus: s(gamma) * lambda.exp(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RMatrix {
    pub entries: [[C64; 4]; 4],
    pub lambda: C64,
    pub theta: C64,
}

impl RMatrix {
    pub fn from_weights(w: &WeightSextet, lambda: C64, theta: C64) -> Self {
        let z = c64(0.0, 0.0);
        RMatrix {
            entries: [
                [w.a_plus, z, z, z],
                [z, w.b_plus, w.c_plus, z],
                [z, w.c_minus, w.b_minus, z],
                [z, z, z, w.a_minus],
            ],
            lambda,
            theta,
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        DMatrix::from_fn(4, 4, |r, c| self.entries[r][c])
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

pub fn r_matrix(lambda: C64, theta: C64, gamma: C64) -> Result<RMatrix> {
    Ok(RMatrix::from_weights(&weights(lambda, theta, gamma)?, lambda, theta))
}

/// Max-abs entry of a dense matrix.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Spin (+1 / −1) of factor `k` in basis index `idx` of an `n`-fold tensor
/// product, factor 0 being the most significant bit.
#[inline]
pub fn spin_of(idx: usize, k: usize, n: usize) -> i32 {
    if (idx >> (n - 1 - k)) & 1 == 0 {
        1
    } else {
        -1
    }
}

/// Embeds `R_{ij}(λ, θ(spins))` into the `n`-fold tensor product, where the
/// dynamical argument may depend on the spins of the other factors.
pub fn embed_pair<F>(n: usize, i: usize, j: usize, lambda: C64, gamma: C64, theta_of: F) -> Result<DMatrix<C64>>
where
    F: Fn(&[i32]) -> C64,
{
    let dim = 1usize << n;
    let mut out = DMatrix::from_element(dim, dim, c64(0.0, 0.0));
    let mut spins = vec![0i32; n];
    for col in 0..dim {
        for (k, sp) in spins.iter_mut().enumerate() {
            *sp = spin_of(col, k, n);
        }
        let r = r_matrix(lambda, theta_of(&spins), gamma)?;
        let bi = (col >> (n - 1 - i)) & 1;
        let bj = (col >> (n - 1 - j)) & 1;
        let cin = bi * 2 + bj;
        for rout in 0..4 {
            let v = r.entries[rout][cin];
            if v == c64(0.0, 0.0) {
                continue;
            }
            let mut row = col;
            row &= !(1 << (n - 1 - i));
            row &= !(1 << (n - 1 - j));
            row |= (rout >> 1) << (n - 1 - i);
            row |= (rout & 1) << (n - 1 - j);
            out[(row, col)] += v;
        }
    }
    Ok(out)
}

/// Residual of the dynamical Yang-Baxter equation
/// `R12(λ1−λ2, θ−γĥ3) R13(λ1−λ3, θ) R23(λ2−λ3, θ−γĥ1)
///  = R23(λ2−λ3, θ) R13(λ1−λ3, θ−γĥ2) R12(λ1−λ2, θ)` on `V⊗V⊗V`.
pub fn dybe_residual(l1: C64, l2: C64, l3: C64, theta: C64, gamma: C64) -> Result<Residual> {
    let shifted = |k: usize| move |sp: &[i32]| theta - gamma * f64::from(sp[k]);
    let fixed = |_: &[i32]| theta;
    let lhs = embed_pair(3, 0, 1, l1 - l2, gamma, shifted(2))?
        * embed_pair(3, 0, 2, l1 - l3, gamma, fixed)?
        * embed_pair(3, 1, 2, l2 - l3, gamma, shifted(0))?;
    let rhs = embed_pair(3, 1, 2, l2 - l3, gamma, fixed)?
        * embed_pair(3, 0, 2, l1 - l3, gamma, shifted(1))?
        * embed_pair(3, 0, 1, l1 - l2, gamma, fixed)?;
    Ok(Residual::new(max_abs(&(&lhs - &rhs)), max_abs(&lhs)))
}

/// Ordinary Yang-Baxter residual of the θ → ∞ limit matrix.
pub fn limit_ybe_residual(l1: C64, l2: C64, l3: C64, gamma: C64) -> Residual {
    let embed = |i: usize, j: usize, lambda: C64| {
        let r = RMatrix::from_weights(&limit_weights(lambda, gamma), lambda, c64(f64::INFINITY, 0.0));
        embed_dense(3, i, j, &r)
    };
    let lhs = embed(0, 1, l1 - l2) * embed(0, 2, l1 - l3) * embed(1, 2, l2 - l3);
    let rhs = embed(1, 2, l2 - l3) * embed(0, 2, l1 - l3) * embed(0, 1, l1 - l2);
    Residual::new(max_abs(&(&lhs - &rhs)), max_abs(&lhs))
}

fn embed_dense(n: usize, i: usize, j: usize, r: &RMatrix) -> DMatrix<C64> {
    let dim = 1usize << n;
    let mut out = DMatrix::from_element(dim, dim, c64(0.0, 0.0));
    for col in 0..dim {
        let cin = ((col >> (n - 1 - i)) & 1) * 2 + ((col >> (n - 1 - j)) & 1);
        for rout in 0..4 {
            let mut row = col & !(1 << (n - 1 - i)) & !(1 << (n - 1 - j));
            row |= (rout >> 1) << (n - 1 - i);
            row |= (rout & 1) << (n - 1 - j);
            out[(row, col)] += r.entries[rout][cin];
        }
    }
    out
}

fn permutation() -> DMatrix<C64> {
    let one = c64(1.0, 0.0);
    let mut p = DMatrix::from_element(4, 4, c64(0.0, 0.0));
    p[(0, 0)] = one;
    p[(1, 2)] = one;
    p[(2, 1)] = one;
    p[(3, 3)] = one;
    p
}

/// `‖R(λ,θ) P R(−λ,θ) P − s(γ+λ)s(γ−λ)·Id‖_max`, scaled by `|s(γ+λ)s(γ−λ)|`.
pub fn unitarity_residual(lambda: C64, theta: C64, gamma: C64) -> Result<Residual> {
    let p = permutation();
    let prod = r_matrix(lambda, theta, gamma)?.to_dense() * &p * r_matrix(-lambda, theta, gamma)?.to_dense() * &p;
    let factor = s(gamma + lambda) * s(gamma - lambda);
    let target = DMatrix::from_diagonal_element(4, 4, factor);
    Ok(Residual::new(max_abs(&(prod - target)), factor.norm()))
}

/// `‖[R, ĥ⊗1 + 1⊗ĥ]‖_max`, scaled by `‖R‖_max`.
pub fn ice_residual(r: &RMatrix) -> Residual {
    let total = [2.0, 0.0, 0.0, -2.0];
    let mut worst = 0.0f64;
    for (row, re) in r.entries.iter().enumerate() {
        for (col, v) in re.iter().enumerate() {
            worst = worst.max((v * (total[col] - total[row])).norm());
        }
    }
    Residual::new(worst, r.max_abs())
}
