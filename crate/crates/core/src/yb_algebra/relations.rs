use nalgebra::DMatrix;
use serde::Serialize;

use crate::closed_form::{coeff_m, coeff_n};
use crate::error::{Result, SosError};
use crate::params::{c64, check_separated, nonsingular, s, ModelParams, C64};
use crate::residual::Residual;
use crate::rmatrix::max_abs;

use super::cartan::CartanOperator;
use super::monodromy::{dense, Entry, QuantumOperator};
use super::partition::b_string;

/// Largest L for which operators are materialized as dense matrices.
pub const MAX_L_DENSE: usize = 3;

/// Guard on eigenvalues of the diagonal K-combinations.
const K_GUARD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommutationResiduals {
    pub bb: Residual,
    pub ab: Residual,
    pub db: Residual,
    pub cb: Residual,
    pub ak: Residual,
    pub bk: Residual,
    pub ck: Residual,
    pub dk: Residual,
    pub ah: Residual,
    pub bh: Residual,
}

impl CommutationResiduals {
    pub fn worst(&self) -> Residual {
        [self.ab, self.db, self.cb, self.ak, self.bk, self.ck, self.dk, self.ah, self.bh]
            .into_iter()
            .fold(self.bb, Residual::max)
    }

    pub fn named(&self) -> [(&'static str, Residual); 10] {
        [
            ("bb", self.bb),
            ("ab", self.ab),
            ("db", self.db),
            ("cb", self.cb),
            ("ak", self.ak),
            ("bk", self.bk),
            ("ck", self.ck),
            ("dk", self.dk),
            ("ah", self.ah),
            ("bh", self.bh),
        ]
    }
}

fn matrix_residual(lhs: &DMatrix<C64>, rhs: &DMatrix<C64>) -> Residual {
    Residual::new(max_abs(&(lhs - rhs)), max_abs(lhs).max(max_abs(rhs)))
}

fn require_dense(params: &ModelParams) -> Result<()> {
    let size = params.size();
    if size > MAX_L_DENSE {
        return Err(SosError::TooLarge { route: "dense operator", size, max: MAX_L_DENSE });
    }
    Ok(())
}

/// Exchange relations between monodromy entries and the K / Ĥ relations,
/// evaluated as dense matrices (L ≤ 3).
pub fn commutation_residuals(l1: C64, l2: C64, theta: C64, params: &ModelParams) -> Result<CommutationResiduals> {
    require_dense(params)?;
    let g = params.gamma;
    let d = |e: Entry, l: C64, th: C64| dense(e, l, th, params);
    let sd = nonsingular(l1 - l2).map_err(|_| SosError::CoincidentSpectral { i: 0, j: 1 })?;

    let cartan = CartanOperator::new(params.size(), g);
    let q = g.exp();
    let t = theta.exp();
    let (x1, x2) = (l1.exp(), l2.exp());
    // Diagonal factors N1, N2 of the D-B and C-B relations.
    let mut n1 = Vec::with_capacity(cartan.dimension());
    let mut n2 = Vec::with_capacity(cartan.dimension());
    for idx in 0..cartan.dimension() {
        let k = cartan.k_eigenvalue(idx, 1);
        let ki = cartan.k_eigenvalue(idx, -1);
        let den = t * q * q * ki - k / (t * q * q);
        if den.norm() < K_GUARD {
            return Err(SosError::SingularKFactor);
        }
        n1.push((t * q * ki - k / (t * q)) / den);
        n2.push((t * q * x1 / x2 * ki - k / (t * q) * x2 / x1) / den);
    }
    let n1 = cartan.diagonal(|i| n1[i]);
    let n2 = cartan.diagonal(|i| n2[i]);

    let bb = matrix_residual(
        &(d(Entry::B, l1, theta)? * d(Entry::B, l2, theta + g)?),
        &(d(Entry::B, l2, theta)? * d(Entry::B, l1, theta + g)?),
    );

    let s21 = nonsingular(l2 - l1).map_err(|_| SosError::CoincidentSpectral { i: 0, j: 1 })?;
    let th2 = nonsingular(theta + g * 2.0)?;
    let ab_lhs = d(Entry::A, l1, theta + g)? * d(Entry::B, l2, theta)?;
    let ab_rhs = d(Entry::B, l2, theta + g)? * d(Entry::A, l1, theta + g * 2.0)?
        * (s(l2 - l1 + g) / s21 * s(theta + g) / th2)
        - d(Entry::B, l1, theta + g)? * d(Entry::A, l2, theta + g * 2.0)?
            * (s(theta + g - l2 + l1) / s21 * s(g) / th2);
    let ab = matrix_residual(&ab_lhs, &ab_rhs);

    let db_lhs = d(Entry::D, l1, theta - g)? * d(Entry::B, l2, theta)?;
    let db_rhs = d(Entry::B, l2, theta - g)? * d(Entry::D, l1, theta)? * &n1 * (s(l1 - l2 + g) / sd)
        - d(Entry::B, l1, theta - g)? * d(Entry::D, l2, theta)? * &n2 * (s(g) / sd);
    let db = matrix_residual(&db_lhs, &db_rhs);

    let th1 = nonsingular(theta + g)?;
    let cb_lhs = d(Entry::C, l1, theta + g)? * d(Entry::B, l2, theta)?;
    let cb_rhs = d(Entry::B, l2, theta + g)? * d(Entry::C, l1, theta + g * 2.0)? * &n1 * (s(theta) / th1)
        + d(Entry::A, l2, theta + g)? * d(Entry::D, l1, theta)? * &n1
            * (s(g) / th1 * s(theta + g + l1 - l2) / sd)
        - d(Entry::A, l1, theta + g)? * d(Entry::D, l2, theta)? * &n2 * (s(g) / sd);
    let cb = matrix_residual(&cb_lhs, &cb_rhs);

    let k = cartan.k(1);
    let h = cartan.h();
    let q2 = q * q;
    let a = d(Entry::A, l1, theta)?;
    let b = d(Entry::B, l1, theta)?;
    let c = d(Entry::C, l1, theta)?;
    let dd = d(Entry::D, l1, theta)?;
    let ak = matrix_residual(&(&a * &k), &(&k * &a));
    let bk = matrix_residual(&(&b * &k), &(&k * &b * q2));
    let ck = matrix_residual(&(&c * &k), &(&k * &c / q2));
    let dk = matrix_residual(&(&dd * &k), &(&k * &dd));
    let ah = matrix_residual(&(&a * &h), &(&h * &a));
    let bh = matrix_residual(&(&b * &h - &h * &b), &(&b * c64(2.0, 0.0)));

    Ok(CommutationResiduals { bb, ab, db, cb, ak, bk, ck, dk, ah, bh })
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Residual of the expansion of `C(λ_0, θ+γ) ∏_{i=1}^{n} B(λ_i, θ+(i−1)γ) |0⟩`
/// into strings of `n−1` B-operators. `lambdas` holds `λ_0 … λ_n`; the
/// scale is the largest norm among the left side and the individual terms.
pub fn cbb_residual(lambdas: &[C64], theta: C64, params: &ModelParams) -> Result<Residual> {
    if lambdas.len() < 2 {
        return Err(SosError::InvalidArgument("expansion needs λ_0 and at least one λ_i".into()));
    }
    let n = lambdas.len() - 1;
    if n > params.size() + 1 {
        return Err(SosError::InvalidArgument(format!(
            "string length {n} exceeds L+1 = {}",
            params.size() + 1
        )));
    }
    check_separated(lambdas).map_err(|(i, j)| SosError::CoincidentSpectral { i, j })?;
    let p = params.with_theta(theta);
    let g = params.gamma;
    let string = b_string(&p, &lambdas[1..], 0)?;
    let lhs = QuantumOperator::new(Entry::C, lambdas[0], theta + g, &p).apply(&string)?;

    let mut rhs = vec![c64(0.0, 0.0); lhs.len()];
    let mut scale = norm(&lhs);
    let mut add = |coef: C64, v: Vec<C64>| {
        let term: Vec<C64> = v.into_iter().map(|x| coef * x).collect();
        scale = scale.max(norm(&term));
        for (acc, x) in rhs.iter_mut().zip(term) {
            *acc += x;
        }
    };
    for i in 1..=n {
        let rest: Vec<C64> = (1..=n).filter(|&k| k != i).map(|k| lambdas[k]).collect();
        add(coeff_m(i, lambdas, theta, params)?, b_string(&p, &rest, 1)?);
    }
    for j in 2..=n {
        for i in 1..j {
            let mut rest = vec![lambdas[0]];
            rest.extend((1..=n).filter(|&k| k != i && k != j).map(|k| lambdas[k]));
            add(coeff_n(j, i, lambdas, theta, params)?, b_string(&p, &rest, 1)?);
        }
    }
    let diff: Vec<C64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    Ok(Residual::new(norm(&diff), scale))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NilpotencyReport {
    /// `‖∏_{i=1}^{L+1} B|0⟩‖` over the product of the operators' max-abs entries.
    pub ratio: f64,
    /// Largest relative weight of a B-string state outside its Ĥ eigenspace.
    pub charge_leak: f64,
}

/// `L+1` B-operators annihilate the vacuum; `n ≤ L` of them produce a state
/// of charge `L − 2n`. `lambdas` holds `λ_1 … λ_{L+1}`.
pub fn nilpotency_norm(params: &ModelParams, lambdas: &[C64]) -> Result<NilpotencyReport> {
    let size = params.size();
    if lambdas.len() != size + 1 {
        return Err(SosError::BadLength { expected: size + 1, found: lambdas.len() });
    }
    if size > super::partition::MAX_L_ALG {
        return Err(SosError::TooLarge { route: "algebra", size, max: super::partition::MAX_L_ALG });
    }
    let cartan = CartanOperator::new(size, params.gamma);
    let mut charge_leak = 0.0f64;
    for n in 1..=size {
        let v = b_string(params, &lambdas[..n], 0)?;
        let target = size as i32 - 2 * n as i32;
        let total = norm(&v);
        let outside: f64 = v
            .iter()
            .enumerate()
            .filter(|(idx, _)| cartan.h_eigenvalue(*idx) != target)
            .map(|(_, x)| x.norm_sqr())
            .sum::<f64>()
            .sqrt();
        if total > 0.0 {
            charge_leak = charge_leak.max(outside / total);
        }
    }
    let full = b_string(params, lambdas, 0)?;
    let mut scale = 1.0;
    for (j, &l) in lambdas.iter().enumerate() {
        let op = QuantumOperator::new(Entry::B, l, params.height(j as i32), params);
        scale *= max_abs(&op.to_dense()?);
    }
    Ok(NilpotencyReport { ratio: norm(&full) / scale, charge_leak })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(size: usize) -> ModelParams {
        let mu = (0..size).map(|k| c64(0.25 - 0.4 * k as f64, -0.1 + 0.15 * k as f64)).collect();
        ModelParams::new(c64(0.33, 0.12), c64(-0.45, 0.3), mu).unwrap()
    }

    #[test]
    fn commutation_l2_l3() {
        for size in [2, 3] {
            let p = params(size);
            let r = commutation_residuals(c64(0.4, -0.2), c64(-0.3, 0.5), p.theta, &p).unwrap();
            for (name, res) in r.named() {
                assert!(res.relative() < 1e-11, "L={size} {name}: {res:?}");
            }
        }
    }

    #[test]
    fn commutation_needs_dense_size() {
        let p = params(4);
        assert!(matches!(
            commutation_residuals(c64(0.1, 0.0), c64(0.2, 0.0), p.theta, &p),
            Err(SosError::TooLarge { .. })
        ));
    }

    #[test]
    fn cbb_small_cases() {
        for (n, size) in [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3), (3, 2)] {
            let p = params(size);
            let l: Vec<C64> = (0..=n).map(|k| c64(0.6 - 0.37 * k as f64, 0.2 + 0.11 * k as f64)).collect();
            let r = cbb_residual(&l, c64(0.3, -0.4), &p).unwrap();
            assert!(r.relative() < 1e-10, "n={n} L={size}: {r:?}");
        }
    }

    #[test]
    fn nilpotency_and_charges() {
        for size in 1..=3 {
            let p = params(size);
            let l: Vec<C64> = (0..=size).map(|k| c64(0.5 - 0.3 * k as f64, 0.1 * k as f64)).collect();
            let rep = nilpotency_norm(&p, &l).unwrap();
            assert!(rep.ratio < 1e-12, "{rep:?}");
            assert!(rep.charge_leak < 1e-15, "{rep:?}");
        }
    }
}
