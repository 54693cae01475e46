use std::f64::consts::PI;

use crate::error::{Result, SosError};
use crate::params::{c64, validate, DerivedVariables, ModelParams, Route, C64, EPS_SING};
use crate::residual::Residual;
use crate::summation::pairwise_sum;

use super::coefficients::FunctionalCoefficients;

/// Evaluates `Z_θ` at the given parameters and spectral arguments.
pub trait Evaluator: Fn(&ModelParams, &[C64]) -> Result<C64> + Sync {}
impl<F: Fn(&ModelParams, &[C64]) -> Result<C64> + Sync> Evaluator for F {}

/// Functional equation on `λ_0 … λ_{L+1}`: the sum of `M_i Z(…λ̂_i…)` and
/// `N_{ji} Z(λ_0, …λ̂_i…λ̂_j…)`, scaled by the largest single term.
pub fn functional_equation_residual<Z: Evaluator>(params: &ModelParams, lambdas: &[C64], z: &Z) -> Result<Residual> {
    validate(params, lambdas, Route::Functional)?;
    let coeffs = FunctionalCoefficients::compute(lambdas, params.theta, params)?;
    let n = coeffs.n;
    let mut terms = Vec::new();
    for i in 1..=n {
        let rest: Vec<C64> = (1..=n).filter(|&k| k != i).map(|k| lambdas[k]).collect();
        terms.push(coeffs.m[i - 1] * z(params, &rest)?);
    }
    for &((j, i), nji) in &coeffs.n_coeffs {
        let mut rest = vec![lambdas[0]];
        rest.extend((1..=n).filter(|&k| k != i && k != j).map(|k| lambdas[k]));
        terms.push(nji * z(params, &rest)?);
    }
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    Ok(Residual::new(pairwise_sum(&terms).norm(), scale))
}

/// Offsets for the limit evaluation when a route rejects the exact point.
const ZERO_OFFSETS: [f64; 2] = [1e-7, 5e-8];

/// `|Z(μ_1, μ_1−γ, λ_3, …)|` against the size of Z at nearby generic
/// points. `free` holds `λ_3 … λ_L`.
pub fn special_zero_residual<Z: Evaluator>(params: &ModelParams, free: &[C64], z: &Z) -> Result<Residual> {
    let size = params.size();
    if size < 2 || free.len() != size - 2 {
        return Err(SosError::BadLength { expected: size.saturating_sub(2), found: free.len() });
    }
    let (mu1, g) = (params.mu[0], params.gamma);
    let at = |shift: C64| {
        let mut l = vec![mu1 + shift, mu1 - g];
        l.extend_from_slice(free);
        l
    };
    let value = match z(params, &at(c64(0.0, 0.0))) {
        Ok(v) => v,
        Err(e) if e.is_validation() => {
            // Linear extrapolation to zero offset from two one-sided points.
            let h1 = z(params, &at(c64(ZERO_OFFSETS[0], 0.0)))?;
            let h2 = z(params, &at(c64(ZERO_OFFSETS[1], 0.0)))?;
            let ratio = ZERO_OFFSETS[0] / ZERO_OFFSETS[1];
            (h2 * ratio - h1) / (ratio - 1.0)
        }
        Err(e) => return Err(e),
    };
    let mut scale = 0.0f64;
    for shift in [c64(0.21, 0.13), c64(-0.17, 0.24), c64(0.09, -0.31)] {
        let mut l = at(shift);
        l[1] -= shift * 0.5;
        scale = scale.max(z(params, &l)?.norm());
    }
    Ok(Residual::new(value.norm(), scale))
}

/// `|Z(λ) − Z(λ with λ_i ↔ λ_j)|` relative to `|Z(λ)|`.
pub fn symmetry_residual<Z: Evaluator>(params: &ModelParams, lambdas: &[C64], i: usize, j: usize, z: &Z) -> Result<Residual> {
    if i >= lambdas.len() || j >= lambdas.len() {
        return Err(SosError::InvalidArgument(format!("transposition ({i},{j}) out of range")));
    }
    let a = z(params, lambdas)?;
    let mut swapped = lambdas.to_vec();
    swapped.swap(i, j);
    let b = z(params, &swapped)?;
    Ok(Residual::new((a - b).norm(), a.norm()))
}

/// Same as [`symmetry_residual`] for the inhomogeneities.
pub fn mu_symmetry_residual<Z: Evaluator>(params: &ModelParams, lambdas: &[C64], i: usize, j: usize, z: &Z) -> Result<Residual> {
    if i >= params.size() || j >= params.size() {
        return Err(SosError::InvalidArgument(format!("transposition ({i},{j}) out of range")));
    }
    let a = z(params, lambdas)?;
    let mut swapped = params.clone();
    swapped.mu.swap(i, j);
    let b = z(&swapped, lambdas)?;
    Ok(Residual::new((a - b).norm(), a.norm()))
}

/// `|Z(θ_a) − Z(θ_b)| / |Z(θ_a)|` for two large real dynamical parameters.
pub fn theta_stabilization<Z: Evaluator>(params: &ModelParams, lambdas: &[C64], theta_a: f64, theta_b: f64, z: &Z) -> Result<Residual> {
    let a = z(&params.with_theta(c64(theta_a, 0.0)), lambdas)?;
    let b = z(&params.with_theta(c64(theta_b, 0.0)), lambdas)?;
    Ok(Residual::new((a - b).norm(), a.norm()))
}

/// `[n]_q! = ∏_{k=1}^{n} (1 + q + … + q^{k−1})`.
pub fn q_factorial(n: usize, q: C64) -> C64 {
    let mut acc = c64(1.0, 0.0);
    for k in 1..=n {
        let mut sum = c64(0.0, 0.0);
        let mut pow = c64(1.0, 0.0);
        for _ in 0..k {
            sum += pow;
            pow *= q;
        }
        acc *= sum;
    }
    acc
}

/// Leading coefficient of `Z̄ = Z ∏ x̄_i^L` in `∏ x_i^L`:
/// `(q−q⁻¹)^L / 2^{L²} · [L]_{q²}! / ∏_n (1 − q^{2n} t²) ū_n^L`.
pub fn asymptotic_leading_coefficient(params: &ModelParams) -> Result<C64> {
    let size = params.size();
    let d = DerivedVariables::new(params, &[]);
    let (q, t) = (d.q, d.t);
    let mut value = (q - q.inv()).powi(size as i32) / 2f64.powi((size * size) as i32) * q_factorial(size, q * q);
    for (n, &ubar) in d.ubar.iter().enumerate() {
        let res = c64(1.0, 0.0) - q.powi(2 * (n as i32 + 1)) * t * t;
        if res.norm() <= EPS_SING {
            return Err(SosError::SingularTheta { arg: params.height(n as i32 + 1) });
        }
        value /= res * ubar.powi(size as i32);
    }
    Ok(value)
}

/// `λ` with `e^{2λ} = x`, continued from `base` (so that `e^λ` tracks the
/// chosen square root).
fn lambda_of(base: C64, rho: f64, phi: f64) -> C64 {
    base + c64(rho.ln() / 2.0, phi / 2.0)
}

/// `Z ∏ x̄_i^L`.
fn zbar<Z: Evaluator>(params: &ModelParams, lambdas: &[C64], z: &Z) -> Result<C64> {
    let size = params.size() as f64;
    let sum: C64 = lambdas.iter().sum();
    Ok(z(params, lambdas)? * (sum * size).exp())
}

const INTERP_RADIUS: f64 = 100.0;

/// Coefficient of `∏ x_i^L` in `Z̄`, by an exact discrete Fourier
/// projection on circles `x_i = r_i e^{2λ_i^0} ω^k`, `ω^{L+1} = 1`.
pub fn interpolated_leading_coefficient<Z: Evaluator>(params: &ModelParams, centers: &[C64], z: &Z) -> Result<C64> {
    let size = params.size();
    if centers.len() != size {
        return Err(SosError::BadLength { expected: size, found: centers.len() });
    }
    let m = size + 1;
    let total = m.pow(size as u32);
    // Large circles favour the top coefficient over the lower ones.
    let radii: Vec<f64> = (0..size).map(|i| INTERP_RADIUS * (1.0 + 0.15 * i as f64)).collect();
    let mut terms = Vec::with_capacity(total);
    let mut digits = vec![0usize; size];
    for _ in 0..total {
        let mut lambdas = Vec::with_capacity(size);
        let mut weight = c64(1.0, 0.0);
        for i in 0..size {
            let phi = 2.0 * PI * digits[i] as f64 / m as f64;
            lambdas.push(lambda_of(centers[i], radii[i], phi));
            // x_i^{−L}
            weight *= (lambdas[i] * (-2.0 * size as f64)).exp();
        }
        terms.push(zbar(params, &lambdas, z)? * weight);
        for d in digits.iter_mut() {
            *d += 1;
            if *d < m {
                break;
            }
            *d = 0;
        }
    }
    Ok(pairwise_sum(&terms) / total as f64)
}

/// Least degree `d ≤ 2L` such that `Z̄` restricted to `x_which` agrees with
/// its degree-`d` interpolant at held-out nodes to 1e-9 relative.
pub fn degree_probe<Z: Evaluator>(params: &ModelParams, lambdas: &[C64], which: usize, z: &Z) -> Result<usize> {
    let size = params.size();
    if which >= lambdas.len() {
        return Err(SosError::InvalidArgument(format!("variable {which} out of range")));
    }
    let max_degree = 2 * size;
    let eval = |rho: f64, phi: f64| {
        let mut l = lambdas.to_vec();
        l[which] = lambda_of(lambdas[which], rho, phi);
        Ok::<_, SosError>((zbar(params, &l, z)?, (l[which] * 2.0).exp()))
    };
    let held: Vec<(C64, C64)> = [(1.4, 0.37), (0.75, 2.9), (1.2, 4.4)]
        .iter()
        .map(|&(r, p)| eval(r, p))
        .collect::<Result<_>>()?;
    let held_scale = held.iter().map(|(v, _)| v.norm()).fold(0.0, f64::max);
    let x0 = (lambdas[which] * 2.0).exp();
    for d in 0..=max_degree {
        let m = d + 1;
        let samples: Vec<C64> = (0..m)
            .map(|k| eval(1.0, 2.0 * PI * k as f64 / m as f64).map(|(v, _)| v))
            .collect::<Result<_>>()?;
        // coefficients in y = x / x0 on the unit circle
        let coeffs: Vec<C64> = (0..m)
            .map(|p| {
                let terms: Vec<C64> = samples
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * C64::from_polar(1.0, -2.0 * PI * (k * p) as f64 / m as f64))
                    .collect();
                pairwise_sum(&terms) / m as f64
            })
            .collect();
        let worst = held
            .iter()
            .map(|(v, x)| {
                let y = x / x0;
                let p = coeffs.iter().rev().fold(c64(0.0, 0.0), |acc, c| acc * y + c);
                (p - v).norm()
            })
            .fold(0.0, f64::max);
        if worst < 1e-9 * held_scale {
            return Ok(d);
        }
    }
    Err(SosError::NoPolynomialFit { max_degree })
}

/// Single-site normalization `C_1 = (q − q⁻¹) / 2 / ((1 − q²t²) ū_1)`.
pub fn l1_constant(params: &ModelParams) -> Result<C64> {
    if params.size() != 1 {
        return Err(SosError::BadLength { expected: 1, found: params.size() });
    }
    asymptotic_leading_coefficient(params)
}

/// The coefficients `(P_0, P_1, P_2)` of the single-site second-order
/// equation, as polynomials in `x`, `u`, `q`, `t`.
pub fn ode_coefficients(x: C64, params: &ModelParams) -> (C64, C64, C64) {
    let d = DerivedVariables::new(params, &[]);
    let (q, t, u) = (d.q, d.t, d.u[0]);
    let (q2, q4, q6, q8, q10) = (q.powi(2), q.powi(4), q.powi(6), q.powi(8), q.powi(10));
    let (t2, t4) = (t * t, t.powi(4));
    let p0 = (q2 * -4.0 + q4 * t2 * 2.0 + q6 * t2 * 2.0) * u + (q2 * 2.0 + q4 * 2.0 - q6 * t2 * 4.0) * x;
    let p1 = (q4 * t2 * -4.0 + q6 * t4 * 2.0 + q8 * t4 * 2.0) * u * u
        + (q2 * 4.0 - q8 * t4 * 4.0) * x * u
        + (q2 * -2.0 - q4 * 2.0 + q6 * t2 * 4.0) * x * x;
    let p2 = (c64(1.0, 0.0) + q2 - q4 * t2 * 4.0 + q6 * t4 + q8 * t4) * x * u * u
        + (q2 * -4.0 - q2 * t2 + q4 * t2 * 5.0 + q6 * t2 * 5.0 - q8 * t2 - q8 * t4 * 4.0) * u * x * x
        + (q2 + q4 - q6 * t2 * 4.0 + q8 * t4 + q10 * t4) * x.powi(3);
    (p0, p1, p2)
}

/// `|P_0 Z̄ + P_1 Z̄′ + P_2 Z̄″|` for `Z̄ = C_1 (x − q²t²u)`. The scale is
/// the sum of the moduli of the expanded monomial contributions, which
/// stays meaningful at the root of `Z̄` where both terms vanish.
pub fn ode_residual_l1(x: C64, params: &ModelParams) -> Result<Residual> {
    let c1 = l1_constant(params)?;
    let d = DerivedVariables::new(params, &[]);
    let (q, t, u) = (d.q, d.t, d.u[0]);
    let root = q * q * t * t * u;
    let z = c1 * (x - root);
    let dz = c1;
    let (p0, p1, p2) = ode_coefficients(x, params);
    let value = (p0 * z + p1 * dz + p2 * c64(0.0, 0.0)).norm();

    let (q2, q4, q6, q8) = (q.powi(2), q.powi(4), q.powi(6), q.powi(8));
    let (t2, t4) = (t * t, t.powi(4));
    let abs_sum = |cs: &[C64]| cs.iter().map(|c| c.norm()).sum::<f64>();
    let p0_mag = abs_sum(&[q2 * 4.0, q4 * t2 * 2.0, q6 * t2 * 2.0]) * u.norm()
        + abs_sum(&[q2 * 2.0, q4 * 2.0, q6 * t2 * 4.0]) * x.norm();
    let p1_mag = abs_sum(&[q4 * t2 * 4.0, q6 * t4 * 2.0, q8 * t4 * 2.0]) * u.norm_sqr()
        + abs_sum(&[q2 * 4.0, q8 * t4 * 4.0]) * (x * u).norm()
        + abs_sum(&[q2 * 2.0, q4 * 2.0, q6 * t2 * 4.0]) * x.norm_sqr();
    let scale = c1.norm() * (p0_mag * (x.norm() + root.norm()) + p1_mag);
    Ok(Residual::new(value, scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::partition_permutation_sum;
    use crate::face_model::enumerate_partition;
    use crate::params::s;

    fn params(size: usize) -> ModelParams {
        let mu = (0..size).map(|k| c64(0.2 - 0.3 * k as f64, 0.1 - 0.12 * k as f64)).collect();
        ModelParams::new(c64(0.33, 0.14), c64(0.5, -0.35), mu).unwrap()
    }

    fn lambdas(n: usize) -> Vec<C64> {
        (0..n).map(|k| c64(0.45 - 0.31 * k as f64, -0.2 + 0.23 * k as f64)).collect()
    }

    #[test]
    fn functional_equation_l1_to_l3() {
        for size in 1..=3 {
            let p = params(size);
            let r = functional_equation_residual(&p, &lambdas(size + 2), &partition_permutation_sum).unwrap();
            assert!(r.relative() < 1e-11, "L={size}: {r:?}");
        }
        let p = params(3);
        let r = functional_equation_residual(&p, &lambdas(5), &enumerate_partition).unwrap();
        assert!(r.relative() < 1e-10, "{r:?}");
    }

    #[test]
    fn special_zero_small() {
        let p = params(2);
        let r = special_zero_residual(&p, &[], &partition_permutation_sum).unwrap();
        assert!(r.relative() < 1e-10, "{r:?}");
        let p3 = params(3);
        let r3 = special_zero_residual(&p3, &[c64(0.3, 0.4)], &enumerate_partition).unwrap();
        assert!(r3.relative() < 1e-10, "{r3:?}");
    }

    #[test]
    fn symmetry_identity_transposition_is_exact() {
        let p = params(3);
        let r = symmetry_residual(&p, &lambdas(3), 1, 1, &partition_permutation_sum).unwrap();
        assert_eq!(r.value, 0.0);
        let r = symmetry_residual(&p, &lambdas(3), 0, 2, &partition_permutation_sum).unwrap();
        assert!(r.relative() < 1e-12);
        let r = mu_symmetry_residual(&p, &lambdas(3), 0, 1, &enumerate_partition).unwrap();
        assert!(r.relative() < 1e-12);
    }

    #[test]
    fn q_factorial_values() {
        assert_eq!(q_factorial(0, c64(2.0, 0.0)), c64(1.0, 0.0));
        assert_eq!(q_factorial(1, c64(2.0, 0.0)), c64(1.0, 0.0));
        assert_eq!(q_factorial(3, c64(2.0, 0.0)), c64(21.0, 0.0));
        for n in 0..7 {
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            assert_eq!(q_factorial(n, c64(1.0, 0.0)), c64(fact, 0.0));
        }
    }

    #[test]
    fn single_site_constant() {
        let p = params(1);
        let d = DerivedVariables::new(&p, &[]);
        let (q, t) = (d.q, d.t);
        let expect = (q - q.inv()) / 2.0 / ((c64(1.0, 0.0) - q * q * t * t) * d.ubar[0]);
        assert!((asymptotic_leading_coefficient(&p).unwrap() - expect).norm() < 1e-15 * expect.norm());
    }

    #[test]
    fn interpolated_coefficient_matches_prefactor() {
        for size in 1..=3 {
            let p = params(size);
            let got = interpolated_leading_coefficient(&p, &lambdas(size), &partition_permutation_sum).unwrap();
            let want = asymptotic_leading_coefficient(&p).unwrap();
            assert!((got - want).norm() < 1e-8 * want.norm(), "L={size} {got} {want}");
        }
    }

    #[test]
    fn degree_equals_size() {
        for size in 1..=3 {
            let p = params(size);
            for which in 0..size {
                let d = degree_probe(&p, &lambdas(size), which, &partition_permutation_sum).unwrap();
                assert_eq!(d, size);
            }
        }
    }

    #[test]
    fn degree_probe_reports_failure() {
        let p = params(1);
        let bad = |_: &ModelParams, l: &[C64]| Ok(s(l[0] * 3.7).exp());
        assert_eq!(degree_probe(&p, &[c64(0.1, 0.0)], 0, &bad).unwrap_err(), SosError::NoPolynomialFit { max_degree: 2 });
    }

    #[test]
    fn ode_solution() {
        let p = params(1);
        for x in [c64(0.7, 0.2), c64(-1.3, 0.9), c64(2.5, -1.1)] {
            assert!(ode_residual_l1(x, &p).unwrap().relative() < 1e-12);
        }
        let d = DerivedVariables::new(&p, &[]);
        let root = d.q * d.q * d.t * d.t * d.u[0];
        assert!(ode_residual_l1(root, &p).unwrap().relative() < 1e-12);
        let near_one = ModelParams::new(c64(1e-8, 0.0), c64(0.4, 0.2), vec![c64(0.1, 0.0)]).unwrap();
        assert!(ode_residual_l1(c64(0.8, 0.3), &near_one).unwrap().relative() < 1e-12);
    }

    #[test]
    fn large_theta_stabilizes() {
        for size in 1..=3 {
            let p = params(size);
            let r = theta_stabilization(&p, &lambdas(size), 30.0, 35.0, &partition_permutation_sum).unwrap();
            assert!(r.relative() < 1e-8, "L={size} {r:?}");
        }
    }
}
