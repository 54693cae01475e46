use serde::Serialize;

use crate::error::{Result, SosError};
use crate::params::{check_separated, nonsingular, s, ModelParams, C64};

/// Ratios of θ-dependent sines shared by every coefficient at string
/// length `n` on `L` sites.
struct ThetaFactors {
    /// s(θ+γ) / s(θ+nγ)
    head: C64,
    /// 1 / s(θ+nγ)
    inv_n: C64,
    /// 1 / s(θ+(2n−1−L)γ)
    inv_mid: C64,
    /// s(θ+(n−L)γ)/s(θ+(2n−L)γ) · s(θ+nγ)/s(θ+(n−L)γ)
    common: C64,
    /// θ+(2n−1−L)γ
    mid_arg: C64,
}

impl ThetaFactors {
    fn new(theta: C64, gamma: C64, n: i32, size: i32) -> Result<Self> {
        let h = |k: i32| theta + gamma * f64::from(k);
        let sn = nonsingular(h(n))?;
        let s_mid = nonsingular(h(2 * n - 1 - size))?;
        let s_nl = nonsingular(h(n - size))?;
        let s_2nl = nonsingular(h(2 * n - size))?;
        Ok(ThetaFactors {
            head: s(h(1)) / sn,
            inv_n: sn.inv(),
            inv_mid: s_mid.inv(),
            common: s(h(n - size)) / s_2nl * sn / s_nl,
            mid_arg: h(2 * n - 1 - size),
        })
    }
}

fn context(lambdas: &[C64], params: &ModelParams) -> Result<usize> {
    check_separated(lambdas).map_err(|(i, j)| SosError::CoincidentSpectral { i, j })?;
    shape(lambdas, params)
}

fn shape(lambdas: &[C64], params: &ModelParams) -> Result<usize> {
    if lambdas.len() < 2 {
        return Err(SosError::InvalidArgument("coefficients need λ_0 and at least one λ_i".into()));
    }
    if params.mu.is_empty() {
        return Err(SosError::EmptyLattice);
    }
    Ok(lambdas.len() - 1)
}

/// `M_i` for `λ_0 … λ_n` (`lambdas.len() = n + 1`) on `L = params.size()`
/// sites, `1 ≤ i ≤ n`.
pub fn coeff_m(i: usize, lambdas: &[C64], theta: C64, params: &ModelParams) -> Result<C64> {
    context(lambdas, params)?;
    coeff_m_unguarded(i, lambdas, theta, params)
}

/// [`coeff_m`] without the separation guard, for limits near the poles.
pub(crate) fn coeff_m_unguarded(i: usize, lambdas: &[C64], theta: C64, params: &ModelParams) -> Result<C64> {
    let n = shape(lambdas, params)?;
    if i == 0 || i > n {
        return Err(SosError::InvalidArgument(format!("M index {i} outside 1..={n}")));
    }
    let g = params.gamma;
    let tf = ThetaFactors::new(theta, g, n as i32, params.size() as i32)?;
    let (l0, li) = (lambdas[0], lambdas[i]);

    let mut t1 = s(g) / s(li - l0) * tf.head * s(l0 - li + tf.mid_arg) * tf.inv_mid * tf.common;
    for &mu in &params.mu {
        t1 *= s(l0 - mu + g) * s(li - mu);
    }
    for (k, &lk) in lambdas.iter().enumerate().skip(1) {
        if k != i {
            t1 *= s(li - lk + g) / s(li - lk) * s(lk - l0 + g) / s(lk - l0);
        }
    }

    let mut t2 = s(g) / s(l0 - li) * s(l0 - li + theta + g) * tf.inv_n * tf.common;
    for &mu in &params.mu {
        t2 *= s(li - mu + g) * s(l0 - mu);
    }
    for (k, &lk) in lambdas.iter().enumerate().skip(1) {
        if k != i {
            t2 *= s(l0 - lk + g) / s(l0 - lk) * s(lk - li + g) / s(lk - li);
        }
    }
    Ok(t1 + t2)
}

/// `N_{ji}` for `1 ≤ i < j ≤ n`.
pub fn coeff_n(j: usize, i: usize, lambdas: &[C64], theta: C64, params: &ModelParams) -> Result<C64> {
    context(lambdas, params)?;
    coeff_n_unguarded(j, i, lambdas, theta, params)
}

pub(crate) fn coeff_n_unguarded(j: usize, i: usize, lambdas: &[C64], theta: C64, params: &ModelParams) -> Result<C64> {
    let n = shape(lambdas, params)?;
    if !(1 <= i && i < j && j <= n) {
        return Err(SosError::InvalidArgument(format!("N index ({j},{i}) needs 1 <= i < j <= {n}")));
    }
    let g = params.gamma;
    let tf = ThetaFactors::new(theta, g, n as i32, params.size() as i32)?;
    let l0 = lambdas[0];
    let term = |a: C64, b: C64, skip: (usize, usize)| {
        // first term with (a, b) = (λ_i, λ_j); the second swaps them
        let mut t = s(g) / s(l0 - b) * s(g) / s(a - l0) * s(b - a + g) / s(b - a)
            * s(l0 - a + theta + g)
            * tf.inv_n
            * s(l0 - b + tf.mid_arg)
            * tf.inv_mid
            * tf.common;
        for &mu in &params.mu {
            t *= s(a - mu + g) * s(b - mu);
        }
        for (m, &lm) in lambdas.iter().enumerate().skip(1) {
            if m != skip.0 && m != skip.1 {
                t *= s(b - lm + g) / s(b - lm) * s(lm - a + g) / s(lm - a);
            }
        }
        t
    };
    Ok(term(lambdas[i], lambdas[j], (i, j)) + term(lambdas[j], lambdas[i], (i, j)))
}

/// All `M_i` and `N_{ji}` at one argument set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalCoefficients {
    pub n: usize,
    pub size: usize,
    pub theta: C64,
    pub m: Vec<C64>,
    /// `((j, i), N_{ji})` in the order j = 2..n, i = 1..j−1.
    pub n_coeffs: Vec<((usize, usize), C64)>,
}

impl FunctionalCoefficients {
    pub fn compute(lambdas: &[C64], theta: C64, params: &ModelParams) -> Result<Self> {
        let n = context(lambdas, params)?;
        let m = (1..=n).map(|i| coeff_m(i, lambdas, theta, params)).collect::<Result<_>>()?;
        let mut n_coeffs = Vec::new();
        for j in 2..=n {
            for i in 1..j {
                n_coeffs.push(((j, i), coeff_n(j, i, lambdas, theta, params)?));
            }
        }
        Ok(FunctionalCoefficients { n, size: params.size(), theta, m, n_coeffs })
    }

    pub fn n_at(&self, j: usize, i: usize) -> Option<C64> {
        self.n_coeffs.iter().find(|(k, _)| *k == (j, i)).map(|(_, v)| *v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::c64;

    fn reference_set() -> (ModelParams, Vec<C64>, C64) {
        let p = ModelParams::new(c64(0.31, 0.12), c64(0.57, -0.2), vec![c64(0.13, 0.05), c64(-0.22, 0.1)])
            .unwrap();
        let l = vec![c64(0.4, 0.1), c64(-0.3, 0.25), c64(0.15, -0.35), c64(0.7, 0.3)];
        (p.clone(), l, p.theta)
    }

    fn close(a: C64, re: f64, im: f64) -> bool {
        let b = c64(re, im);
        (a - b).norm() < 1e-13 * b.norm()
    }

    #[test]
    fn independent_transcription_values() {
        let (p, l, th) = reference_set();
        let c = FunctionalCoefficients::compute(&l, th, &p).unwrap();
        assert!(close(c.m[0], -0.008_388_140_888_054_143, 0.006_299_726_700_261_203));
        assert!(close(c.m[1], 0.048_232_158_478_411_29, 0.020_520_613_461_854_93));
        assert!(close(c.m[2], 0.001_376_757_114_817_300_8, 0.052_901_629_483_893_244));
        assert!(close(c.n_at(2, 1).unwrap(), -0.000_537_527_848_330_531_1, -0.010_423_973_243_651_527));
        assert!(close(c.n_at(3, 1).unwrap(), -0.046_089_594_359_126_96, -0.032_539_948_263_083_526));
        assert!(close(c.n_at(3, 2).unwrap(), -0.059_387_475_119_400_734, -0.118_419_304_420_426_18));
    }

    #[test]
    fn n_is_invariant_under_swapping_its_indices() {
        let (p, l, th) = reference_set();
        let mut swapped = l.clone();
        swapped.swap(1, 3);
        let a = coeff_n(3, 1, &l, th, &p).unwrap();
        let b = coeff_n(3, 1, &swapped, th, &p).unwrap();
        assert!((a - b).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn specialization_two_sites() {
        let p = ModelParams::new(c64(0.27, -0.13), c64(-0.4, 0.35), vec![c64(0.2, 0.1), c64(-0.35, -0.2)])
            .unwrap();
        let (g, th) = (p.gamma, p.theta);
        let (mu1, mu2) = (p.mu[0], p.mu[1]);
        let (l1, l2) = (c64(0.5, 0.3), c64(-0.1, -0.45));
        let l = [mu1, l1, l2, mu1 - g];
        let c = FunctionalCoefficients::compute(&l, th, &p).unwrap();
        let scale = c.m[2].norm();
        assert!(c.m[0].norm() < 1e-14 * scale && c.m[1].norm() < 1e-14 * scale);
        let m2 = -s(th + g) / s(th + g * 3.0) * s(g) * s(g) * s(mu1 - mu2 + g) * s(mu2 - mu1 + g);
        assert!((c.m[2] - m2).norm() < 1e-12 * m2.norm());
        let mbar = |a: C64, b: C64| {
            s(th + g - a + mu1) / s(th + g * 3.0) * s(g) * s(g) * s(mu2 - mu1 + g) * s(a - mu2 + g)
                * s(b - mu1)
                / s(b - mu1 + g)
                * s(b - a + g)
                / s(b - a)
        };
        let (n31, n32) = (c.n_at(3, 1).unwrap(), c.n_at(3, 2).unwrap());
        assert!((n31 - mbar(l1, l2)).norm() < 1e-12 * n31.norm());
        assert!((n32 - mbar(l2, l1)).norm() < 1e-12 * n32.norm());
    }

    #[test]
    fn pole_limits_pair_m_with_n() {
        let p = ModelParams::new(c64(0.3, 0.1), c64(0.45, -0.25), vec![c64(0.1, 0.2), c64(-0.3, 0.0), c64(0.4, -0.3)])
            .unwrap();
        let base = vec![c64(0.0, 0.0), c64(0.6, 0.1), c64(-0.4, 0.3), c64(0.2, -0.5), c64(-0.7, -0.2)];
        let n = base.len() - 1;
        let eps = 1e-6;
        for j in 1..=n {
            for k in (1..=n).filter(|&k| k != j) {
                let limit = |f: &dyn Fn(&[C64]) -> C64| {
                    let mut acc = c64(0.0, 0.0);
                    for sign in [1.0, -1.0] {
                        let mut l = base.clone();
                        l[0] = base[j] + c64(sign * eps, 0.0);
                        acc += s(l[0] - base[j]) * f(&l);
                    }
                    acc / 2.0
                };
                let m = limit(&|l| coeff_m_unguarded(k, l, p.theta, &p).unwrap());
                let (a, b) = if k < j { (j, k) } else { (k, j) };
                let nn = limit(&|l| coeff_n_unguarded(a, b, l, p.theta, &p).unwrap());
                assert!((m + nn).norm() < 1e-6 * m.norm(), "j={j} k={k}");
            }
        }
    }

    #[test]
    fn rejects_bad_indices_and_coincidence() {
        let (p, l, th) = reference_set();
        assert!(coeff_m(0, &l, th, &p).is_err());
        assert!(coeff_n(1, 2, &l, th, &p).is_err());
        let mut same = l.clone();
        same[2] = same[1];
        assert_eq!(coeff_m(1, &same, th, &p).unwrap_err(), SosError::CoincidentSpectral { i: 1, j: 2 });
    }
}
