use nalgebra::DMatrix;

use crate::error::{Result, SosError};
use crate::params::{c64, ModelParams, C64};
use crate::rmatrix::r_matrix;

/// Block of the monodromy matrix, read in the auxiliary space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Entry {
    A,
    B,
    C,
    D,
}

impl Entry {
    /// (incoming, outgoing) auxiliary bit, 0 meaning `+`.
    fn aux_bits(self) -> (usize, usize) {
        match self {
            Entry::A => (0, 0),
            Entry::B => (1, 0),
            Entry::C => (0, 1),
            Entry::D => (1, 1),
        }
    }
}

/// One entry of `T(λ, θ) = R_{a1}(λ−μ_1, θ_1) ⋯ R_{aL}(λ−μ_L, θ_L)` acting on
/// the quantum space, with `θ_i = θ − γ Σ_{k>i} ĥ_k`.
///
/// Quantum basis index: site 1 is the most significant bit, bit 0 is `+`.
#[derive(Debug, Clone)]
pub struct QuantumOperator {
    entry: Entry,
    size: usize,
    /// `table[s][d]`: R-matrix at site `s` (0-based) when `d` of the sites
    /// to its right carry `−`.
    table: Vec<Vec<std::result::Result<[[C64; 4]; 4], SosError>>>,
}

impl QuantumOperator {
    pub fn new(entry: Entry, lambda: C64, theta: C64, params: &ModelParams) -> Self {
        let size = params.size();
        let gamma = params.gamma;
        let table = (0..size)
            .map(|site| {
                let right = size - 1 - site;
                (0..=right)
                    .map(|down| {
                        let spin_sum = right as f64 - 2.0 * down as f64;
                        r_matrix(lambda - params.mu[site], theta - gamma * spin_sum, gamma)
                            .map(|r| r.entries)
                    })
                    .collect()
            })
            .collect();
        QuantumOperator { entry, size, table }
    }

    pub fn entry(&self) -> Entry {
        self.entry
    }

    pub fn dimension(&self) -> usize {
        1 << self.size
    }

    /// Applies the operator by propagating basis states through
    /// `R_{aL}`, then `R_{a,L−1}`, …, then `R_{a1}`.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        let n = self.dimension();
        if v.len() != n {
            return Err(SosError::BadLength { expected: n, found: v.len() });
        }
        let size = self.size;
        let (aux_in, aux_out) = self.entry.aux_bits();
        let zero = c64(0.0, 0.0);
        let mut cur = vec![zero; 2 * n];
        cur[aux_in * n..(aux_in + 1) * n].copy_from_slice(v);
        let mut next = vec![zero; 2 * n];
        for site in (0..size).rev() {
            let shift = size - 1 - site;
            let low_mask = (1usize << shift) - 1;
            next.iter_mut().for_each(|x| *x = zero);
            for (idx, &amp) in cur.iter().enumerate() {
                if amp == zero {
                    continue;
                }
                let aux = idx >> size;
                let bit = (idx >> shift) & 1;
                let down = (idx & low_mask).count_ones() as usize;
                let r = self.table[site][down].as_ref().map_err(Clone::clone)?;
                let cin = aux * 2 + bit;
                let base = idx & !(1 << size) & !(1 << shift);
                for (rout, row) in r.iter().enumerate() {
                    let w = row[cin];
                    if w == zero {
                        continue;
                    }
                    let out = base | ((rout >> 1) << size) | ((rout & 1) << shift);
                    next[out] += w * amp;
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(cur[aux_out * n..(aux_out + 1) * n].to_vec())
    }

    /// Dense `2^L × 2^L` matrix, column by column.
    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        let n = self.dimension();
        let mut m = DMatrix::from_element(n, n, c64(0.0, 0.0));
        let mut e = vec![c64(0.0, 0.0); n];
        for col in 0..n {
            e[col] = c64(1.0, 0.0);
            let out = self.apply(&e)?;
            e[col] = c64(0.0, 0.0);
            for (row, v) in out.into_iter().enumerate() {
                m[(row, col)] = v;
            }
        }
        Ok(m)
    }
}

/// Dense monodromy entry.
pub(crate) fn dense(entry: Entry, lambda: C64, theta: C64, params: &ModelParams) -> Result<DMatrix<C64>> {
    QuantumOperator::new(entry, lambda, theta, params).to_dense()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::s;
    use crate::rmatrix::weights;
    use crate::yb_algebra::VacuumStates;

    fn params(size: usize) -> ModelParams {
        let mu = (0..size).map(|k| c64(0.2 - 0.3 * k as f64, 0.1 + 0.07 * k as f64)).collect();
        ModelParams::new(c64(0.35, -0.15), c64(0.6, 0.25), mu).unwrap()
    }

    fn norm(v: &[C64]) -> f64 {
        v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn single_site_is_r_matrix_block() {
        let p = params(1);
        let l = c64(0.4, -0.2);
        let w = weights(l - p.mu[0], p.theta, p.gamma).unwrap();
        let b = dense(Entry::B, l, p.theta, &p).unwrap();
        assert_eq!(b[(1, 0)], w.c_plus);
        assert_eq!(b[(0, 0)], c64(0.0, 0.0));
        assert_eq!(b[(0, 1)], c64(0.0, 0.0));
        assert_eq!(b[(1, 1)], c64(0.0, 0.0));
        let a = dense(Entry::A, l, p.theta, &p).unwrap();
        assert_eq!(a[(0, 0)], w.a_plus);
        assert_eq!(a[(1, 1)], w.b_plus);
    }

    #[test]
    fn vacuum_eigenvalues() {
        for size in 1..=4 {
            let p = params(size);
            let l = c64(-0.3, 0.45);
            let vac = VacuumStates::new(size);
            let av = QuantumOperator::new(Entry::A, l, p.theta, &p).apply(&vac.ket0).unwrap();
            let dv = QuantumOperator::new(Entry::D, l, p.theta, &p).apply(&vac.ket0).unwrap();
            let a_expect: C64 = p.mu.iter().map(|m| s(l - m + p.gamma)).product();
            let d_expect: C64 = p.mu.iter().map(|m| s(l - m)).product::<C64>() * s(p.theta + p.gamma)
                / s(p.theta - p.gamma * (size as f64 - 1.0));
            assert!((av[0] - a_expect).norm() < 1e-13 * a_expect.norm());
            assert!((dv[0] - d_expect).norm() < 1e-13 * d_expect.norm());
            assert!(norm(&av[1..]) < 1e-15 && norm(&dv[1..]) < 1e-15);
            let cv = QuantumOperator::new(Entry::C, l, p.theta, &p).apply(&vac.ket0).unwrap();
            assert_eq!(norm(&cv), 0.0);
            let bv = QuantumOperator::new(Entry::B, l, p.theta, &p).apply(&vac.ket0bar).unwrap();
            assert_eq!(norm(&bv), 0.0);
        }
    }

    #[test]
    fn linearity_on_probes() {
        let p = params(3);
        let op = QuantumOperator::new(Entry::B, c64(0.1, 0.2), p.theta, &p);
        let v: Vec<C64> = (0..8).map(|k| c64(k as f64 * 0.3 - 1.0, 0.5 - 0.1 * k as f64)).collect();
        let w: Vec<C64> = (0..8).map(|k| c64(0.2 * k as f64, -0.3 + 0.05 * k as f64)).collect();
        let (alpha, beta) = (c64(0.7, -0.4), c64(-1.1, 0.3));
        let mixed: Vec<C64> = v.iter().zip(&w).map(|(a, b)| alpha * a + beta * b).collect();
        let lhs = op.apply(&mixed).unwrap();
        let ov = op.apply(&v).unwrap();
        let ow = op.apply(&w).unwrap();
        for k in 0..8 {
            let rhs = alpha * ov[k] + beta * ow[k];
            assert!((lhs[k] - rhs).norm() < 1e-14 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn wrong_vector_length() {
        let p = params(2);
        let op = QuantumOperator::new(Entry::A, c64(0.1, 0.0), p.theta, &p);
        assert!(matches!(op.apply(&[c64(1.0, 0.0)]), Err(SosError::BadLength { expected: 4, found: 1 })));
    }
}
