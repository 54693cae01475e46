use nalgebra::DMatrix;

use crate::params::{c64, C64};

/// Diagonal Cartan data `Ĥ = Σ ĥ_k` and `K = q^Ĥ` on `L` sites, together
/// with the raising and lowering sums `E = Σ σ⁺_k`, `F = Σ σ⁻_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartanOperator {
    pub size: usize,
    pub gamma: C64,
}

impl CartanOperator {
    pub fn new(size: usize, gamma: C64) -> Self {
        CartanOperator { size, gamma }
    }

    pub fn dimension(&self) -> usize {
        1 << self.size
    }

    /// Eigenvalue of Ĥ on basis state `idx`: L minus twice the number of `−`.
    pub fn h_eigenvalue(&self, idx: usize) -> i32 {
        self.size as i32 - 2 * idx.count_ones() as i32
    }

    /// Eigenvalue of `K^power` on basis state `idx`.
    pub fn k_eigenvalue(&self, idx: usize, power: i32) -> C64 {
        (self.gamma * f64::from(power * self.h_eigenvalue(idx))).exp()
    }

    pub fn h(&self) -> DMatrix<C64> {
        self.diagonal(|idx| c64(f64::from(self.h_eigenvalue(idx)), 0.0))
    }

    pub fn k(&self, power: i32) -> DMatrix<C64> {
        self.diagonal(|idx| self.k_eigenvalue(idx, power))
    }

    /// `f` applied to the K-eigenvalue of every basis state.
    pub fn diagonal<F: Fn(usize) -> C64>(&self, f: F) -> DMatrix<C64> {
        let n = self.dimension();
        let mut m = DMatrix::from_element(n, n, c64(0.0, 0.0));
        for idx in 0..n {
            m[(idx, idx)] = f(idx);
        }
        m
    }

    fn flip_sum(&self, from_bit: usize) -> DMatrix<C64> {
        let n = self.dimension();
        let mut m = DMatrix::from_element(n, n, c64(0.0, 0.0));
        for col in 0..n {
            for k in 0..self.size {
                let mask = 1 << k;
                if (col & mask != 0) == (from_bit == 1) {
                    m[(col ^ mask, col)] += c64(1.0, 0.0);
                }
            }
        }
        m
    }

    /// `E = Σ σ⁺_k`, sending `−` to `+`.
    pub fn e(&self) -> DMatrix<C64> {
        self.flip_sum(1)
    }

    /// `F = Σ σ⁻_k`, sending `+` to `−`.
    pub fn f(&self) -> DMatrix<C64> {
        self.flip_sum(0)
    }
}

/// All-up and all-down basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct VacuumStates {
    pub ket0: Vec<C64>,
    pub ket0bar: Vec<C64>,
}

impl VacuumStates {
    pub fn new(size: usize) -> Self {
        let n = 1usize << size;
        let mut ket0 = vec![c64(0.0, 0.0); n];
        let mut ket0bar = ket0.clone();
        ket0[0] = c64(1.0, 0.0);
        ket0bar[n - 1] = c64(1.0, 0.0);
        VacuumStates { ket0, ket0bar }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmatrix::max_abs;

    #[test]
    fn k_inverse_on_basis_states() {
        let c = CartanOperator::new(3, c64(0.37, -0.21));
        let prod = c.k(1) * c.k(-1);
        let id = DMatrix::identity(8, 8);
        assert!(max_abs(&(prod - id)) < 1e-15);
    }

    #[test]
    fn vacuum_charges() {
        for size in 1..=4 {
            let c = CartanOperator::new(size, c64(0.3, 0.0));
            let v = VacuumStates::new(size);
            assert_eq!(c.h_eigenvalue(0), size as i32);
            assert_eq!(c.h_eigenvalue(c.dimension() - 1), -(size as i32));
            let inner: C64 = v.ket0.iter().zip(&v.ket0bar).map(|(a, b)| a.conj() * b).sum();
            assert_eq!(inner, c64(0.0, 0.0));
            assert_eq!(v.ket0.iter().map(|x| x.norm_sqr()).sum::<f64>(), 1.0);
        }
    }

    #[test]
    fn su2_commutators() {
        let c = CartanOperator::new(3, c64(0.3, 0.0));
        let (h, e, f) = (c.h(), c.e(), c.f());
        let two = c64(2.0, 0.0);
        assert!(max_abs(&(&h * &e - &e * &h - &e * two)) < 1e-15);
        assert!(max_abs(&(&h * &f - &f * &h + &f * two)) < 1e-15);
        assert!(max_abs(&(&e * &f - &f * &e - &h)) < 1e-15);
    }
}
