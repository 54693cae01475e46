use rayon::prelude::*;

use crate::error::{Result, SosError};
use crate::params::{nonsingular, s, validate, ModelParams, Route, C64};
use crate::summation::pairwise_sum;

pub const MAX_L_PERM: usize = 8;

/// Per-(spectral index, position) factors and pair factors of the
/// permutation-sum summand.
pub(crate) struct PermTables {
    pub prefactor: C64,
    /// `single[i][n]`: λ_i placed at position n.
    pub single: Vec<Vec<C64>>,
    /// `pair[a][b] = s(λ_b − λ_a + γ) / s(λ_b − λ_a)`.
    pub pair: Vec<Vec<C64>>,
}

impl PermTables {
    pub fn new(params: &ModelParams, lambdas: &[C64]) -> Result<Self> {
        let size = params.size();
        let g = params.gamma;
        let mut inv_height = Vec::with_capacity(size);
        for n in 1..=size {
            inv_height.push(nonsingular(params.height(n as i32))?.inv());
        }
        let single = lambdas
            .iter()
            .map(|&li| {
                (0..size)
                    .map(|n| {
                        let mut f = s(params.height(n as i32 + 1) - li + params.mu[n]) * inv_height[n];
                        for (j, &mu) in params.mu.iter().enumerate() {
                            if j > n {
                                f *= s(li - mu + g);
                            } else if j < n {
                                f *= s(li - mu);
                            }
                        }
                        f
                    })
                    .collect()
            })
            .collect();
        let pair = lambdas
            .iter()
            .map(|&la| {
                lambdas
                    .iter()
                    .map(|&lb| {
                        let d = lb - la;
                        s(d + g) / s(d)
                    })
                    .collect()
            })
            .collect();
        Ok(PermTables { prefactor: s(g).powi(size as i32), single, pair })
    }

    /// Summand for the assignment `order[n]` = spectral index at position n.
    pub fn term(&self, order: &[usize]) -> C64 {
        let mut f = self.prefactor;
        for (n, &i) in order.iter().enumerate() {
            f *= self.single[i][n];
        }
        for a in 0..order.len() {
            for b in (a + 1)..order.len() {
                f *= self.pair[order[a]][order[b]];
            }
        }
        f
    }
}

/// Advances `p` to the next permutation in lexicographic order.
pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let Some(i) = (0..p.len() - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Sum over all `L!` orderings of the spectral parameters.
pub fn partition_permutation_sum(params: &ModelParams, lambdas: &[C64]) -> Result<C64> {
    validate(params, lambdas, Route::Permutation)?;
    let size = params.size();
    if size > MAX_L_PERM {
        return Err(SosError::TooLarge { route: "permutation", size, max: MAX_L_PERM });
    }
    let tables = PermTables::new(params, lambdas)?;
    let partial: Vec<C64> = (0..size)
        .into_par_iter()
        .map(|first| {
            let mut rest: Vec<usize> = (0..size).filter(|&k| k != first).collect();
            let mut order = Vec::with_capacity(size);
            let mut terms = Vec::new();
            loop {
                order.clear();
                order.push(first);
                order.extend_from_slice(&rest);
                terms.push(tables.term(&order));
                if !next_permutation(&mut rest) {
                    break;
                }
            }
            pairwise_sum(&terms)
        })
        .collect();
    Ok(pairwise_sum(&partial))
}

/// Closed single-site value `s(γ) s(θ+γ−λ+μ_1) / s(θ+γ)`.
pub fn partition_l1(params: &ModelParams, lambda: C64) -> Result<C64> {
    if params.size() != 1 {
        return Err(SosError::BadLength { expected: 1, found: params.size() });
    }
    let g = params.gamma;
    let den = nonsingular(params.height(1))?;
    Ok(s(g) * s(params.height(1) - lambda + params.mu[0]) / den)
}
