//! Height (face) language: exact enumeration of domain-wall configurations
//! and the hexagon identity.
//!
//! Heights are integer offsets `k` standing for `θ + kγ`. A vertex sits
//! between four faces; its weight depends on the quartet of offsets and is
//! evaluated with the dynamical argument taken from the bottom-right face.

use std::env;

use crate::error::{Result, SosError};
use crate::params::{validate, ModelParams, Route, C64};
use crate::rmatrix::weights;
use crate::summation::pairwise_sum;

/// Default cap on L for the exponential enumeration.
pub const MAX_L_FACE: usize = 5;
pub const MAX_L_FACE_ENV: &str = "SOSDW_MAX_L_FACE";

/// Effective cap, honouring `SOSDW_MAX_L_FACE` when it parses.
pub fn max_l_face() -> usize {
    env::var(MAX_L_FACE_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(MAX_L_FACE)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaceKind {
    APlus,
    AMinus,
    BPlus,
    BMinus,
    CPlus,
    CMinus,
}

/// Offsets around one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FaceQuartet {
    pub k_bl: i32,
    pub k_br: i32,
    pub k_tl: i32,
    pub k_tr: i32,
}

impl FaceQuartet {
    pub fn new(k_bl: i32, k_br: i32, k_tl: i32, k_tr: i32) -> Self {
        FaceQuartet { k_bl, k_br, k_tl, k_tr }
    }

    fn as_array(&self) -> [i32; 4] {
        [self.k_bl, self.k_br, self.k_tl, self.k_tr]
    }

    pub fn classify(&self) -> Result<FaceKind> {
        let d = (self.k_br - self.k_bl, self.k_tl - self.k_bl, self.k_tr - self.k_bl);
        let kind = match d {
            (1, -1, 0) => FaceKind::APlus,
            (-1, 1, 0) => FaceKind::AMinus,
            (-1, -1, -2) => FaceKind::BPlus,
            (1, 1, 2) => FaceKind::BMinus,
            (-1, -1, 0) => FaceKind::CPlus,
            (1, 1, 0) => FaceKind::CMinus,
            _ => return Err(SosError::InvalidQuartet(self.as_array())),
        };
        Ok(kind)
    }
}

/// Weight of `quartet` with spectral argument `lambda`, heights measured
/// from `reference`.
pub fn face_weight_at(quartet: &FaceQuartet, lambda: C64, reference: C64, gamma: C64) -> Result<C64> {
    let kind = quartet.classify()?;
    let w = weights(lambda, reference + gamma * f64::from(quartet.k_br), gamma)?;
    Ok(match kind {
        FaceKind::APlus => w.a_plus,
        FaceKind::AMinus => w.a_minus,
        FaceKind::BPlus => w.b_plus,
        FaceKind::BMinus => w.b_minus,
        FaceKind::CPlus => w.c_plus,
        FaceKind::CMinus => w.c_minus,
    })
}

/// Weight of `quartet` with heights measured from `params.theta`.
pub fn face_weight(quartet: &FaceQuartet, lambda: C64, params: &ModelParams) -> Result<C64> {
    face_weight_at(quartet, lambda, params.theta, params.gamma)
}

/// `(L+1) × (L+1)` offsets, row `i` counted from the bottom, column `j`
/// from the left, both 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightGrid {
    size: usize,
    cells: Vec<Option<i32>>,
}

impl HeightGrid {
    pub fn size(&self) -> usize {
        self.size
    }

    fn index(&self, i: usize, j: usize) -> usize {
        assert!((1..=self.size + 1).contains(&i) && (1..=self.size + 1).contains(&j));
        (i - 1) * (self.size + 1) + (j - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> Option<i32> {
        self.cells[self.index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: i32) {
        let idx = self.index(i, j);
        self.cells[idx] = Some(k);
    }

    /// Rows bottom-to-top; unset cells are `None`.
    pub fn rows(&self) -> Vec<Vec<Option<i32>>> {
        self.cells.chunks(self.size + 1).map(|r| r.to_vec()).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    /// Every horizontal and vertical neighbour pair differs by exactly one.
    pub fn is_admissible(&self) -> bool {
        let n = self.size + 1;
        for i in 1..=n {
            for j in 1..=n {
                let Some(k) = self.get(i, j) else { return false };
                if j < n && self.get(i, j + 1).is_none_or(|r| (r - k).abs() != 1) {
                    return false;
                }
                if i < n && self.get(i + 1, j).is_none_or(|t| (t - k).abs() != 1) {
                    return false;
                }
            }
        }
        true
    }

    fn quartet(&self, i: usize, j: usize) -> FaceQuartet {
        let g = |a, b| self.get(a, b).expect("complete grid");
        FaceQuartet::new(g(i, j), g(i, j + 1), g(i + 1, j), g(i + 1, j + 1))
    }

    /// Product of the vertex weights, row by row from the bottom.
    pub fn weight(&self, params: &ModelParams, lambdas: &[C64], reference: C64) -> Result<C64> {
        let mut acc = C64::new(1.0, 0.0);
        for (i, &lambda) in lambdas.iter().enumerate().take(self.size) {
            for (j, &mu) in params.mu.iter().enumerate().take(self.size) {
                let q = self.quartet(i + 1, j + 1);
                acc *= face_weight_at(&q, lambda - mu, reference, params.gamma)?;
            }
        }
        Ok(acc)
    }
}

/// Domain-wall boundary offsets with the interior left unset.
pub fn dwbc_boundary(size: usize) -> HeightGrid {
    let n = size + 1;
    let mut grid = HeightGrid { size, cells: vec![None; n * n] };
    for j in 1..=n {
        let down = (n - j) as i32;
        let up = (j - 1) as i32;
        grid.set(1, j, down);
        grid.set(j, 1, down);
        grid.set(n, j, up);
        grid.set(j, n, up);
    }
    grid
}

/// All admissible completions of the domain-wall boundary, in
/// depth-first row-major order.
pub fn configurations(size: usize) -> Vec<HeightGrid> {
    let mut out = Vec::new();
    let mut grid = dwbc_boundary(size);
    let interior: Vec<(usize, usize)> =
        (2..=size).flat_map(|i| (2..=size).map(move |j| (i, j))).collect();
    fill(&mut grid, &interior, 0, &mut out);
    out
}

fn fill(grid: &mut HeightGrid, cells: &[(usize, usize)], pos: usize, out: &mut Vec<HeightGrid>) {
    let Some(&(i, j)) = cells.get(pos) else {
        out.push(grid.clone());
        return;
    };
    let n = grid.size + 1;
    let below = grid.get(i - 1, j).expect("filled in order");
    let left = grid.get(i, j - 1).expect("filled in order");
    for k in [below - 1, below + 1] {
        if (k - left).abs() != 1 {
            continue;
        }
        if j + 1 == n && (grid.get(i, n).expect("boundary") - k).abs() != 1 {
            continue;
        }
        if i + 1 == n && (grid.get(n, j).expect("boundary") - k).abs() != 1 {
            continue;
        }
        grid.set(i, j, k);
        fill(grid, cells, pos + 1, out);
    }
    let idx = grid.index(i, j);
    grid.cells[idx] = None;
}

/// Number of admissible domain-wall configurations.
pub fn configuration_count(size: usize) -> usize {
    configurations(size).len()
}

/// Domain-wall sum with heights measured from an explicit reference.
pub fn lattice_partition_at(params: &ModelParams, lambdas: &[C64], reference: C64) -> Result<C64> {
    validate(params, lambdas, Route::Face)?;
    let size = params.size();
    let max = max_l_face();
    if size > max {
        return Err(SosError::TooLarge { route: "face", size, max });
    }
    let terms = configurations(size)
        .iter()
        .map(|g| g.weight(params, lambdas, reference))
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&terms))
}

/// Domain-wall sum with the boundary offsets read literally, reference
/// height θ.
pub fn lattice_partition(params: &ModelParams, lambdas: &[C64]) -> Result<C64> {
    lattice_partition_at(params, lambdas, params.theta)
}

/// Partition function Z_θ by exact enumeration. The boundary offsets are
/// measured from θ + γ, which normalizes the sum to agree with the
/// B-operator string and the closed forms.
pub fn enumerate_partition(params: &ModelParams, lambdas: &[C64]) -> Result<C64> {
    lattice_partition_at(params, lambdas, params.height(1))
}

/// Weight with the hexagon layout `[[tl, tr], [bl, br]]`.
fn hex_w(tl: i32, tr: i32, bl: i32, br: i32, lambda: C64, params: &ModelParams) -> Result<C64> {
    face_weight(&FaceQuartet::new(bl, br, tl, tr), lambda, params)
}

fn common_neighbours(a: i32, b: i32, c: i32) -> Vec<i32> {
    [a - 1, a + 1]
        .into_iter()
        .filter(|&k| (k - b).abs() == 1 && (k - c).abs() == 1)
        .collect()
}

/// Both sides of the hexagon (star-triangle) identity for boundary offsets
/// `k1..k6` going around the hexagon.
pub fn hexagon_sides(u: C64, v: C64, ring: [i32; 6], params: &ModelParams) -> Result<(C64, C64)> {
    if (0..6).any(|i| (ring[i] - ring[(i + 1) % 6]).abs() != 1) {
        return Err(SosError::InvalidBoundary(ring));
    }
    let [l1, l2, l3, l4, l5, l6] = ring;
    let mut lhs = Vec::new();
    for l0 in common_neighbours(l2, l4, l6) {
        lhs.push(
            hex_w(l2, l0, l3, l4, v, params)?
                * hex_w(l1, l6, l2, l0, u + v, params)?
                * hex_w(l6, l5, l0, l4, u, params)?,
        );
    }
    let mut rhs = Vec::new();
    for l0 in common_neighbours(l1, l3, l5) {
        rhs.push(
            hex_w(l1, l0, l2, l3, u, params)?
                * hex_w(l0, l5, l3, l4, u + v, params)?
                * hex_w(l1, l6, l0, l5, v, params)?,
        );
    }
    Ok((pairwise_sum(&lhs), pairwise_sum(&rhs)))
}

pub fn hexagon_residual(u: C64, v: C64, ring: [i32; 6], params: &ModelParams) -> Result<crate::residual::Residual> {
    let (lhs, rhs) = hexagon_sides(u, v, ring, params)?;
    Ok(crate::residual::Residual::new((lhs - rhs).norm(), lhs.norm().max(rhs.norm())))
}

/// All admissible hexagon rings with `k1 = 0`.
pub fn admissible_rings() -> Vec<[i32; 6]> {
    let mut out = Vec::new();
    for mask in 0u32..32 {
        let mut ring = [0i32; 6];
        for i in 1..6 {
            let step = if mask >> (i - 1) & 1 == 0 { 1 } else { -1 };
            ring[i] = ring[i - 1] + step;
        }
        if (ring[5] - ring[0]).abs() == 1 {
            out.push(ring);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{c64, s};

    fn params(size: usize) -> ModelParams {
        let mu = (0..size).map(|k| c64(0.13 - 0.17 * k as f64, 0.05 * k as f64)).collect();
        ModelParams::new(c64(0.31, 0.07), c64(0.57, -0.2), mu).unwrap()
    }

    #[test]
    fn classify_patterns() {
        assert_eq!(FaceQuartet::new(0, 1, -1, 0).classify().unwrap(), FaceKind::APlus);
        assert_eq!(FaceQuartet::new(0, -1, -1, 0).classify().unwrap(), FaceKind::CPlus);
        assert_eq!(
            FaceQuartet::new(0, 2, 1, 1).classify().unwrap_err(),
            SosError::InvalidQuartet([0, 2, 1, 1])
        );
    }

    #[test]
    fn a_plus_and_c_plus_values() {
        let p = params(1);
        let l = c64(0.2, 0.1);
        let a = face_weight(&FaceQuartet::new(0, 1, -1, 0), l, &p).unwrap();
        assert_eq!(a, weights(l, p.theta, p.gamma).unwrap().a_plus);
        let c = face_weight(&FaceQuartet::new(0, -1, -1, 0), l, &p).unwrap();
        let expect = weights(l, p.height(-1), p.gamma).unwrap().c_plus;
        assert_eq!(c, expect);
    }

    #[test]
    fn boundary_small_cases() {
        let g = dwbc_boundary(1);
        assert_eq!(g.rows(), vec![vec![Some(1), Some(0)], vec![Some(0), Some(1)]]);
        for size in 1..=6 {
            let g = dwbc_boundary(size);
            let l = size as i32;
            assert_eq!(g.get(1, 1), Some(l));
            assert_eq!(g.get(1, size + 1), Some(0));
            assert_eq!(g.get(size + 1, 1), Some(0));
            assert_eq!(g.get(size + 1, size + 1), Some(l));
        }
        let g3 = dwbc_boundary(3);
        assert_eq!(g3.rows()[0], vec![Some(3), Some(2), Some(1), Some(0)]);
        assert_eq!(g3.rows()[3], vec![Some(0), Some(1), Some(2), Some(3)]);
        assert_eq!(g3.get(2, 2), None);
    }

    #[test]
    fn configuration_counts_are_asm_numbers() {
        let counts: Vec<usize> = (1..=5).map(configuration_count).collect();
        assert_eq!(counts, vec![1, 2, 7, 42, 429]);
        assert!(configurations(4).iter().all(|g| g.is_complete() && g.is_admissible()));
    }

    #[test]
    fn single_site_formula() {
        let p = params(1);
        let l = c64(0.41, -0.3);
        let z = enumerate_partition(&p, &[l]).unwrap();
        let g = p.gamma;
        let expect = s(g) * s(p.theta + g - l + p.mu[0]) / s(p.theta + g);
        assert!((z - expect).norm() < 1e-14 * expect.norm());
    }

    #[test]
    fn pinned_two_site_value() {
        // 40-digit reference at γ=0.31, θ=0.57, μ=(0.13,−0.22), λ=(0.41,0.18)
        let p = ModelParams::new(c64(0.31, 0.0), c64(0.57, 0.0), vec![c64(0.13, 0.0), c64(-0.22, 0.0)])
            .unwrap();
        let z = enumerate_partition(&p, &[c64(0.41, 0.0), c64(0.18, 0.0)]).unwrap();
        let expect = 0.018_805_557_352_697_27;
        assert!((z - c64(expect, 0.0)).norm() < 1e-10 * expect);
    }

    #[test]
    fn literal_lattice_is_shifted_partition() {
        let p = params(3);
        let l = [c64(0.3, 0.1), c64(-0.2, 0.4), c64(0.7, -0.3)];
        let literal = lattice_partition(&p, &l).unwrap();
        let shifted = enumerate_partition(&p.with_theta(p.height(-1)), &l).unwrap();
        assert!((literal - shifted).norm() < 1e-14 * literal.norm());
    }

    #[test]
    fn too_large_is_rejected() {
        let p = params(6);
        let l: Vec<C64> = (0..6).map(|k| c64(0.1 * k as f64, 0.0)).collect();
        if max_l_face() < 6 {
            assert!(matches!(enumerate_partition(&p, &l), Err(SosError::TooLarge { .. })));
        }
    }

    #[test]
    fn hexagon_all_rings() {
        let p = params(1);
        let rings = admissible_rings();
        assert_eq!(rings.len(), 20);
        for ring in rings {
            for (u, v) in [(c64(0.3, 0.2), c64(-0.4, 0.1)), (c64(0.0, 0.0), c64(0.25, -0.3))] {
                let r = hexagon_residual(u, v, ring, &p).unwrap();
                assert!(r.relative() < 1e-12, "{ring:?} {r:?}");
            }
        }
    }

    #[test]
    fn hexagon_rejects_bad_ring() {
        let p = params(1);
        let ring = [0, 2, 1, 0, 1, 0];
        assert_eq!(
            hexagon_residual(c64(0.1, 0.0), c64(0.2, 0.0), ring, &p).unwrap_err(),
            SosError::InvalidBoundary(ring)
        );
    }
}
