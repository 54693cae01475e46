//! Multiple contour-integral representation of the partition function,
//! evaluated by residues and by trapezoid quadrature on a shared circle.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::MAX_L_PERM;
use crate::error::{Result, SosError};
use crate::params::{c64, nonsingular, s, validate, ModelParams, Route, C64};
use crate::summation::pairwise_sum;

pub const DELTA_MARGIN: f64 = 0.05;
pub const MAX_L_QUAD: usize = 3;
pub const MAX_NODES: usize = 512;
pub const QUAD_TOL: f64 = 1e-10;
const POLE_EPS: f64 = 1e-13;
const START_NODES: usize = 16;

/// Circle `w(φ) = center + radius e^{iφ}` sampled at `nodes` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourSpec {
    pub center: C64,
    pub radius: f64,
    pub nodes: usize,
}

/// Smallest `|λ_j + ikπ − c|` over `k ≠ 0`.
fn nearest_copy(lambdas: &[C64], center: C64) -> f64 {
    let mut best = f64::INFINITY;
    for &l in lambdas {
        let d = l - center;
        let k0 = (-d.im / PI).round() as i64;
        for k in (k0 - 2)..=(k0 + 2) {
            if k != 0 {
                best = best.min((d + c64(0.0, PI * k as f64)).norm());
            }
        }
    }
    best
}

impl ContourSpec {
    pub fn new(center: C64, radius: f64, nodes: usize) -> Self {
        ContourSpec { center, radius, nodes }
    }

    /// Every λ_j strictly inside (with margin) and every iπ-copy outside.
    pub fn check(&self, lambdas: &[C64]) -> Result<()> {
        self.check_shape()?;
        for (j, &l) in lambdas.iter().enumerate() {
            if (l - self.center).norm() >= self.radius - DELTA_MARGIN {
                return Err(SosError::ContourInvalid(format!("λ_{} is not enclosed with margin", j + 1)));
            }
        }
        if nearest_copy(lambdas, self.center) <= self.radius + DELTA_MARGIN {
            return Err(SosError::ContourInvalid("an iπ-shifted pole lies inside or near the contour".into()));
        }
        Ok(())
    }

    /// Only that no pole (or iπ-copy) lies within the margin of the circle.
    pub fn check_off_contour(&self, lambdas: &[C64]) -> Result<()> {
        self.check_shape()?;
        for (j, &l) in lambdas.iter().enumerate() {
            if ((l - self.center).norm() - self.radius).abs() <= DELTA_MARGIN {
                return Err(SosError::ContourInvalid(format!("λ_{} lies near the contour", j + 1)));
            }
        }
        if (nearest_copy(lambdas, self.center) - self.radius).abs() <= DELTA_MARGIN {
            return Err(SosError::ContourInvalid("an iπ-shifted pole lies near the contour".into()));
        }
        Ok(())
    }

    fn check_shape(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) || self.nodes == 0 {
            return Err(SosError::ContourInvalid("radius and node count must be positive".into()));
        }
        Ok(())
    }

    /// Circle about the mean of the λ_j whose radius sits at fraction `t`
    /// (on a log scale) between the enclosed poles and the nearest copy.
    pub fn auto_with(lambdas: &[C64], t: f64) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(SosError::EmptyLattice);
        }
        let center = lambdas.iter().sum::<C64>() / lambdas.len() as f64;
        let inner = lambdas.iter().map(|l| (l - center).norm()).fold(0.0, f64::max).max(0.25);
        let outer = nearest_copy(lambdas, center);
        let radius = inner.powf(1.0 - t) * outer.powf(t);
        let spec = ContourSpec::new(center, radius, START_NODES);
        spec.check(lambdas)?;
        Ok(spec)
    }

    pub fn auto(lambdas: &[C64]) -> Result<Self> {
        Self::auto_with(lambdas, 0.5)
    }
}

/// Single-variable factor of the integrand for variable `i` (0-based).
fn variable_factor(i: usize, w: C64, lambdas: &[C64], params: &ModelParams, inv_height: C64) -> Result<C64> {
    let g = params.gamma;
    let mut f = s(params.height(i as i32 + 1) - w + params.mu[i]) * inv_height;
    for &l in lambdas {
        let d = s(w - l);
        if d.norm() < POLE_EPS {
            return Err(SosError::PoleHit);
        }
        f /= d;
    }
    for (j, &mu) in params.mu.iter().enumerate() {
        if j < i {
            f *= s(mu - w);
        } else if j > i {
            f *= s(w - mu + g);
        }
    }
    Ok(f)
}

/// `s(w_b − w_a + γ) s(w_b − w_a)` for `a < b`.
fn pair_factor(wa: C64, wb: C64, gamma: C64) -> C64 {
    let d = wb - wa;
    s(d + gamma) * s(d)
}

fn inverse_heights(params: &ModelParams) -> Result<Vec<C64>> {
    (1..=params.size()).map(|n| nonsingular(params.height(n as i32)).map(|v| v.inv())).collect()
}

/// The integrand at `w_1 … w_L`, without the `(s(γ)/2πi)^L` prefactor.
pub fn integrand(w: &[C64], lambdas: &[C64], params: &ModelParams) -> Result<C64> {
    let size = params.size();
    if w.len() != size || lambdas.len() != size {
        return Err(SosError::BadLength { expected: size, found: w.len().min(lambdas.len()) });
    }
    let inv = inverse_heights(params)?;
    let mut f = c64(1.0, 0.0);
    for a in 0..size {
        for b in (a + 1)..size {
            f *= pair_factor(w[a], w[b], params.gamma);
        }
    }
    for (i, &wi) in w.iter().enumerate() {
        f *= variable_factor(i, wi, lambdas, params, inv[i])?;
    }
    Ok(f)
}

/// Residue of the single-variable factor at `w = λ_a`.
fn residue_factor(i: usize, a: usize, lambdas: &[C64], params: &ModelParams, inv_height: C64) -> C64 {
    let la = lambdas[a];
    let g = params.gamma;
    let mut f = s(params.height(i as i32 + 1) - la + params.mu[i]) * inv_height;
    for (j, &l) in lambdas.iter().enumerate() {
        if j != a {
            f /= s(la - l);
        }
    }
    for (j, &mu) in params.mu.iter().enumerate() {
        if j < i {
            f *= s(mu - la);
        } else if j > i {
            f *= s(la - mu + g);
        }
    }
    f
}

/// Sum of residues over injective assignments `w_i = λ_{σ(i)}` with every
/// `λ_{σ(i)}` drawn from `allowed`.
fn residue_sum(params: &ModelParams, lambdas: &[C64], allowed: &[usize]) -> Result<C64> {
    let size = params.size();
    if allowed.len() < size {
        return Ok(c64(0.0, 0.0));
    }
    let inv = inverse_heights(params)?;
    let table: Vec<Vec<C64>> = (0..size)
        .map(|i| (0..lambdas.len()).map(|a| residue_factor(i, a, lambdas, params, inv[i])).collect())
        .collect();
    let g = params.gamma;
    let pairs: Vec<Vec<C64>> = lambdas
        .iter()
        .map(|&la| lambdas.iter().map(|&lb| pair_factor(la, lb, g)).collect())
        .collect();
    let mut terms = Vec::new();
    let mut chosen = Vec::with_capacity(size);
    assign(&table, &pairs, allowed, &mut chosen, c64(1.0, 0.0), &mut terms);
    Ok(s(g).powi(size as i32) * pairwise_sum(&terms))
}

fn assign(
    table: &[Vec<C64>],
    pairs: &[Vec<C64>],
    allowed: &[usize],
    chosen: &mut Vec<usize>,
    acc: C64,
    out: &mut Vec<C64>,
) {
    let i = chosen.len();
    if i == table.len() {
        out.push(acc);
        return;
    }
    for &a in allowed {
        if chosen.contains(&a) {
            continue;
        }
        let mut f = acc * table[i][a];
        for &prev in chosen.iter() {
            f *= pairs[prev][a];
        }
        chosen.push(a);
        assign(table, pairs, allowed, chosen, f, out);
        chosen.pop();
    }
}

/// Cauchy evaluation with every pole enclosed.
pub fn partition_residue(params: &ModelParams, lambdas: &[C64]) -> Result<C64> {
    validate(params, lambdas, Route::Residue)?;
    let size = params.size();
    if size > MAX_L_PERM {
        return Err(SosError::TooLarge { route: "residue", size, max: MAX_L_PERM });
    }
    let all: Vec<usize> = (0..size).collect();
    residue_sum(params, lambdas, &all)
}

/// Residue sum restricted to the poles `λ_j` enclosed by `spec`; the
/// contour must not enclose any iπ-copy.
pub fn partition_residue_enclosed(params: &ModelParams, lambdas: &[C64], spec: &ContourSpec) -> Result<C64> {
    validate(params, lambdas, Route::Residue)?;
    spec.check_off_contour(lambdas)?;
    if nearest_copy(lambdas, spec.center) < spec.radius {
        return Err(SosError::ContourInvalid("an iπ-shifted pole is enclosed".into()));
    }
    let inside: Vec<usize> =
        (0..lambdas.len()).filter(|&j| (lambdas[j] - spec.center).norm() < spec.radius).collect();
    residue_sum(params, lambdas, &inside)
}

/// Trapezoid rule with exactly `spec.nodes` points per variable.
pub fn quadrature_fixed(params: &ModelParams, lambdas: &[C64], spec: &ContourSpec) -> Result<C64> {
    validate(params, lambdas, Route::Quadrature)?;
    let size = params.size();
    if size > MAX_L_QUAD {
        return Err(SosError::TooLarge { route: "quadrature", size, max: MAX_L_QUAD });
    }
    spec.check_off_contour(lambdas)?;
    let n = spec.nodes;
    let inv = inverse_heights(params)?;
    let nodes: Vec<(C64, C64)> = (0..n)
        .map(|k| {
            let e = C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
            (spec.center + e * spec.radius, e * spec.radius / n as f64)
        })
        .collect();
    // (s(γ)/2πi) · i r e^{iφ} · 2π/N = s(γ) r e^{iφ} / N per variable
    let tables: Vec<Vec<C64>> = (0..size)
        .map(|i| {
            nodes
                .iter()
                .map(|&(w, jac)| variable_factor(i, w, lambdas, params, inv[i]).map(|f| f * jac))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let g = params.gamma;
    let pair: Vec<Vec<C64>> = if size > 1 {
        nodes.iter().map(|&(wa, _)| nodes.iter().map(|&(wb, _)| pair_factor(wa, wb, g)).collect()).collect()
    } else {
        Vec::new()
    };
    let outer: Vec<C64> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut idx = vec![a];
            nested(&tables, &pair, &mut idx, tables[0][a])
        })
        .collect();
    Ok(s(g).powi(size as i32) * pairwise_sum(&outer))
}

fn nested(tables: &[Vec<C64>], pair: &[Vec<C64>], idx: &mut Vec<usize>, acc: C64) -> C64 {
    let level = idx.len();
    if level == tables.len() {
        return acc;
    }
    let n = tables[level].len();
    let mut terms = Vec::with_capacity(n);
    for b in 0..n {
        let mut f = acc * tables[level][b];
        for &prev in idx.iter() {
            f *= pair[prev][b];
        }
        idx.push(b);
        terms.push(nested(tables, pair, idx, f));
        idx.pop();
    }
    pairwise_sum(&terms)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: C64,
    pub nodes: usize,
    /// Relative change between the last two node counts.
    pub change: f64,
}

/// Node doubling from `spec.nodes` until two successive values differ by
/// less than 1e-10 relative.
pub fn partition_quadrature(params: &ModelParams, lambdas: &[C64], spec: &ContourSpec) -> Result<QuadratureResult> {
    validate(params, lambdas, Route::Quadrature)?;
    spec.check(lambdas)?;
    let mut nodes = spec.nodes.max(1);
    let mut prev = quadrature_fixed(params, lambdas, &ContourSpec { nodes, ..*spec })?;
    loop {
        let next_nodes = nodes * 2;
        if next_nodes > MAX_NODES {
            let change = f64::INFINITY;
            return Err(SosError::NoConvergence { nodes, change });
        }
        let value = quadrature_fixed(params, lambdas, &ContourSpec { nodes: next_nodes, ..*spec })?;
        let change = (value - prev).norm() / value.norm().max(f64::MIN_POSITIVE);
        if change < QUAD_TOL {
            return Ok(QuadratureResult { value, nodes: next_nodes, change });
        }
        if next_nodes * 2 > MAX_NODES {
            return Err(SosError::NoConvergence { nodes: next_nodes, change });
        }
        prev = value;
        nodes = next_nodes;
    }
}

/// Quadrature on the automatically chosen contour.
pub fn partition_quadrature_auto(params: &ModelParams, lambdas: &[C64]) -> Result<QuadratureResult> {
    validate(params, lambdas, Route::Quadrature)?;
    let spec = ContourSpec::auto(lambdas)?;
    partition_quadrature(params, lambdas, &spec)
}
