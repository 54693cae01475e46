//! Seeded identity suites behind `sosdw verify`.
//!
//! Every suite draws its parameters from its own [`Sampler`] seeded with
//! the requested seed, so a report is a pure function of
//! `(suite, seed, draws)`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::closed_form::{
    asymptotic_leading_coefficient, degree_probe, functional_equation_residual, interpolated_leading_coefficient,
    mu_symmetry_residual, ode_residual_l1, partition_permutation_sum, special_zero_residual, symmetry_residual,
    theta_stabilization,
};
use crate::contour::{partition_quadrature_auto, partition_residue, quadrature_fixed, ContourSpec, MAX_NODES};
use crate::error::{Result, SosError};
use crate::face_model::{admissible_rings, enumerate_partition, hexagon_residual};
use crate::params::{validate, ModelParams, Route, C64};
use crate::report::{fmt_f64, Cx};
use crate::residual::Residual;
use crate::rmatrix::{dybe_residual, ice_residual, r_matrix, unitarity_residual};
use crate::sampling::Sampler;
use crate::yb_algebra::{cbb_residual, commutation_residuals, nilpotency_norm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Dybe,
    Ice,
    Unitarity,
    Hexagon,
    Commut,
    Cbb,
    Nilpotency,
    Functional,
    Zeroes,
    Symmetry,
    Degree,
    Asymptotic,
    Ode,
    Contour,
}

impl Suite {
    pub const ALL: [Suite; 14] = [
        Suite::Dybe,
        Suite::Ice,
        Suite::Unitarity,
        Suite::Hexagon,
        Suite::Commut,
        Suite::Cbb,
        Suite::Nilpotency,
        Suite::Functional,
        Suite::Zeroes,
        Suite::Symmetry,
        Suite::Degree,
        Suite::Asymptotic,
        Suite::Ode,
        Suite::Contour,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Dybe => "dybe",
            Suite::Ice => "ice",
            Suite::Unitarity => "unitarity",
            Suite::Hexagon => "hexagon",
            Suite::Commut => "commut",
            Suite::Cbb => "cbb",
            Suite::Nilpotency => "nilpotency",
            Suite::Functional => "functional",
            Suite::Zeroes => "zeroes",
            Suite::Symmetry => "symmetry",
            Suite::Degree => "degree",
            Suite::Asymptotic => "asymptotic",
            Suite::Ode => "ode",
            Suite::Contour => "contour",
        }
    }

    pub fn parse(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }
}

pub const TOL_DYBE: f64 = 1e-12;
pub const TOL_ICE: f64 = 1e-14;
pub const TOL_UNITARITY: f64 = 1e-13;
pub const TOL_HEXAGON: f64 = 1e-12;
pub const TOL_COMMUT: f64 = 1e-11;
pub const TOL_CBB: f64 = 1e-10;
pub const TOL_NILPOTENCY: f64 = 1e-11;
pub const TOL_FUNCTIONAL: f64 = 1e-9;
pub const TOL_ZEROES: f64 = 1e-9;
pub const TOL_SYMMETRY: f64 = 1e-11;
pub const TOL_ASYMPTOTIC: f64 = 1e-8;
pub const TOL_THETA: f64 = 1e-8;
pub const TOL_ODE: f64 = 1e-12;
pub const TOL_QUADRATURE: f64 = 1e-8;
/// Largest allowed error ratio between successive node doublings.
pub const TOL_DOUBLING: f64 = 0.5;
/// Doubling ratios are only taken while the error exceeds this, a decade
/// below the convergence tolerance and clear of roundoff.
pub const DOUBLING_FLOOR: f64 = 1e-11;
/// Doubling ratios are checked from this node count on.
pub const DOUBLING_FROM: usize = 32;
pub const THETA_LARGE: (f64, f64) = (30.0, 35.0);

/// Inputs of one draw, enough to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrawParams {
    pub gamma: Cx,
    pub theta: Cx,
    pub mu: Vec<Cx>,
    /// Spectral arguments in the order the check consumes them.
    pub lambda: Vec<Cx>,
}

impl DrawParams {
    fn new(gamma: C64, theta: C64, mu: &[C64], lambda: &[C64]) -> Self {
        DrawParams {
            gamma: gamma.into(),
            theta: theta.into(),
            mu: mu.iter().map(|&m| m.into()).collect(),
            lambda: lambda.iter().map(|&l| l.into()).collect(),
        }
    }

    fn of(params: &ModelParams, lambda: &[C64]) -> Self {
        Self::new(params.gamma, params.theta, &params.mu, lambda)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrawRow {
    pub draw: usize,
    pub case: String,
    /// Relative residual (or the probed quantity for exact checks).
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Present when the check itself failed numerically.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub params: DrawParams,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub draws: usize,
    pub rows: Vec<DrawRow>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &DrawRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn worst(&self) -> f64 {
        self.rows.iter().map(|r| r.residual / r.threshold).fold(0.0, f64::max)
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "suite {}  seed {}  draws {}", self.suite.name(), self.seed, self.draws);
        let _ = writeln!(out, "{:>5} {:<28} {:>24} {:>24}  result", "draw", "case", "residual", "threshold");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>5} {:<28} {:>24} {:>24}  {}",
                r.draw,
                r.case,
                fmt_f64(r.residual),
                fmt_f64(r.threshold),
                if r.pass { "pass" } else { "FAIL" }
            );
            if !r.pass {
                if let Some(e) = &r.error {
                    let _ = writeln!(out, "      error: {e}");
                }
                let json = serde_json::to_string(&r.params).unwrap_or_default();
                let _ = writeln!(out, "      params: {json}");
            }
        }
        let failed = self.failures().count();
        let _ = writeln!(
            out,
            "{}: {} of {} checks passed",
            if self.pass { "PASS" } else { "FAIL" },
            self.rows.len() - failed,
            self.rows.len()
        );
        out
    }
}

struct Rows {
    rows: Vec<DrawRow>,
}

impl Rows {
    fn push(&mut self, draw: usize, case: impl Into<String>, residual: f64, threshold: f64, params: DrawParams) {
        self.rows.push(DrawRow {
            draw,
            case: case.into(),
            residual,
            threshold,
            pass: residual < threshold,
            error: None,
            params,
        });
    }

    fn residual(&mut self, draw: usize, case: impl Into<String>, r: Residual, threshold: f64, params: DrawParams) {
        let rel = r.relative();
        // NaN must fail
        let rel = if rel.is_nan() { f64::INFINITY } else { rel };
        self.push(draw, case, rel, threshold, params);
    }

    fn failed(&mut self, draw: usize, case: impl Into<String>, threshold: f64, err: &SosError, params: DrawParams) {
        self.rows.push(DrawRow {
            draw,
            case: case.into(),
            residual: f64::INFINITY,
            threshold,
            pass: false,
            error: Some(err.to_string()),
            params,
        });
    }
}

/// γ, θ and μ passing the lattice guards for `size` sites.
fn model(s: &mut Sampler, size: usize) -> Result<ModelParams> {
    s.until(|s| {
        let p = s.raw_params(size);
        validate(&p, &p.mu, Route::Face)?;
        Ok(p)
    })
}

fn cycle<T: Copy>(items: &[T], draw: usize) -> T {
    items[draw % items.len()]
}

/// Runs `draws` seeded draws of one suite.
pub fn run_suite(suite: Suite, seed: u64, draws: usize) -> Result<SuiteReport> {
    if draws == 0 {
        return Err(SosError::InvalidArgument("draw count must be positive".into()));
    }
    let mut s = Sampler::new(seed);
    let mut rows = Rows { rows: Vec::new() };
    for d in 0..draws {
        draw_once(suite, d, &mut s, &mut rows)?;
    }
    let pass = rows.rows.iter().all(|r| r.pass);
    Ok(SuiteReport { suite, seed, draws, rows: rows.rows, pass })
}

/// Accepts a draw unless it fails a guard; numerical failures become
/// failing rows.
fn checked<T>(
    s: &mut Sampler,
    rows: &mut Rows,
    draw: usize,
    case: &str,
    threshold: f64,
    mut f: impl FnMut(&mut Sampler) -> std::result::Result<T, (SosError, DrawParams)>,
) -> Result<Option<T>> {
    let mut failure = None;
    let out = s.until(|s| match f(s) {
        Ok(v) => Ok(Some(v)),
        Err((e, _)) if e.is_validation() => Err(e),
        Err((e, p)) => {
            failure = Some((e, p));
            Ok(None)
        }
    })?;
    if let Some((e, p)) = failure.take() {
        rows.failed(draw, case, threshold, &e, p);
    }
    Ok(out)
}

fn tag<T>(r: Result<T>, params: &DrawParams) -> std::result::Result<T, (SosError, DrawParams)> {
    r.map_err(|e| (e, params.clone()))
}

fn draw_once(suite: Suite, d: usize, s: &mut Sampler, rows: &mut Rows) -> Result<()> {
    match suite {
        Suite::Dybe => {
            let got = checked(s, rows, d, "dybe", TOL_DYBE, |s| {
                let (g, th) = (s.complex(), s.complex());
                let l = s.complexes(3);
                let p = DrawParams::new(g, th, &[], &l);
                let r = tag(dybe_residual(l[0], l[1], l[2], th, g), &p)?;
                Ok((r, p))
            })?;
            if let Some((r, p)) = got {
                rows.residual(d, "dybe", r, TOL_DYBE, p);
            }
        }
        Suite::Ice | Suite::Unitarity => {
            let (case, tol) = if suite == Suite::Ice { ("ice", TOL_ICE) } else { ("unitarity", TOL_UNITARITY) };
            let got = checked(s, rows, d, case, tol, |s| {
                let (g, th, l) = (s.complex(), s.complex(), s.complex());
                let p = DrawParams::new(g, th, &[], &[l]);
                let r = if suite == Suite::Ice {
                    ice_residual(&tag(r_matrix(l, th, g), &p)?)
                } else {
                    tag(unitarity_residual(l, th, g), &p)?
                };
                Ok((r, p))
            })?;
            if let Some((r, p)) = got {
                rows.residual(d, case, r, tol, p);
            }
        }
        Suite::Hexagon => {
            let rings = admissible_rings();
            let ring = rings[s.index(rings.len())];
            let case = format!("ring {ring:?}");
            let got = checked(s, rows, d, &case, TOL_HEXAGON, |s| {
                let m = model(s, 1).map_err(|e| (e, empty()))?;
                let (u, v) = (s.complex(), s.complex());
                let p = DrawParams::of(&m, &[u, v]);
                let r = tag(hexagon_residual(u, v, ring, &m), &p)?;
                Ok((r, p))
            })?;
            if let Some((r, p)) = got {
                rows.residual(d, case, r, TOL_HEXAGON, p);
            }
        }
        Suite::Commut => {
            let size = cycle(&[2, 3], d);
            let case = format!("L={size}");
            let got = checked(s, rows, d, &case, TOL_COMMUT, |s| {
                let m = model(s, size).map_err(|e| (e, empty()))?;
                let l = s.complexes(2);
                let p = DrawParams::of(&m, &l);
                let r = tag(commutation_residuals(l[0], l[1], m.theta, &m), &p)?;
                Ok((r, p))
            })?;
            if let Some((r, p)) = got {
                for (name, res) in r.named() {
                    rows.residual(d, format!("{case} {name}"), res, TOL_COMMUT, p.clone());
                }
            }
        }
        Suite::Cbb => {
            let (n, size) = cycle(&[(1, 2), (2, 2), (2, 3), (3, 3)], d);
            let case = format!("n={n} L={size}");
            let got = checked(s, rows, d, &case, TOL_CBB, |s| {
                let m = model(s, size).map_err(|e| (e, empty()))?;
                let l = s.complexes(n + 1);
                let p = DrawParams::of(&m, &l);
                let r = tag(cbb_residual(&l, m.theta, &m), &p)?;
                Ok((r, p))
            })?;
            if let Some((r, p)) = got {
                rows.residual(d, case, r, TOL_CBB, p);
            }
        }
        Suite::Nilpotency => {
            let size = cycle(&[1, 2, 3, 4], d);
            let case = format!("L={size}");
            let got = checked(s, rows, d, &case, TOL_NILPOTENCY, |s| {
                let m = model(s, size).map_err(|e| (e, empty()))?;
                let l = s.complexes(size + 1);
                let p = DrawParams::of(&m, &l);
                let r = tag(nilpotency_norm(&m, &l), &p)?;
                Ok((r, p))
            })?;
            if let Some((r, p)) = got {
                rows.push(d, format!("{case} annihilation"), r.ratio, TOL_NILPOTENCY, p.clone());
                rows.push(d, format!("{case} charge"), r.charge_leak, TOL_NILPOTENCY, p);
            }
        }
        Suite::Functional => {
            let size = cycle(&[1, 2, 3, 4], d);
            let got = checked(s, rows, d, &format!("L={size}"), TOL_FUNCTIONAL, |s| {
                let (m, l) = s.draw_with(size, size + 2, Route::Functional, |_, _| true).map_err(|e| (e, empty()))?;
                let p = DrawParams::of(&m, &l);
                let perm = tag(functional_equation_residual(&m, &l, &partition_permutation_sum), &p)?;
                let face = if size <= 3 {
                    Some(tag(functional_equation_residual(&m, &l, &enumerate_partition), &p)?)
                } else {
                    None
                };
                Ok((perm, face, p))
            })?;
            if let Some((perm, face, p)) = got {
                rows.residual(d, format!("L={size} permutation"), perm, TOL_FUNCTIONAL, p.clone());
                if let Some(face) = face {
                    rows.residual(d, format!("L={size} face"), face, TOL_FUNCTIONAL, p);
                }
            }
        }
        Suite::Zeroes => {
            let size = cycle(&[2, 3, 4], d);
            let case = format!("L={size}");
            let got = checked(s, rows, d, &case, TOL_ZEROES, |s| {
                let m = model(s, size).map_err(|e| (e, empty()))?;
                let free = s.complexes(size - 2);
                let p = DrawParams::of(&m, &free);
                let r = tag(special_zero_residual(&m, &free, &partition_permutation_sum), &p)?;
                Ok((r, p))
            })?;
            if let Some((r, p)) = got {
                rows.residual(d, case, r, TOL_ZEROES, p);
            }
        }
        Suite::Symmetry => {
            let size = cycle(&[2, 3, 4], d);
            let i = s.index(size);
            let j = (i + 1 + s.index(size - 1)) % size;
            let case = format!("L={size} ({},{})", i.min(j) + 1, i.max(j) + 1);
            let got = checked(s, rows, d, &case, TOL_SYMMETRY, |s| {
                let (m, l) = s.draw(size).map_err(|e| (e, empty()))?;
                let p = DrawParams::of(&m, &l);
                let lam = tag(symmetry_residual(&m, &l, i, j, &enumerate_partition), &p)?;
                let mu = tag(mu_symmetry_residual(&m, &l, i, j, &enumerate_partition), &p)?;
                Ok((lam, mu, p))
            })?;
            if let Some((lam, mu, p)) = got {
                rows.residual(d, format!("{case} lambda"), lam, TOL_SYMMETRY, p.clone());
                rows.residual(d, format!("{case} mu"), mu, TOL_SYMMETRY, p);
            }
        }
        Suite::Degree => {
            let size = cycle(&[1, 2, 3, 4], d);
            let case = format!("L={size}");
            let got = checked(s, rows, d, &case, 0.5, |s| {
                let (m, l) = s.draw(size).map_err(|e| (e, empty()))?;
                let p = DrawParams::of(&m, &l);
                let degrees =
                    (0..size).map(|k| degree_probe(&m, &l, k, &partition_permutation_sum)).collect::<Result<Vec<_>>>();
                Ok((tag(degrees, &p)?, p))
            })?;
            if let Some((degrees, p)) = got {
                for (k, deg) in degrees.into_iter().enumerate() {
                    // exact: the probed degree must equal L
                    let miss = (deg as f64 - size as f64).abs();
                    rows.push(d, format!("{case} x_{} degree {deg}", k + 1), miss, 0.5, p.clone());
                }
            }
        }
        Suite::Asymptotic => {
            let size = cycle(&[1, 2, 3], d);
            let case = format!("L={size}");
            let got = checked(s, rows, d, &case, TOL_ASYMPTOTIC, |s| {
                let (m, l) = s.draw(size).map_err(|e| (e, empty()))?;
                let p = DrawParams::of(&m, &l);
                let expect = tag(asymptotic_leading_coefficient(&m), &p)?;
                let got = tag(interpolated_leading_coefficient(&m, &l, &partition_permutation_sum), &p)?;
                let (ta, tb) = THETA_LARGE;
                let stab = tag(theta_stabilization(&m, &l, ta, tb, &partition_permutation_sum), &p)?;
                Ok((Residual::new((got - expect).norm(), expect.norm()), stab, p))
            })?;
            if let Some((lead, stab, p)) = got {
                rows.residual(d, format!("{case} leading"), lead, TOL_ASYMPTOTIC, p.clone());
                rows.residual(d, format!("{case} theta 30 vs 35"), stab, TOL_THETA, p);
            }
        }
        Suite::Ode => {
            let got = checked(s, rows, d, "L=1", TOL_ODE, |s| {
                let m = model(s, 1).map_err(|e| (e, empty()))?;
                let l = s.complex();
                let p = DrawParams::of(&m, &[l]);
                let r = tag(ode_residual_l1((l * 2.0).exp(), &m), &p)?;
                Ok((r, p))
            })?;
            if let Some((r, p)) = got {
                rows.residual(d, "L=1", r, TOL_ODE, p);
            }
        }
        Suite::Contour => {
            let size = cycle(&[1, 2, 3], d);
            let case = format!("L={size}");
            let got = checked(s, rows, d, &case, TOL_QUADRATURE, |s| {
                let (m, l) = s.draw(size).map_err(|e| (e, empty()))?;
                let p = DrawParams::of(&m, &l);
                // draws without an admissible automatic contour are redrawn
                let spec = tag(ContourSpec::auto(&l), &p)?;
                let residue = tag(partition_residue(&m, &l), &p)?;
                let quad = tag(partition_quadrature_auto(&m, &l), &p)?;
                let ratio = tag(doubling_ratio(&m, &l, spec, residue), &p)?;
                Ok((Residual::new((quad.value - residue).norm(), residue.norm()), ratio, p))
            })?;
            if let Some((agree, ratio, p)) = got {
                rows.residual(d, format!("{case} vs residue"), agree, TOL_QUADRATURE, p.clone());
                rows.push(d, format!("{case} doubling ratio"), ratio, TOL_DOUBLING, p);
            }
        }
    }
    Ok(())
}

fn empty() -> DrawParams {
    DrawParams::new(C64::default(), C64::default(), &[], &[])
}

/// Largest `e_{2N} / e_N` over `N ≥ 32` with `e_N` above the floor, where
/// `e_N` is the relative quadrature error against the residue value.
pub fn doubling_ratio(params: &ModelParams, lambdas: &[C64], spec: ContourSpec, exact: C64) -> Result<f64> {
    let err = |nodes: usize| -> Result<f64> {
        let q = quadrature_fixed(params, lambdas, &ContourSpec { nodes, ..spec })?;
        Ok((q - exact).norm() / exact.norm())
    };
    let mut worst = 0.0f64;
    let mut nodes = DOUBLING_FROM;
    let mut e = err(nodes)?;
    while e > DOUBLING_FLOOR && nodes * 2 <= MAX_NODES {
        let next = err(nodes * 2)?;
        worst = worst.max(next / e);
        nodes *= 2;
        e = next;
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for suite in Suite::ALL {
            assert_eq!(Suite::parse(suite.name()), Some(suite));
        }
        assert_eq!(Suite::parse("yb"), None);
    }

    #[test]
    fn cheap_suites_pass() {
        for suite in [Suite::Dybe, Suite::Ice, Suite::Unitarity, Suite::Hexagon, Suite::Ode] {
            let rep = run_suite(suite, 42, 10).unwrap();
            assert!(rep.pass, "{}", rep.to_table());
            assert_eq!(rep.rows.len(), 10);
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let a = run_suite(Suite::Cbb, 9, 4).unwrap();
        let b = run_suite(Suite::Cbb, 9, 4).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.pass, "{}", a.to_table());
    }

    #[test]
    fn failing_rows_print_params() {
        let mut rows = Rows { rows: Vec::new() };
        rows.push(0, "x", 1.0, 0.5, empty());
        let rep = SuiteReport { suite: Suite::Ice, seed: 0, draws: 1, pass: false, rows: rows.rows };
        assert!(rep.to_table().contains("params: {\"gamma\""));
    }

    #[test]
    fn zero_draws_rejected() {
        assert!(run_suite(Suite::Ice, 1, 0).is_err());
    }
}
