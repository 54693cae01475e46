//! Wall-time scaling of the partition routes.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::contour::{partition_quadrature, quadrature_fixed, ContourSpec};
use crate::error::{Result, SosError};
use crate::face_model::configuration_count;
use crate::params::{Route, C64};
use crate::sampling::Sampler;
use crate::{partition, route_cap};

pub const CSV_HEADER: &str = "route,L,nodes_or_terms,wall_ms,value_re,value_im";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub route: Route,
    #[serde(rename = "L")]
    pub size: usize,
    /// Configurations, basis states, permutations or quadrature nodes.
    pub nodes_or_terms: usize,
    pub wall_ms: f64,
    pub value: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchPlan {
    pub lmin: usize,
    pub lmax: usize,
    pub routes: Vec<Route>,
    pub seed: u64,
    /// Fixed node count for quadrature; `None` uses adaptive doubling.
    pub nodes: Option<usize>,
}

impl BenchPlan {
    pub fn check(&self) -> Result<()> {
        if self.lmin == 0 || self.lmin > self.lmax {
            return Err(SosError::InvalidArgument(format!("invalid L range {}..={}", self.lmin, self.lmax)));
        }
        if self.routes.is_empty() {
            return Err(SosError::InvalidArgument("routes must not be empty".into()));
        }
        for &route in &self.routes {
            if route == Route::Functional {
                return Err(SosError::InvalidArgument("functional is not a partition route".into()));
            }
            let max = route_cap(route);
            if self.lmax > max {
                return Err(SosError::TooLarge { route: route.name(), size: self.lmax, max });
            }
        }
        if self.nodes == Some(0) {
            return Err(SosError::InvalidArgument("node count must be positive".into()));
        }
        Ok(())
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// One timed evaluation per route and L, on a seeded draw per L shared by
/// all routes.
pub fn run(plan: &BenchPlan) -> Result<Vec<BenchRow>> {
    plan.check()?;
    let mut sampler = Sampler::new(plan.seed);
    let mut rows = Vec::new();
    for size in plan.lmin..=plan.lmax {
        let needs_contour = plan.routes.contains(&Route::Quadrature);
        let (params, lambdas) = sampler.draw_with(size, size, Route::Permutation, |_, l| {
            !needs_contour || ContourSpec::auto(l).is_ok()
        })?;
        for &route in &plan.routes {
            let start = Instant::now();
            let (value, count) = match (route, plan.nodes) {
                (Route::Quadrature, Some(nodes)) => {
                    let spec = ContourSpec { nodes, ..ContourSpec::auto(&lambdas)? };
                    (quadrature_fixed(&params, &lambdas, &spec)?, nodes)
                }
                (Route::Quadrature, None) => {
                    let q = partition_quadrature(&params, &lambdas, &ContourSpec::auto(&lambdas)?)?;
                    (q.value, q.nodes)
                }
                (Route::Face, _) => (partition(route, &params, &lambdas)?, configuration_count(size)),
                (Route::Algebra, _) => (partition(route, &params, &lambdas)?, 1 << size),
                _ => (partition(route, &params, &lambdas)?, factorial(size)),
            };
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            rows.push(BenchRow { route, size, nodes_or_terms: count, wall_ms, value });
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[BenchRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{:.6},{:.16e},{:.16e}",
            r.route.name(),
            r.size,
            r.nodes_or_terms,
            r.wall_ms,
            r.value.re,
            r.value.im
        )?;
    }
    Ok(())
}
