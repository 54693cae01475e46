//! Job configuration and the multi-route comparison report.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::contour::partition_quadrature_auto;
use crate::error::{Result, SosError};
use crate::params::{validate, ModelParams, Route, C64};
use crate::{partition, route_cap};

/// Complex number as `{"re": …, "im": …}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for Cx {
    fn from(z: C64) -> Self {
        Cx { re: z.re, im: z.im }
    }
}

impl From<Cx> for C64 {
    fn from(z: Cx) -> Self {
        C64::new(z.re, z.im)
    }
}

/// Float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_c64(z: C64) -> String {
    format!("{} {} i", fmt_f64(z.re), if z.im.is_sign_negative() { format!("- {}", fmt_f64(-z.im)) } else { format!("+ {}", fmt_f64(z.im)) })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Pairwise relative agreement required between routes.
    pub agreement: Option<f64>,
}

pub const DEFAULT_AGREEMENT: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(rename = "L")]
    pub size: usize,
    pub gamma: Cx,
    pub theta: Cx,
    pub mu: Vec<Cx>,
    pub lambda: Vec<Cx>,
    pub routes: Vec<Route>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| SosError::InvalidArgument(format!("config: {e}")))
    }

    /// Structural checks plus the parameter guards of every requested route.
    pub fn validate(&self) -> Result<(ModelParams, Vec<C64>)> {
        if self.size == 0 {
            return Err(SosError::EmptyLattice);
        }
        if self.mu.len() != self.size {
            return Err(SosError::BadLength { expected: self.size, found: self.mu.len() });
        }
        if self.lambda.len() != self.size {
            return Err(SosError::BadLength { expected: self.size, found: self.lambda.len() });
        }
        if self.routes.is_empty() {
            return Err(SosError::InvalidArgument("routes must not be empty".into()));
        }
        if self.routes.contains(&Route::Functional) {
            return Err(SosError::InvalidArgument("functional is not a partition route".into()));
        }
        let params = ModelParams::new(self.gamma.into(), self.theta.into(), self.mu.iter().map(|&m| m.into()).collect())?;
        let lambdas: Vec<C64> = self.lambda.iter().map(|&l| l.into()).collect();
        for &route in &self.routes {
            validate(&params, &lambdas, route)?;
            let max = route_cap(route);
            if self.size > max {
                return Err(SosError::TooLarge { route: route.name(), size: self.size, max });
            }
        }
        Ok((params, lambdas))
    }

    pub fn agreement(&self) -> f64 {
        self.tolerances.as_ref().and_then(|t| t.agreement).unwrap_or(DEFAULT_AGREEMENT)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteValue {
    pub route: Route,
    pub value: Cx,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    pub a: Route,
    pub b: Route,
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodReport {
    #[serde(rename = "L")]
    pub size: usize,
    pub values: Vec<RouteValue>,
    /// Every unordered pair, in declaration order.
    pub deviations: Vec<Deviation>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub agree: bool,
    /// B-string offsets used by the algebra route.
    pub convention: &'static str,
    /// Algebra / face ratio, when both ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebra_face_ratio: Option<Cx>,
}

fn rel_dev(a: C64, b: C64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Runs every requested route in declaration order.
pub fn compute(config: &JobConfig, timings: bool) -> Result<MethodReport> {
    let (params, lambdas) = config.validate()?;
    let mut values = Vec::with_capacity(config.routes.len());
    for &route in &config.routes {
        let start = Instant::now();
        let (value, nodes) = if route == Route::Quadrature {
            let q = partition_quadrature_auto(&params, &lambdas)?;
            (q.value, Some(q.nodes))
        } else {
            (partition(route, &params, &lambdas)?, None)
        };
        let wall_ms = timings.then(|| start.elapsed().as_secs_f64() * 1e3);
        values.push((route, value, wall_ms, nodes));
    }
    let mut deviations = Vec::new();
    for a in 0..values.len() {
        for b in (a + 1)..values.len() {
            deviations.push(Deviation { a: values[a].0, b: values[b].0, relative: rel_dev(values[a].1, values[b].1) });
        }
    }
    let max_deviation = deviations.iter().map(|d| d.relative).fold(0.0, f64::max);
    let find = |r: Route| values.iter().find(|v| v.0 == r).map(|v| v.1);
    let algebra_face_ratio = match (find(Route::Algebra), find(Route::Face)) {
        (Some(a), Some(f)) => Some(Cx::from(a / f)),
        _ => None,
    };
    let tolerance = config.agreement();
    Ok(MethodReport {
        size: params.size(),
        values: values
            .into_iter()
            .map(|(route, v, wall_ms, nodes)| RouteValue { route, value: v.into(), wall_ms, nodes })
            .collect(),
        deviations,
        max_deviation,
        tolerance,
        agree: max_deviation <= tolerance,
        convention: "g_j = j",
        algebra_face_ratio,
    })
}

impl MethodReport {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "L = {}   (B-string offsets {})", self.size, self.convention);
        let _ = writeln!(out, "{:<12} {:>50} {:>12}", "route", "Z", "wall_ms");
        for v in &self.values {
            let ms = v.wall_ms.map_or_else(|| "-".to_string(), |m| format!("{m:.3}"));
            let _ = writeln!(out, "{:<12} {:>50} {:>12}", v.route.name(), fmt_c64(v.value.into()), ms);
        }
        if !self.deviations.is_empty() {
            let _ = writeln!(out, "pairwise relative deviations:");
            for d in &self.deviations {
                let _ = writeln!(out, "  {:<12} {:<12} {}", d.a.name(), d.b.name(), fmt_f64(d.relative));
            }
        }
        if let Some(r) = self.algebra_face_ratio {
            let _ = writeln!(out, "algebra/face ratio: {}", fmt_c64(r.into()));
        }
        let _ = writeln!(
            out,
            "max deviation {} (tolerance {}): {}",
            fmt_f64(self.max_deviation),
            fmt_f64(self.tolerance),
            if self.agree { "agree" } else { "DISAGREE" }
        );
        out
    }
}

/// Machine-readable error object.
pub fn error_json(err: &SosError) -> serde_json::Value {
    serde_json::json!({ "error": { "kind": err.kind(), "message": err.to_string() } })
}
