//! On-disk formats: model spec JSON, event CSV, estimate JSON and step CSV.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use hawkes_granger::{EventStream, HawkesModel, LinkEstimate, LinkKernel};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::Failure;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum KernelSpec {
    Zero,
    Exponential { alpha: f64, beta: f64 },
    Step { h: f64, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub schema: u32,
    pub nu: Vec<f64>,
    /// `kernels[i][j]` is the effect of component `j` on component `i`.
    pub kernels: Vec<Vec<KernelSpec>>,
}

fn check_schema(found: u32, what: &str) -> Result<(), Failure> {
    if found != SCHEMA {
        return Err(Failure::Usage(format!("{what}: unsupported schema {found}, expected {SCHEMA}")));
    }
    Ok(())
}

impl ModelSpec {
    pub fn parse(text: &str) -> Result<HawkesModel, Failure> {
        let spec: ModelSpec =
            serde_json::from_str(text).map_err(|e| Failure::Usage(format!("model spec: {e}")))?;
        check_schema(spec.schema, "model spec")?;
        let phi = spec
            .kernels
            .iter()
            .map(|row| {
                row.iter()
                    .map(|k| match k {
                        KernelSpec::Zero => Ok(LinkKernel::Zero),
                        KernelSpec::Exponential { alpha, beta } => LinkKernel::exponential(*alpha, *beta),
                        KernelSpec::Step { h, values } => LinkKernel::step(*h, values.clone()),
                    })
                    .collect::<hawkes_granger::Result<Vec<_>>>()
            })
            .collect::<hawkes_granger::Result<Vec<_>>>()
            .map_err(|e| Failure::Usage(format!("model spec: {e}")))?;
        HawkesModel::new(spec.nu, phi).map_err(|e| Failure::Usage(format!("model spec: {e}")))
    }

    #[cfg(test)]
    pub fn from_model(model: &HawkesModel) -> ModelSpec {
        use hawkes_granger::IntensityModel;
        let d = model.dim();
        let kernels = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| match model.kernel(i, j) {
                        LinkKernel::Zero => KernelSpec::Zero,
                        LinkKernel::Exponential { alpha, beta } => {
                            KernelSpec::Exponential { alpha: *alpha, beta: *beta }
                        }
                        LinkKernel::StepFunction { h, values } => KernelSpec::Step { h: *h, values: values.clone() },
                    })
                    .collect()
            })
            .collect();
        ModelSpec { schema: SCHEMA, nu: model.nu().to_vec(), kernels }
    }
}

/// Parsed event table before a horizon is attached.
#[derive(Debug, Clone, PartialEq)]
pub struct EventTable {
    pub events: Vec<Vec<f64>>,
}

impl EventTable {
    /// `component,time` rows with 1-based ids; rows may come in any order.
    /// Components up to `min_dim` exist even without events.
    pub fn parse(text: &str, min_dim: usize) -> Result<EventTable, Failure> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, header)) if header.trim() == "component,time" => {}
            Some((n, header)) => {
                return Err(Failure::Usage(format!(
                    "event file line {}: expected header `component,time`, got {header:?}",
                    n + 1
                )))
            }
            None => return Err(Failure::Usage("event file is empty".into())),
        }
        let mut events: Vec<Vec<f64>> = vec![Vec::new(); min_dim];
        let mut seen = BTreeSet::new();
        for (n, line) in lines {
            let bad = |what: &str| Failure::Usage(format!("event file line {}: {what}: {line:?}", n + 1));
            let (c, t) = line.split_once(',').ok_or_else(|| bad("expected `component,time`"))?;
            let c: usize = c.trim().parse().map_err(|_| bad("component id is not a positive integer"))?;
            if c == 0 {
                return Err(bad("component ids are 1-based"));
            }
            let t: f64 = t.trim().parse().map_err(|_| bad("timestamp is not a decimal number"))?;
            if !(t.is_finite() && t > 0.0) {
                return Err(bad("timestamps must be positive"));
            }
            if !seen.insert((c, t.to_bits())) {
                return Err(bad("duplicate event"));
            }
            if events.len() < c {
                events.resize(c, Vec::new());
            }
            events[c - 1].push(t);
        }
        for e in &mut events {
            e.sort_by(f64::total_cmp);
        }
        Ok(EventTable { events })
    }

    pub fn last_time(&self) -> f64 {
        self.events.iter().flatten().copied().fold(0.0, f64::max)
    }

    pub fn into_stream(self, horizon: f64) -> Result<EventStream, Failure> {
        EventStream::new(horizon, self.events).map_err(|e| Failure::Usage(format!("event file: {e}")))
    }
}

/// Rows sorted by time, ties broken by component.
pub fn write_events(stream: &EventStream) -> String {
    let mut rows: Vec<(f64, usize)> = stream
        .components()
        .iter()
        .enumerate()
        .flat_map(|(i, e)| e.iter().map(move |&t| (t, i)))
        .collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out = String::from("component,time\n");
    for (t, i) in rows {
        writeln!(out, "{},{}", i + 1, t).unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnostics {
    pub condition_estimate: f64,
    pub ridge: f64,
    pub dropped_events: Vec<usize>,
    pub clamped_coefficients: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateFile {
    pub schema: u32,
    pub h: f64,
    pub k: usize,
    pub d: usize,
    #[serde(rename = "T")]
    pub horizon: f64,
    /// Baseline per bin, `ν̂ ≈ ν h`.
    pub nu_hat: Vec<f64>,
    /// Baseline per unit time, `ν̂ / h`.
    pub nu_hat_per_time: Vec<f64>,
    /// `g[u-1][i][j]`: coefficient of `Y_{j, t−u}` in the equation for `Y_{i, t}`.
    pub g: Vec<Vec<Vec<f64>>>,
    pub diagnostics: Diagnostics,
}

impl EstimateFile {
    pub fn from_estimate(est: &LinkEstimate, horizon: f64) -> EstimateFile {
        let d = est.d;
        let g = (1..=est.k)
            .map(|u| (0..d).map(|i| (0..d).map(|j| est.coefficient(u, i, j)).collect()).collect())
            .collect();
        let diag = &est.diagnostics;
        EstimateFile {
            schema: SCHEMA,
            h: est.h,
            k: est.k,
            d,
            horizon,
            nu_hat: est.nu_hat.clone(),
            nu_hat_per_time: est.baseline_rates(),
            g,
            diagnostics: Diagnostics {
                condition_estimate: diag.condition_estimate,
                ridge: diag.ridge,
                dropped_events: diag.dropped_events.clone(),
                clamped_coefficients: diag.clamped_coefficients,
            },
        }
    }

    pub fn parse(text: &str) -> Result<LinkEstimate, Failure> {
        let file: EstimateFile =
            serde_json::from_str(text).map_err(|e| Failure::Usage(format!("estimate file: {e}")))?;
        check_schema(file.schema, "estimate file")?;
        let (d, k) = (file.d, file.k);
        let shape_ok = file.nu_hat.len() == d
            && file.g.len() == k
            && file.g.iter().all(|b| b.len() == d && b.iter().all(|r| r.len() == d));
        if !shape_ok {
            return Err(Failure::Usage(format!("estimate file: coefficient blocks do not match d = {d}, k = {k}")));
        }
        let g = DMatrix::from_fn(d, k * d, |i, c| file.g[c / d][i][c % d]);
        let mut est = LinkEstimate::from_coefficients(file.h, k, g, file.nu_hat)
            .map_err(|e| Failure::Usage(format!("estimate file: {e}")))?;
        est.diagnostics.condition_estimate = file.diagnostics.condition_estimate;
        est.diagnostics.ridge = file.diagnostics.ridge;
        est.diagnostics.dropped_events = file.diagnostics.dropped_events;
        est.diagnostics.clamped_coefficients = file.diagnostics.clamped_coefficients;
        Ok(est)
    }
}

/// `i,j,u_midpoint,phi_hat` rows, 1-based components.
pub fn write_steps(est: &LinkEstimate) -> String {
    let mut out = String::from("i,j,u_midpoint,phi_hat\n");
    for i in 0..est.d {
        for j in 0..est.d {
            for (m, level) in est.levels(i, j).iter().enumerate() {
                writeln!(out, "{},{},{},{}", i + 1, j + 1, (m as f64 + 0.5) * est.h, level).unwrap();
            }
        }
    }
    out
}

/// One header row of component labels and one row of values.
pub fn baseline_table(rates: &[f64]) -> String {
    let cells: Vec<String> = rates.iter().map(|v| v.to_string()).collect();
    let width = cells.iter().map(String::len).max().unwrap_or(1).max(3);
    let header: Vec<String> = (1..=rates.len()).map(|i| format!("{:>width$}", format!("N{i}"))).collect();
    let values: Vec<String> = cells.iter().map(|c| format!("{c:>width$}")).collect();
    format!("{}\n{}\n", header.join("  "), values.join("  "))
}
