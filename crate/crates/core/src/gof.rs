//! Goodness of fit through the compensator time change.
//!
//! Under the correct model the transformed times `σ_ij = Λ_i(τ_ij)` form
//! independent unit-rate Poisson processes, so their interarrivals are
//! unit-exponential.

use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::{Error, Result};
use crate::events::EventStream;
use crate::kernel::LinkKernel;
use crate::model::{check_dims, IntensityModel};

/// Transformed event times, one strictly increasing sequence per component.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualStream {
    pub residuals: Vec<Vec<f64>>,
    /// Fraction of `∫|λ_i|` removed by clamping negative intensities at zero.
    pub clamped_fraction: Vec<f64>,
}

impl ResidualStream {
    pub fn interarrivals(&self, i: usize) -> Vec<f64> {
        self.residuals[i].windows(2).map(|w| w[1] - w[0]).collect()
    }
}

fn row_needs_clamp<M: IntensityModel + ?Sized>(model: &M, i: usize) -> bool {
    model.baseline(i) < 0.0 || (0..model.dim()).any(|j| !model.kernel(i, j).is_nonnegative())
}

/// `Λ_i(q)` for each sorted `q` in `times`, plus the clamped-mass fraction.
fn compensator_at<M: IntensityModel + ?Sized>(
    model: &M,
    stream: &EventStream,
    i: usize,
    times: &[f64],
) -> Result<(Vec<f64>, f64)> {
    if row_needs_clamp(model, i) {
        return clamped_sweep(model, stream, i, times);
    }
    let base = model.baseline(i);
    let mut out: Vec<f64> = times.iter().map(|q| base * q).collect();
    for j in 0..model.dim() {
        let events = &stream.components()[j];
        match model.kernel(i, j) {
            LinkKernel::Zero => {}
            LinkKernel::Exponential { alpha, beta } => {
                if *alpha == 0.0 {
                    continue;
                }
                // decayed = Σ_{τ<q} e^{−β(q−τ)}, advanced query by query.
                let mut decayed = 0.0;
                let mut last = 0.0;
                let mut next = 0usize;
                for (slot, &q) in out.iter_mut().zip(times) {
                    decayed *= (-beta * (q - last)).exp();
                    while next < events.len() && events[next] < q {
                        decayed += (-beta * (q - events[next])).exp();
                        next += 1;
                    }
                    last = q;
                    *slot += alpha / beta * (next as f64 - decayed);
                }
            }
            kernel @ LinkKernel::StepFunction { .. } => {
                let support = kernel.support_end().unwrap_or(0.0);
                let full = kernel.integral();
                for (slot, &q) in out.iter_mut().zip(times) {
                    let end = events.partition_point(|&s| s < q);
                    let old = events[..end].partition_point(|&s| s <= q - support);
                    let window: f64 = events[old..end].iter().map(|&s| kernel.cumulative(q - s)).sum();
                    *slot += old as f64 * full + window;
                }
            }
        }
    }
    Ok((out, 0.0))
}

/// Piecewise-constant intensity integrated with `λ ↦ max(λ, 0)`. Needs every
/// kernel in row `i` to be zero or a step function.
fn clamped_sweep<M: IntensityModel + ?Sized>(
    model: &M,
    stream: &EventStream,
    i: usize,
    times: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let horizon_q = times.last().copied().unwrap_or(0.0);
    let mut changes: Vec<(f64, f64)> = Vec::new();
    for j in 0..model.dim() {
        match model.kernel(i, j) {
            LinkKernel::Zero => {}
            LinkKernel::StepFunction { h, values } => {
                if values.is_empty() {
                    continue;
                }
                for &tau in &stream.components()[j] {
                    if tau >= horizon_q {
                        break;
                    }
                    changes.push((tau, values[0]));
                    for m in 1..values.len() {
                        changes.push((tau + m as f64 * h, values[m] - values[m - 1]));
                    }
                    changes.push((tau + values.len() as f64 * h, -values[values.len() - 1]));
                }
            }
            LinkKernel::Exponential { .. } => {
                return Err(Error::InvalidParameter(format!(
                    "row {} mixes exponential kernels with negative intensity; clamping needs step kernels",
                    i + 1
                )))
            }
        }
    }
    changes.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut acc = ClampedIntegral { lam: model.baseline(i), at: 0.0, positive: 0.0, negative: 0.0 };
    let mut next = 0usize;
    let mut out = Vec::with_capacity(times.len());
    for &q in times {
        while next < changes.len() && changes[next].0 < q {
            acc.advance(changes[next].0);
            acc.lam += changes[next].1;
            next += 1;
        }
        acc.advance(q);
        out.push(acc.positive);
    }
    let total = acc.positive + acc.negative;
    let fraction = if total > 0.0 { acc.negative / total } else { 0.0 };
    Ok((out, fraction))
}

struct ClampedIntegral {
    lam: f64,
    at: f64,
    positive: f64,
    negative: f64,
}

impl ClampedIntegral {
    fn advance(&mut self, to: f64) {
        let dt = to - self.at;
        if dt > 0.0 {
            if self.lam > 0.0 {
                self.positive += self.lam * dt;
            } else {
                self.negative -= self.lam * dt;
            }
        }
        self.at = to;
    }
}

/// `Λ_i(t) = ∫₀^t max(λ_i(s), 0) ds`.
pub fn compensator<M: IntensityModel + ?Sized>(
    model: &M,
    stream: &EventStream,
    i: usize,
    t: f64,
) -> Result<f64> {
    check_dims(model, stream)?;
    let d = model.dim();
    if i >= d {
        return Err(Error::ComponentOutOfRange { index: i, d });
    }
    if !(t >= 0.0 && t <= stream.horizon()) {
        return Err(Error::TimeOutOfRange { t, horizon: stream.horizon() });
    }
    Ok(compensator_at(model, stream, i, &[t])?.0[0])
}

/// `σ_ij = Λ_i(τ_ij)` for every event.
pub fn residual_transform<M: IntensityModel + ?Sized>(model: &M, stream: &EventStream) -> Result<ResidualStream> {
    check_dims(model, stream)?;
    let mut residuals = Vec::with_capacity(stream.dim());
    let mut clamped_fraction = Vec::with_capacity(stream.dim());
    for (i, events) in stream.components().iter().enumerate() {
        let (sigma, fraction) = compensator_at(model, stream, i, events)?;
        if let Some(n) = (1..sigma.len()).find(|&n| sigma[n] <= sigma[n - 1]) {
            return Err(Error::NonMonotoneCompensator { component: i, index: n });
        }
        residuals.push(sigma);
        clamped_fraction.push(fraction);
    }
    Ok(ResidualStream { residuals, clamped_fraction })
}

/// One row of a quantile plot.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantilePoint {
    pub p: f64,
    pub empirical: f64,
    pub theoretical: f64,
    pub band_lo: f64,
    pub band_hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentQuantiles {
    pub component: usize,
    pub points: Vec<QuantilePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantileReport {
    pub components: Vec<ComponentQuantiles>,
}

impl QuantileReport {
    /// CSV with header `component,p,empirical,theoretical,band_lo,band_hi`;
    /// components are 1-based.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("component,p,empirical,theoretical,band_lo,band_hi\n");
        for c in &self.components {
            for q in &c.points {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    c.component + 1,
                    q.p,
                    q.empirical,
                    q.theoretical,
                    q.band_lo,
                    q.band_hi
                ));
            }
        }
        out
    }
}

fn exp_quantile(p: f64) -> f64 {
    -(-p).ln_1p()
}

/// Interpolated sample quantile with plotting positions `(j − ½)/n`.
fn sample_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let pos = (n as f64 * p + 0.5).clamp(1.0, n as f64);
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if lo >= n {
        sorted[n - 1]
    } else {
        sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1])
    }
}

fn require_events(res: &ResidualStream, i: usize) -> Result<Vec<f64>> {
    let d = res.residuals.len();
    if i >= d {
        return Err(Error::ComponentOutOfRange { index: i, d });
    }
    let count = res.residuals[i].len();
    if count < 2 {
        return Err(Error::TooFewEvents { component: i, count, required: 2 });
    }
    Ok(res.interarrivals(i))
}

/// Empirical versus unit-exponential quantiles of the interarrivals of
/// component `i` at `p = (j − ½)/m`, with pointwise 95% bands from the beta
/// law of uniform order statistics.
pub fn component_quantiles(res: &ResidualStream, i: usize, m: usize) -> Result<ComponentQuantiles> {
    if m == 0 {
        return Err(Error::InvalidParameter("quantile grid needs at least one point".into()));
    }
    let mut x = require_events(res, i)?;
    x.sort_by(f64::total_cmp);
    let n = x.len();
    let points = (1..=m)
        .map(|j| {
            let p = (j as f64 - 0.5) / m as f64;
            let r = ((n as f64 * p).ceil() as usize).clamp(1, n);
            let beta = Beta::new(r as f64, (n - r + 1) as f64).expect("positive shape parameters");
            QuantilePoint {
                p,
                empirical: sample_quantile(&x, p),
                theoretical: exp_quantile(p),
                band_lo: exp_quantile(beta.inverse_cdf(0.025)),
                band_hi: exp_quantile(beta.inverse_cdf(0.975)),
            }
        })
        .collect();
    Ok(ComponentQuantiles { component: i, points })
}

pub fn quantile_report(res: &ResidualStream, m: usize) -> Result<QuantileReport> {
    let components = (0..res.residuals.len())
        .map(|i| component_quantiles(res, i, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(QuantileReport { components })
}

/// Kolmogorov–Smirnov distance of a sample from the unit exponential.
pub fn ks_distance(sample: &[f64]) -> f64 {
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    x.iter()
        .enumerate()
        .map(|(k, &v)| {
            let f = -(-v.max(0.0)).exp_m1();
            (f - k as f64 / n).max((k + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

pub fn ks_statistic(res: &ResidualStream, i: usize) -> Result<f64> {
    Ok(ks_distance(&require_events(res, i)?))
}

/// Asymptotic Kolmogorov tail probability `P(K > λ)`.
pub fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    /// Number of interarrivals.
    pub n: usize,
    pub statistic: f64,
    /// Asymptotic p-value with the `√n + 0.12 + 0.11/√n` small-sample scaling.
    pub p_value: f64,
    /// `D·√n`, compared against 1.358 at the 5% level.
    pub scaled: f64,
}

impl KsResult {
    pub fn passes(&self, level: f64) -> bool {
        self.p_value >= level
    }
}

pub fn ks_test(res: &ResidualStream, i: usize) -> Result<KsResult> {
    let x = require_events(res, i)?;
    Ok(ks_test_sample(&x))
}

pub fn ks_test_sample(sample: &[f64]) -> KsResult {
    let n = sample.len();
    let statistic = ks_distance(sample);
    let rn = (n as f64).sqrt();
    let p_value = kolmogorov_tail((rn + 0.12 + 0.11 / rn) * statistic);
    KsResult { n, statistic, p_value, scaled: statistic * rn }
}
