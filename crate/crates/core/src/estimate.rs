//! Least-squares estimation of the link functions from binned counts.
//!
//! The counts follow approximately the autoregression
//! `Y_t ≈ ν h + Σ_{u=1}^k g_u Y_{t−u}` with `g_u ≈ h·φ(u h)`. The solution
//! `ĝ = γ̂ Γ̂⁻¹`, `ν̂ = Ȳ − ĝ Ȳ^{(k)}` is turned into the step-function estimate
//! `φ̂(u) = ĝ_{⌊u/h⌋+1} / h` on `[0, kh)`.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::discretize::{build_covariances, BinnedSeries, CovarianceStructure};
use crate::error::{Error, Result};
use crate::kernel::{step_level, LinkKernel};
use crate::model::{HawkesModel, IntensityModel};
use crate::quadrature;

/// Condition estimates above this are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub h: f64,
    pub k: usize,
    /// Added to the diagonal of `Γ̂` before solving.
    pub ridge: f64,
    /// Clamp negative coefficients to zero after solving.
    pub nonneg_projection: bool,
}

impl EstimatorConfig {
    pub fn new(h: f64, k: usize) -> Self {
        EstimatorConfig { h, k, ridge: 0.0, nonneg_projection: false }
    }

    pub fn with_ridge(mut self, ridge: f64) -> Self {
        self.ridge = ridge;
        self
    }

    pub fn with_nonneg_projection(mut self, on: bool) -> Self {
        self.nonneg_projection = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(Error::InvalidParameter(format!("bin width must be > 0, got {}", self.h)));
        }
        if self.k == 0 {
            return Err(Error::InvalidParameter("lag order k must be >= 1".into()));
        }
        if !(self.ridge.is_finite() && self.ridge >= 0.0) {
            return Err(Error::InvalidParameter(format!("ridge must be >= 0, got {}", self.ridge)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FitDiagnostics {
    /// Squared ratio of the extreme Cholesky pivots of `Γ̂ + ridge·I`.
    pub condition_estimate: f64,
    pub ridge: f64,
    /// Events past the last full bin, per component.
    pub dropped_events: Vec<usize>,
    /// Number of coefficients clamped by the nonnegative projection.
    pub clamped_coefficients: usize,
    /// Unprojected `(g, ν̂)` when the projection was applied.
    pub raw: Option<(DMatrix<f64>, Vec<f64>)>,
}

/// Fitted coefficients and the induced step-function kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkEstimate {
    pub h: f64,
    pub k: usize,
    pub d: usize,
    /// `d × kd`; block `u` (columns `(u−1)d..ud`) estimates `h·φ(u h)`.
    pub g: DMatrix<f64>,
    /// Estimated `ν h`, per bin.
    pub nu_hat: Vec<f64>,
    /// Row-major `d × d` step kernels, `φ̂_ij = g_{·}[i, j] / h`.
    phi_hat: Vec<LinkKernel>,
    pub diagnostics: FitDiagnostics,
}

impl LinkEstimate {
    pub fn from_coefficients(h: f64, k: usize, g: DMatrix<f64>, nu_hat: Vec<f64>) -> Result<Self> {
        let d = nu_hat.len();
        if !(h.is_finite() && h > 0.0) || k == 0 || d == 0 {
            return Err(Error::InvalidParameter("estimate needs h > 0, k >= 1, d >= 1".into()));
        }
        if g.nrows() != d || g.ncols() != k * d {
            return Err(Error::InvalidParameter(format!(
                "coefficient block must be {d} x {}, got {} x {}",
                k * d,
                g.nrows(),
                g.ncols()
            )));
        }
        if g.iter().chain(nu_hat.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("estimate contains non-finite values".into()));
        }
        let mut phi_hat = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let values = (0..k).map(|m| g[(i, m * d + j)] / h).collect();
                phi_hat.push(LinkKernel::StepFunction { h, values });
            }
        }
        Ok(LinkEstimate { h, k, d, g, nu_hat, phi_hat, diagnostics: FitDiagnostics::default() })
    }

    /// Entry `(i, j)` of coefficient block `lag ∈ 1..=k`.
    pub fn coefficient(&self, lag: usize, i: usize, j: usize) -> f64 {
        self.g[(i, (lag - 1) * self.d + j)]
    }

    /// Levels of `φ̂_ij`, one per lag bin.
    pub fn levels(&self, i: usize, j: usize) -> &[f64] {
        match &self.phi_hat[i * self.d + j] {
            LinkKernel::StepFunction { values, .. } => values,
            _ => unreachable!("estimates hold step kernels"),
        }
    }

    pub fn phi_hat(&self, i: usize, j: usize) -> &LinkKernel {
        &self.phi_hat[i * self.d + j]
    }

    /// `ν̂ / h`, the baseline in events per unit time.
    pub fn baseline_rates(&self) -> Vec<f64> {
        self.nu_hat.iter().map(|v| v / self.h).collect()
    }
}

impl IntensityModel for LinkEstimate {
    fn dim(&self) -> usize {
        self.d
    }

    fn baseline(&self, i: usize) -> f64 {
        self.nu_hat[i] / self.h
    }

    fn kernel(&self, i: usize, j: usize) -> &LinkKernel {
        &self.phi_hat[i * self.d + j]
    }
}

/// Solve `g (Γ̂ + ridge·I) = γ̂` from precomputed moments.
pub fn solve(cov: &CovarianceStructure, ridge: f64) -> Result<(DMatrix<f64>, Vec<f64>, f64)> {
    let kd = cov.k * cov.d;
    let mut a = cov.big_gamma_hat.clone();
    for r in 0..kd {
        a[(r, r)] += ridge;
    }
    let chol = Cholesky::new(a).ok_or(Error::SingularCovariance { condition: f64::INFINITY })?;
    let diag = chol.l_dirty().diagonal();
    let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    let condition = (hi / lo).powi(2);
    if !(condition.is_finite() && condition <= MAX_CONDITION) {
        return Err(Error::SingularCovariance { condition });
    }
    let g = chol.solve(&cov.gamma_hat.transpose()).transpose();
    let nu = &cov.ybar - &g * &cov.ybark;
    Ok((g, nu.iter().copied().collect(), condition))
}

pub fn fit(binned: &BinnedSeries, config: &EstimatorConfig) -> Result<LinkEstimate> {
    config.validate()?;
    if (binned.h() - config.h).abs() > 1e-12 * config.h {
        return Err(Error::InvalidParameter(format!(
            "series was binned with h = {} but the estimator expects h = {}",
            binned.h(),
            config.h
        )));
    }
    let cov = build_covariances(binned, config.k)?;
    let (mut g, mut nu_hat, condition) = solve(&cov, config.ridge)?;

    let mut diagnostics = FitDiagnostics {
        condition_estimate: condition,
        ridge: config.ridge,
        dropped_events: binned.dropped().to_vec(),
        ..FitDiagnostics::default()
    };
    if config.nonneg_projection {
        let raw = (g.clone(), nu_hat.clone());
        let mut clamped = 0;
        g.iter_mut().filter(|v| **v < 0.0).for_each(|v| {
            *v = 0.0;
            clamped += 1;
        });
        let nu: DVector<f64> = &cov.ybar - &g * &cov.ybark;
        nu_hat = nu.iter().copied().collect();
        diagnostics.clamped_coefficients = clamped;
        diagnostics.raw = Some(raw);
    }

    let mut est = LinkEstimate::from_coefficients(config.h, config.k, g, nu_hat)?;
    est.diagnostics = diagnostics;
    Ok(est)
}

/// `φ̂_ij(u)`: level `⌊u/h⌋` on `[0, kh)`, zero beyond.
pub fn evaluate_step(estimate: &LinkEstimate, i: usize, j: usize, u: f64) -> Result<f64> {
    let d = estimate.d;
    if i >= d || j >= d {
        return Err(Error::ComponentOutOfRange { index: i.max(j), d });
    }
    if u.is_nan() || u < 0.0 {
        return Err(Error::InvalidParameter(format!("lag must be >= 0, got {u}")));
    }
    Ok(step_level(estimate.h, estimate.levels(i, j), u))
}

/// `∫₀^∞ ‖φ̂(u) − φ(u)‖_F du`.
///
/// Integrated bin by bin on `[0, kh)` with the truth sampled at Gauss nodes;
/// the tail beyond `kh` is closed form when every nonzero true kernel is
/// exponential with a common decay, and numerical otherwise.
pub fn l1_error(estimate: &LinkEstimate, truth: &HawkesModel) -> Result<f64> {
    let d = estimate.d;
    if truth.dim() != d {
        return Err(Error::InvalidParameter(format!(
            "estimate has {d} components, truth has {}",
            truth.dim()
        )));
    }
    let h = estimate.h;
    let span = h * estimate.k as f64;

    let mut edges: Vec<f64> = (0..=estimate.k).map(|m| m as f64 * h).collect();
    for (_, kernel) in truth.kernels() {
        if let LinkKernel::StepFunction { h: th, values } = kernel {
            edges.extend((0..=values.len()).map(|m| m as f64 * th));
        }
    }
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));

    let diff_norm = |u: f64| -> f64 {
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                let e = estimate.phi_hat(i, j).eval(u) - truth.kernel(i, j).eval(u);
                s += e * e;
            }
        }
        s.sqrt()
    };
    let truth_norm = |u: f64| -> f64 {
        truth.kernels().map(|(_, k)| k.eval(u).powi(2)).sum::<f64>().sqrt()
    };

    let mut total = 0.0;
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        if b <= span + 1e-12 * span {
            total += quadrature::composite(a, b, 4, diff_norm);
        } else if a >= span - 1e-12 * span {
            total += quadrature::composite(a, b, 4, truth_norm);
        } else {
            total += quadrature::composite(a, span, 4, diff_norm);
            total += quadrature::composite(span, b, 4, truth_norm);
        }
    }
    let covered = edges.last().copied().unwrap_or(0.0).max(span);
    total += tail_norm_integral(truth, covered);
    Ok(total)
}

/// `∫_{from}^∞ ‖φ(u)‖_F du` for the part of the truth not covered by step edges.
fn tail_norm_integral(truth: &HawkesModel, from: f64) -> f64 {
    let exps: Vec<(f64, f64)> = truth
        .kernels()
        .filter_map(|(_, k)| match k {
            LinkKernel::Exponential { alpha, beta } if *alpha != 0.0 => Some((*alpha, *beta)),
            _ => None,
        })
        .collect();
    if exps.is_empty() {
        return 0.0;
    }
    let beta0 = exps[0].1;
    if exps.iter().all(|(_, b)| *b == beta0) {
        let amp = exps.iter().map(|(a, _)| a * a).sum::<f64>().sqrt();
        return amp / beta0 * (-beta0 * from).exp();
    }
    let norm = |u: f64| exps.iter().map(|(a, b)| (a * (-b * u).exp()).powi(2)).sum::<f64>().sqrt();
    let beta_max = exps.iter().map(|(_, b)| *b).fold(0.0, f64::max);
    let beta_min = exps.iter().map(|(_, b)| *b).fold(f64::INFINITY, f64::min);
    let width = 0.5 / beta_max;
    let mut total = 0.0;
    let mut a = from;
    loop {
        let piece = quadrature::gauss_legendre(a, a + width, norm);
        total += piece;
        a += width;
        let remaining: f64 = exps.iter().map(|(al, b)| al.abs() / b * (-b * a).exp()).sum();
        if remaining <= 1e-15 * total.max(1e-300) || a - from > 800.0 / beta_min {
            break;
        }
    }
    total
}

/// Median error per horizon and whether medians are nonincreasing in `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    /// `(T, median error)` sorted by `T`.
    pub medians: Vec<(f64, f64)>,
    pub nonincreasing: bool,
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Groups `(T, error)` pairs by `T` (one pair per seed) and compares medians.
pub fn rate_check(results: &[(f64, f64)]) -> RateReport {
    let mut horizons: Vec<f64> = results.iter().map(|(t, _)| *t).collect();
    horizons.sort_by(f64::total_cmp);
    horizons.dedup();
    let medians: Vec<(f64, f64)> = horizons
        .iter()
        .map(|&t| {
            let mut errs: Vec<f64> =
                results.iter().filter(|(s, _)| *s == t).map(|(_, e)| *e).collect();
            (t, median(&mut errs))
        })
        .collect();
    let nonincreasing = medians.windows(2).all(|w| w[1].1 <= w[0].1);
    RateReport { medians, nonincreasing }
}

/// Descriptive rule for calling a link nonzero: the largest level of `φ̂_ij`
/// must exceed `c` times a robust scale (1.4826 × median absolute deviation)
/// of all off-diagonal levels. A heuristic, not a significance test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdRule {
    pub c: f64,
}

impl Default for ThresholdRule {
    fn default() -> Self {
        ThresholdRule { c: 4.0 }
    }
}

impl ThresholdRule {
    /// Robust noise scale of the estimate's levels. Uses the diagonal when
    /// there are no off-diagonal entries.
    pub fn noise_scale(&self, estimate: &LinkEstimate) -> f64 {
        let d = estimate.d;
        let mut levels: Vec<f64> = Vec::new();
        for i in 0..d {
            for j in 0..d {
                if i != j || d == 1 {
                    levels.extend_from_slice(estimate.levels(i, j));
                }
            }
        }
        let mut work = levels.clone();
        let centre = median(&mut work);
        let mut dev: Vec<f64> = levels.iter().map(|v| (v - centre).abs()).collect();
        1.4826 * median(&mut dev)
    }

    /// `flags[i][j]` is true when `φ̂_ij` is called nonzero.
    pub fn flags(&self, estimate: &LinkEstimate) -> Vec<Vec<bool>> {
        let scale = self.noise_scale(estimate);
        let d = estimate.d;
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let peak = estimate.levels(i, j).iter().copied().fold(f64::NEG_INFINITY, f64::max);
                        peak > self.c * scale
                    })
                    .collect()
            })
            .collect()
    }
}
