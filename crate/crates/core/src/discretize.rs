//! Binning of event streams into count series and the sample covariances of
//! the lagged regression.
//!
//! Bins are the half-open intervals `((t−1)h, th]`, `t = 1..T_h` with
//! `T_h = ⌊T/h⌋`. Events past `h·T_h` are dropped and counted.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::events::EventStream;

/// `d × T_h` matrix of interval counts `Y^h`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedSeries {
    h: f64,
    d: usize,
    len: usize,
    /// Row-major, `counts[i * len + t]`.
    counts: Vec<u32>,
    dropped: Vec<usize>,
}

impl BinnedSeries {
    /// Build from explicit rows of equal length.
    pub fn from_counts(h: f64, rows: Vec<Vec<u32>>) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidBinWidth { h, horizon: f64::NAN });
        }
        let d = rows.len();
        if d == 0 {
            return Err(Error::InvalidParameter("binned series needs at least one component".into()));
        }
        let len = rows[0].len();
        if rows.iter().any(|r| r.len() != len) {
            return Err(Error::InvalidParameter("count rows differ in length".into()));
        }
        Ok(BinnedSeries { h, d, len, counts: rows.concat(), dropped: vec![0; d] })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of bins `T_h`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Count of component `i` in bin `t` (0-based, covering `(t·h, (t+1)·h]`).
    pub fn count(&self, i: usize, t: usize) -> u32 {
        self.counts[i * self.len + t]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.counts[i * self.len..(i + 1) * self.len]
    }

    /// Events past the last full bin, per component.
    pub fn dropped(&self) -> &[usize] {
        &self.dropped
    }

    /// Every count multiplied by `factor`.
    pub fn scaled(&self, factor: u32) -> Self {
        BinnedSeries { counts: self.counts.iter().map(|c| c * factor).collect(), ..self.clone() }
    }
}

/// `⌊x⌋`, treating values within relative `1e-9` of an integer as that integer.
fn tolerant_floor(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as usize
    } else {
        x.floor() as usize
    }
}

/// 1-based index `t` of the bin `((t−1)h, th]` holding `tau > 0`.
fn bin_index(tau: f64, h: f64) -> usize {
    let mut b = (tau / h).ceil().max(1.0) as usize;
    while b > 1 && tau <= (b - 1) as f64 * h {
        b -= 1;
    }
    while tau > b as f64 * h {
        b += 1;
    }
    b
}

pub fn bin(stream: &EventStream, h: f64) -> Result<BinnedSeries> {
    let horizon = stream.horizon();
    if !(h.is_finite() && h > 0.0 && h <= horizon) {
        return Err(Error::InvalidBinWidth { h, horizon });
    }
    let d = stream.dim();
    let len = tolerant_floor(horizon / h);
    let mut counts = vec![0u32; d * len];
    let mut dropped = vec![0usize; d];
    for (i, times) in stream.components().iter().enumerate() {
        for &tau in times {
            let b = bin_index(tau, h);
            if b > len {
                dropped[i] += 1;
            } else {
                counts[i * len + b - 1] += 1;
            }
        }
    }
    Ok(BinnedSeries { h, d, len, counts, dropped })
}

/// Lag-`u` sample autocovariance
/// `Γ̂(u) = (T_h − u)⁻¹ Σ_{t=u+1}^{T_h} (Y_t − Ȳ)(Y_{t−u} − Ȳ)ᵀ`
/// with `Ȳ` the full-sample mean.
pub fn sample_autocovariance(binned: &BinnedSeries, u: usize) -> Result<DMatrix<f64>> {
    let n = binned.len();
    if u >= n {
        return Err(Error::LagOutOfRange { lag: u, len: n });
    }
    let d = binned.dim();
    let mean: Vec<f64> = (0..d)
        .map(|i| binned.row(i).iter().map(|&c| c as f64).sum::<f64>() / n as f64)
        .collect();
    let mut out = DMatrix::zeros(d, d);
    for i in 0..d {
        let yi = binned.row(i);
        for j in 0..d {
            let yj = binned.row(j);
            let s: f64 = (u..n)
                .map(|t| (yi[t] as f64 - mean[i]) * (yj[t - u] as f64 - mean[j]))
                .sum();
            out[(i, j)] = s / (n - u) as f64;
        }
    }
    Ok(out)
}

/// Sample moments of the regression of `Y_t` on `Y^{h,k}_t = (Y_{t−1}, …, Y_{t−k})`
/// over `t = k+1..T_h`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceStructure {
    pub h: f64,
    pub k: usize,
    pub d: usize,
    /// `d × kd`, block `u` is `cov(Y_t, Y_{t−u})`.
    pub gamma_hat: DMatrix<f64>,
    /// `kd × kd`, block `(u, v)` is `cov(Y_{t−u}, Y_{t−v})`.
    pub big_gamma_hat: DMatrix<f64>,
    /// Mean of `Y_t` over the regression range.
    pub ybar: DVector<f64>,
    /// Mean of the stacked lag vector over the regression range.
    pub ybark: DVector<f64>,
    /// `T_{h,k} = T_h − k`.
    pub n_eff: usize,
}

impl CovarianceStructure {
    /// Block `(u, v)` of `Γ̂_{h,k}`, lags 1-based.
    pub fn lag_block(&self, u: usize, v: usize) -> DMatrix<f64> {
        let d = self.d;
        self.big_gamma_hat.view(((u - 1) * d, (v - 1) * d), (d, d)).into_owned()
    }
}

/// Assemble `γ̂_{h,k}` and `Γ̂_{h,k}`. Each lagged copy is centred by its own
/// mean over the regression range and all moments divide by `T_h − k`, so the
/// result is the exact moment matrix of the least-squares problem with
/// intercept.
///
/// Cross-products are accumulated in integers, one sliding window per lag
/// difference, so the cost is `O(k·d²·T_h)` and each centred moment is one
/// exact integer expression followed by a single division.
pub fn build_covariances(binned: &BinnedSeries, k: usize) -> Result<CovarianceStructure> {
    let d = binned.dim();
    let len = binned.len();
    if k == 0 {
        return Err(Error::InvalidParameter("lag order k must be >= 1".into()));
    }
    if len <= k + d * k {
        return Err(Error::InsufficientData(format!(
            "{len} bins cannot identify {} regressors per component at lag order {k}; need more than {}",
            d * k + 1,
            k + d * k
        )));
    }
    let n = len - k;
    let y = |i: usize, s: usize| binned.counts[i * len + s] as i64;

    // Window sums of lag-u copies: s ∈ [k−u, len−1−u].
    let mut prefix = vec![0i64; d * (len + 1)];
    for i in 0..d {
        for s in 0..len {
            prefix[i * (len + 1) + s + 1] = prefix[i * (len + 1) + s] + y(i, s);
        }
    }
    let window_sum =
        |i: usize, u: usize| prefix[i * (len + 1) + len - u] - prefix[i * (len + 1) + k - u];

    let nn = n as i128;
    let centred = |raw: i64, si: i64, sj: i64| -> f64 {
        let num = nn * raw as i128 - si as i128 * sj as i128;
        num as f64 / (nn * nn) as f64
    };

    let kd = k * d;
    let mut gamma_hat = DMatrix::zeros(d, kd);
    let mut big_gamma_hat = DMatrix::zeros(kd, kd);
    let sums: Vec<Vec<i64>> = (0..=k).map(|u| (0..d).map(|i| window_sum(i, u)).collect()).collect();

    let mut acc = vec![0i64; d * d];
    for lag in 0..=k {
        // raw(u, u+lag)[i][j] = Σ_s Y_{i,s} Y_{j,s−lag}, s ∈ [k−u, len−1−u].
        acc.iter_mut().for_each(|a| *a = 0);
        for s in k..len {
            for i in 0..d {
                let yi = y(i, s);
                if yi == 0 {
                    continue;
                }
                for j in 0..d {
                    acc[i * d + j] += yi * y(j, s - lag);
                }
            }
        }
        for u in 0..=(k - lag) {
            if u > 0 {
                let enter = k - u;
                let leave = len - u;
                for i in 0..d {
                    let (yi_in, yi_out) = (y(i, enter), y(i, leave));
                    for j in 0..d {
                        acc[i * d + j] += yi_in * y(j, enter - lag) - yi_out * y(j, leave - lag);
                    }
                }
            }
            let v = u + lag;
            for i in 0..d {
                for j in 0..d {
                    let c = centred(acc[i * d + j], sums[u][i], sums[v][j]);
                    if u == 0 {
                        if v > 0 {
                            gamma_hat[(i, (v - 1) * d + j)] = c;
                        }
                    } else {
                        big_gamma_hat[((u - 1) * d + i, (v - 1) * d + j)] = c;
                        big_gamma_hat[((v - 1) * d + j, (u - 1) * d + i)] = c;
                    }
                }
            }
        }
    }

    let ybar = DVector::from_fn(d, |i, _| sums[0][i] as f64 / n as f64);
    let ybark = DVector::from_fn(kd, |r, _| sums[r / d + 1][r % d] as f64 / n as f64);
    Ok(CovarianceStructure { h: binned.h(), k, d, gamma_hat, big_gamma_hat, ybar, ybark, n_eff: n })
}
