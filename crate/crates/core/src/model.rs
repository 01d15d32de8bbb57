//! The generative Hawkes model and its first-order moments.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::events::EventStream;
use crate::kernel::LinkKernel;

/// Anything that defines a conditional intensity
/// `λ_i(t) = baseline_i + Σ_j Σ_{τ<t} φ_ij(t − τ)`.
///
/// Implemented by [`HawkesModel`] and by fitted
/// [`LinkEstimate`](crate::estimate::LinkEstimate)s.
pub trait IntensityModel {
    fn dim(&self) -> usize;
    /// Baseline rate of component `i` in events per unit time.
    fn baseline(&self, i: usize) -> f64;
    /// Kernel for the effect of component `j` on component `i`.
    fn kernel(&self, i: usize, j: usize) -> &LinkKernel;
}

/// Baseline rates `ν` plus the `d × d` kernel matrix `φ`; entry `(i, j)` is the
/// effect of component `j`'s events on component `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct HawkesModel {
    nu: Vec<f64>,
    phi: Vec<LinkKernel>,
}

impl HawkesModel {
    /// `phi` is given row by row, `phi[i][j] = φ_ij`.
    pub fn new(nu: Vec<f64>, phi: Vec<Vec<LinkKernel>>) -> Result<Self> {
        let d = nu.len();
        if d == 0 {
            return Err(Error::InvalidParameter("model needs at least one component".into()));
        }
        if let Some(v) = nu.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "baseline intensities must be finite and > 0, got {v}"
            )));
        }
        if phi.len() != d || phi.iter().any(|row| row.len() != d) {
            return Err(Error::InvalidParameter(format!(
                "kernel matrix must be {d} x {d}"
            )));
        }
        let phi: Vec<LinkKernel> = phi.into_iter().flatten().collect();
        for k in &phi {
            k.validate()?;
        }
        Ok(HawkesModel { nu, phi })
    }

    /// Homogeneous Poisson process with rates `nu`.
    pub fn poisson(nu: Vec<f64>) -> Result<Self> {
        let d = nu.len();
        HawkesModel::new(nu, vec![vec![LinkKernel::Zero; d]; d])
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    pub fn kernels(&self) -> impl Iterator<Item = ((usize, usize), &LinkKernel)> {
        let d = self.nu.len();
        self.phi.iter().enumerate().map(move |(n, k)| ((n / d, n % d), k))
    }

    /// Same kernels, different baseline.
    pub fn with_nu(&self, nu: Vec<f64>) -> Result<Self> {
        let d = self.nu.len();
        let rows = self.phi.chunks(d).map(<[LinkKernel]>::to_vec).collect();
        HawkesModel::new(nu, rows)
    }

    /// `K_ij = ∫₀^∞ φ_ij(u) du`.
    pub fn integral_matrix(&self) -> DMatrix<f64> {
        integral_matrix(self)
    }

    pub fn spectral_radius(&self) -> f64 {
        spectral_radius(&self.integral_matrix())
    }

    pub fn check_stationary(&self) -> Result<()> {
        let rho = self.spectral_radius();
        if rho < 1.0 {
            Ok(())
        } else {
            Err(Error::NonStationary { spectral_radius: rho })
        }
    }

    /// Entries `(i, j)` with `∫|φ_ij| >= 1`. The spectral-radius condition is
    /// the one enforced; this is reported for information only.
    pub fn entrywise_integrability_violations(&self) -> Vec<(usize, usize)> {
        self.kernels()
            .filter(|(_, k)| k.abs_integral() >= 1.0)
            .map(|(ij, _)| ij)
            .collect()
    }
}

impl IntensityModel for HawkesModel {
    fn dim(&self) -> usize {
        self.nu.len()
    }

    fn baseline(&self, i: usize) -> f64 {
        self.nu[i]
    }

    fn kernel(&self, i: usize, j: usize) -> &LinkKernel {
        &self.phi[i * self.nu.len() + j]
    }
}

/// Stationary mean rate `p = (I − K)⁻¹ ν` of each component.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanIntensity {
    pub p: Vec<f64>,
}

pub fn kernel_integral(kernel: &LinkKernel) -> f64 {
    kernel.integral()
}

pub fn integral_matrix<M: IntensityModel + ?Sized>(model: &M) -> DMatrix<f64> {
    let d = model.dim();
    DMatrix::from_fn(d, d, |i, j| model.kernel(i, j).integral())
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    if m.iter().all(|v| *v == 0.0) {
        return 0.0;
    }
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

pub fn mean_intensity(model: &HawkesModel) -> Result<MeanIntensity> {
    model.check_stationary()?;
    let d = model.dim();
    let k = model.integral_matrix();
    let system = DMatrix::<f64>::identity(d, d) - k;
    let rhs = DVector::from_column_slice(model.nu());
    let p = system.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
    if p.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    Ok(MeanIntensity { p: p.iter().copied().collect() })
}

/// Asymptotic covariance of `N(T)/T`, scaled by `T`:
/// `(I − K)⁻¹ diag(p) (I − K)⁻ᵀ`. Its diagonal gives Monte-Carlo standard
/// errors for empirical rates.
pub fn rate_covariance(model: &HawkesModel) -> Result<DMatrix<f64>> {
    let p = mean_intensity(model)?.p;
    let d = model.dim();
    let inv = (DMatrix::<f64>::identity(d, d) - model.integral_matrix())
        .try_inverse()
        .ok_or(Error::SingularSystem)?;
    Ok(&inv * DMatrix::from_diagonal(&DVector::from_vec(p)) * inv.transpose())
}

/// `Σ_{τ ∈ events, τ < t} φ(t − τ)`, or with `inclusive` the right limit that
/// also counts events at `t` through `φ(0⁺)`.
pub(crate) fn excitation(kernel: &LinkKernel, events: &[f64], t: f64, inclusive: bool) -> f64 {
    if kernel.is_zero() {
        return 0.0;
    }
    let end = if inclusive {
        events.partition_point(|&s| s <= t)
    } else {
        events.partition_point(|&s| s < t)
    };
    let start = match kernel.support_end() {
        Some(len) => events[..end].partition_point(|&s| s <= t - len),
        None => 0,
    };
    events[start..end]
        .iter()
        .map(|&s| if inclusive { kernel.right_limit(t - s) } else { kernel.eval(t - s) })
        .sum()
}

pub(crate) fn check_dims<M: IntensityModel + ?Sized>(model: &M, stream: &EventStream) -> Result<()> {
    if model.dim() != stream.dim() {
        return Err(Error::InvalidParameter(format!(
            "model has {} components but the stream has {}",
            model.dim(),
            stream.dim()
        )));
    }
    Ok(())
}

/// `λ_i(t)`, left-continuous: events at exactly `t` do not contribute.
pub fn conditional_intensity<M: IntensityModel + ?Sized>(
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
    if !(t > 0.0 && t <= stream.horizon()) {
        return Err(Error::TimeOutOfRange { t, horizon: stream.horizon() });
    }
    let excite: f64 = (0..d)
        .map(|j| excitation(model.kernel(i, j), &stream.components()[j], t, false))
        .sum();
    Ok(model.baseline(i) + excite)
}
