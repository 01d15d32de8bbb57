//! Link kernels `φ_ij`, the lag response of component `i` to an event of
//! component `j`.
//!
//! Every kernel vanishes on `u <= 0`. Step kernels have compact support
//! `[0, h·len)` and pick level `⌊u/h⌋` inside it.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum LinkKernel {
    Zero,
    /// `α·exp(−β·u)` for `u > 0`.
    Exponential { alpha: f64, beta: f64 },
    /// Piecewise constant with level `values[m]` on `[m·h, (m+1)·h)`.
    StepFunction { h: f64, values: Vec<f64> },
}

impl LinkKernel {
    pub fn zero() -> Self {
        LinkKernel::Zero
    }

    pub fn exponential(alpha: f64, beta: f64) -> Result<Self> {
        let kernel = LinkKernel::Exponential { alpha, beta };
        kernel.validate()?;
        Ok(kernel)
    }

    pub fn step(h: f64, values: Vec<f64>) -> Result<Self> {
        let kernel = LinkKernel::StepFunction { h, values };
        kernel.validate()?;
        Ok(kernel)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LinkKernel::Zero => Ok(()),
            LinkKernel::Exponential { alpha, beta } => {
                if !(alpha.is_finite() && *alpha >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "exponential kernel amplitude must be finite and >= 0, got {alpha}"
                    )));
                }
                if !(beta.is_finite() && *beta > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "exponential kernel decay must be finite and > 0, got {beta}"
                    )));
                }
                Ok(())
            }
            LinkKernel::StepFunction { h, values } => {
                if !(h.is_finite() && *h > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "step kernel bin width must be finite and > 0, got {h}"
                    )));
                }
                if let Some(v) = values.iter().find(|v| !v.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "step kernel level must be finite, got {v}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Kernel value at lag `u`; zero for `u <= 0`.
    pub fn eval(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        self.eval_nonneg(u)
    }

    /// Limit from the right, `φ(u⁺)`. Differs from [`eval`](Self::eval) only at `u = 0`.
    pub fn right_limit(&self, u: f64) -> f64 {
        if u < 0.0 {
            return 0.0;
        }
        self.eval_nonneg(u)
    }

    fn eval_nonneg(&self, u: f64) -> f64 {
        match self {
            LinkKernel::Zero => 0.0,
            LinkKernel::Exponential { alpha, beta } => alpha * (-beta * u).exp(),
            LinkKernel::StepFunction { h, values } => step_level(*h, values, u),
        }
    }

    /// `∫₀^∞ φ(u) du` in closed form.
    pub fn integral(&self) -> f64 {
        match self {
            LinkKernel::Zero => 0.0,
            LinkKernel::Exponential { alpha, beta } => alpha / beta,
            LinkKernel::StepFunction { h, values } => h * values.iter().sum::<f64>(),
        }
    }

    /// `∫₀^∞ |φ(u)| du`.
    pub fn abs_integral(&self) -> f64 {
        match self {
            LinkKernel::Zero => 0.0,
            LinkKernel::Exponential { alpha, beta } => alpha.abs() / beta,
            LinkKernel::StepFunction { h, values } => h * values.iter().map(|v| v.abs()).sum::<f64>(),
        }
    }

    /// `∫₀^x φ(u) du`, zero for `x <= 0`.
    pub fn cumulative(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            LinkKernel::Zero => 0.0,
            LinkKernel::Exponential { alpha, beta } => alpha / beta * -(-beta * x).exp_m1(),
            LinkKernel::StepFunction { h, values } => {
                let full = (x / h).floor();
                if full >= values.len() as f64 {
                    return h * values.iter().sum::<f64>();
                }
                let full = full as usize;
                let head: f64 = values[..full].iter().sum();
                h * head + values[full] * (x - full as f64 * h)
            }
        }
    }

    /// True when the kernel is identically zero.
    pub fn is_zero(&self) -> bool {
        match self {
            LinkKernel::Zero => true,
            LinkKernel::Exponential { alpha, .. } => *alpha == 0.0,
            LinkKernel::StepFunction { values, .. } => values.iter().all(|v| *v == 0.0),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            LinkKernel::Zero => true,
            LinkKernel::Exponential { alpha, .. } => *alpha >= 0.0,
            LinkKernel::StepFunction { values, .. } => values.iter().all(|v| *v >= 0.0),
        }
    }

    /// Nonincreasing on `(0, ∞)`, including the drop to zero past the support.
    pub fn is_nonincreasing(&self) -> bool {
        match self {
            LinkKernel::Zero => true,
            LinkKernel::Exponential { alpha, .. } => *alpha >= 0.0,
            LinkKernel::StepFunction { values, .. } => {
                values.windows(2).all(|w| w[1] <= w[0]) && values.last().is_none_or(|v| *v >= 0.0)
            }
        }
    }

    /// End of the support, `None` when unbounded.
    pub fn support_end(&self) -> Option<f64> {
        match self {
            LinkKernel::Zero => Some(0.0),
            LinkKernel::Exponential { alpha, .. } if *alpha == 0.0 => Some(0.0),
            LinkKernel::Exponential { .. } => None,
            LinkKernel::StepFunction { h, values } => Some(h * values.len() as f64),
        }
    }

    /// `sup_{u>0} φ(u)`, zero for the zero kernel.
    pub fn peak(&self) -> f64 {
        match self {
            LinkKernel::Zero => 0.0,
            LinkKernel::Exponential { alpha, .. } => *alpha,
            LinkKernel::StepFunction { values, .. } => values.iter().copied().fold(0.0, f64::max),
        }
    }
}

pub(crate) fn step_level(h: f64, values: &[f64], u: f64) -> f64 {
    let idx = (u / h).floor();
    if idx < 0.0 || idx >= values.len() as f64 {
        0.0
    } else {
        values[idx as usize]
    }
}
