//! Multivariate Hawkes processes: exact simulation, nonparametric link
//! estimation through a discretized autoregression, Granger causality graphs
//! with global Markov queries, and residual goodness of fit.
//!
//! The pipeline is
//! [`simulate`](simulate::simulate) → [`bin`](discretize::bin) →
//! [`fit`](estimate::fit) → [`graph_from_estimate`](graph::graph_from_estimate)
//! → [`residual_transform`](gof::residual_transform).

pub mod discretize;
pub mod error;
pub mod estimate;
pub mod events;
pub mod gof;
pub mod graph;
pub mod kernel;
pub mod model;
pub mod presets;
mod quadrature;
pub mod simulate;

pub use discretize::{bin, build_covariances, sample_autocovariance, BinnedSeries, CovarianceStructure};
pub use error::{Error, Result};
pub use estimate::{evaluate_step, fit, l1_error, rate_check, EstimatorConfig, LinkEstimate, ThresholdRule};
pub use events::EventStream;
pub use graph::{CausalityGraph, UndirectedGraph, VertexSet};
pub use kernel::LinkKernel;
pub use model::{conditional_intensity, kernel_integral, mean_intensity, HawkesModel, IntensityModel, MeanIntensity};
pub use simulate::{simulate, total_intensity_bound, SimulationConfig};
