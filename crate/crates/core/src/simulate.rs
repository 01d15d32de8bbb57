//! Exact simulation by Ogata's thinning.
//!
//! Candidates are proposed from a piecewise-constant majorant equal to the
//! summed intensity just after the most recent candidate. With nonnegative,
//! nonincreasing kernels the summed intensity can only decay until the next
//! accepted event, so the majorant stays valid and is refreshed at every
//! candidate.
//!
//! Randomness comes from a single ChaCha8 stream seeded with
//! `ChaCha8Rng::seed_from_u64(seed)`. Each candidate consumes exactly one
//! standard exponential draw and one uniform draw, in that order, which makes
//! runs reproducible across platforms and couples runs that share a seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::events::EventStream;
use crate::kernel::LinkKernel;
use crate::model::{check_dims, excitation, HawkesModel, IntensityModel};

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub horizon: f64,
    pub seed: u64,
    pub max_events: usize,
}

impl SimulationConfig {
    pub const DEFAULT_MAX_EVENTS: usize = 10_000_000;

    pub fn new(horizon: f64, seed: u64) -> Self {
        SimulationConfig { horizon, seed, max_events: Self::DEFAULT_MAX_EVENTS }
    }

    pub fn with_max_events(mut self, max_events: usize) -> Self {
        self.max_events = max_events;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "simulation horizon must be finite and > 0, got {}",
                self.horizon
            )));
        }
        if self.max_events == 0 {
            return Err(Error::InvalidParameter("max_events must be > 0".into()));
        }
        Ok(())
    }
}

/// `Σ_i λ_i(t⁺)`: the summed intensity right after time `t`, counting events
/// at `t` through `φ(0⁺)`. Dominates the summed intensity on `(t, next event)`
/// whenever all kernels are nonincreasing.
pub fn total_intensity_bound(model: &HawkesModel, stream: &EventStream, t: f64) -> Result<f64> {
    check_dims(model, stream)?;
    let d = model.dim();
    let mut total = 0.0;
    for i in 0..d {
        total += model.baseline(i);
        for j in 0..d {
            total += excitation(model.kernel(i, j), &stream.components()[j], t, true);
        }
    }
    Ok(total)
}

/// Running intensity of every component. Exponential pairs are tracked
/// recursively, other kernels are summed over their finite support.
struct IntensityState<'a> {
    model: &'a HawkesModel,
    d: usize,
    /// `Σ_{τ ≤ now} α_ij e^{−β_ij (now − τ)}` for exponential pairs.
    decayed: Vec<f64>,
    now: f64,
    events: Vec<Vec<f64>>,
}

impl<'a> IntensityState<'a> {
    fn new(model: &'a HawkesModel) -> Self {
        let d = model.dim();
        IntensityState { model, d, decayed: vec![0.0; d * d], now: 0.0, events: vec![Vec::new(); d] }
    }

    /// Move the clock to `t >= now` and return `λ_i(t)` for every `i`.
    fn advance(&mut self, t: f64, out: &mut [f64]) {
        let dt = t - self.now;
        for i in 0..self.d {
            let mut lam = self.model.baseline(i);
            for j in 0..self.d {
                match self.model.kernel(i, j) {
                    LinkKernel::Zero => {}
                    LinkKernel::Exponential { beta, .. } => {
                        let slot = &mut self.decayed[i * self.d + j];
                        *slot *= (-beta * dt).exp();
                        lam += *slot;
                    }
                    k @ LinkKernel::StepFunction { .. } => {
                        lam += excitation(k, &self.events[j], t, false);
                    }
                }
            }
            out[i] = lam;
        }
        self.now = t;
    }

    /// Record an event of component `c` at the current time; returns the
    /// summed jump `Σ_i φ_ic(0⁺)`.
    fn record(&mut self, c: usize) -> f64 {
        self.events[c].push(self.now);
        let mut jump = 0.0;
        for i in 0..self.d {
            let kernel = self.model.kernel(i, c);
            let j0 = kernel.right_limit(0.0);
            if let LinkKernel::Exponential { alpha, .. } = kernel {
                self.decayed[i * self.d + c] += alpha;
            }
            jump += j0;
        }
        jump
    }
}

pub fn simulate(model: &HawkesModel, config: &SimulationConfig) -> Result<EventStream> {
    config.validate()?;
    model.check_stationary()?;
    for ((i, j), k) in model.kernels() {
        if !(k.is_nonnegative() && k.is_nonincreasing()) {
            return Err(Error::NonMonotoneKernel { i, j });
        }
    }

    let d = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = IntensityState::new(model);
    let mut lam = vec![0.0; d];
    let mut bound: f64 = model.nu().iter().sum();
    let mut accepted = 0usize;

    loop {
        let wait: f64 = rng.sample::<f64, _>(Exp1) / bound;
        let u: f64 = rng.random();
        let candidate = state.now + wait;
        if candidate <= state.now {
            // Floating-point collision with the current time; redraw.
            continue;
        }
        if candidate > config.horizon {
            break;
        }
        state.advance(candidate, &mut lam);
        let total: f64 = lam.iter().sum();
        debug_assert!(total <= bound * (1.0 + 1e-9), "majorant violated: {total} > {bound}");

        let mut target = u * bound;
        let mut chosen = None;
        for (c, l) in lam.iter().enumerate() {
            if target < *l {
                chosen = Some(c);
                break;
            }
            target -= l;
        }
        bound = total;
        if let Some(c) = chosen {
            accepted += 1;
            if accepted > config.max_events {
                return Err(Error::EventBudgetExceeded { max_events: config.max_events });
            }
            bound += state.record(c);
        }
    }

    Ok(EventStream::from_parts_unchecked(config.horizon, state.events))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::conditional_intensity;

    fn exp(a: f64, b: f64) -> LinkKernel {
        LinkKernel::exponential(a, b).unwrap()
    }

    #[test]
    fn bound_examples() {
        let m = HawkesModel::new(vec![1.0], vec![vec![exp(0.5, 1.0)]]).unwrap();
        let empty = EventStream::empty(1, 10.0).unwrap();
        assert_eq!(total_intensity_bound(&m, &empty, 3.0).unwrap(), 1.0);
        let s = EventStream::new(10.0, vec![vec![1.0]]).unwrap();
        assert_eq!(total_intensity_bound(&m, &s, 1.0).unwrap(), 1.5);
        let after = total_intensity_bound(&m, &s, 1.0 + 1e-12).unwrap();
        assert!((after - 1.5).abs() < 1e-11);
    }

    #[test]
    fn bound_dominates_until_next_event() {
        let m = HawkesModel::new(
            vec![0.4, 0.3],
            vec![
                vec![exp(0.8, 2.0), LinkKernel::step(0.2, vec![0.5, 0.3, 0.1]).unwrap()],
                vec![exp(0.3, 1.0), LinkKernel::Zero],
            ],
        )
        .unwrap();
        let stream = simulate(&m, &SimulationConfig::new(200.0, 3)).unwrap();
        let mut all: Vec<f64> = stream.components().iter().flatten().copied().collect();
        all.push(0.0);
        all.sort_by(f64::total_cmp);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut checked = 0;
        while checked < 1000 {
            let n = rng.random_range(0..all.len() - 1);
            let (a, b) = (all[n], all[n + 1]);
            let t = a + (b - a) * rng.random::<f64>();
            if t <= a || t >= b || t <= 0.0 {
                continue;
            }
            let bound = total_intensity_bound(&m, &stream, a).unwrap();
            let sum: f64 =
                (0..2).map(|i| conditional_intensity(&m, &stream, i, t).unwrap()).sum();
            assert!(sum <= bound + 1e-12, "{sum} > {bound} at {t}");
            checked += 1;
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let m = HawkesModel::new(vec![1.0], vec![vec![exp(0.5, 1.0)]]).unwrap();
        let a = simulate(&m, &SimulationConfig::new(500.0, 42)).unwrap();
        let b = simulate(&m, &SimulationConfig::new(500.0, 42)).unwrap();
        let c = simulate(&m, &SimulationConfig::new(500.0, 43)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn poisson_rate() {
        let m = HawkesModel::poisson(vec![2.0]).unwrap();
        let s = simulate(&m, &SimulationConfig::new(1000.0, 1)).unwrap();
        let rate = s.empirical_rates()[0];
        assert!((rate - 2.0).abs() < 4.0 * (2.0f64 / 1000.0).sqrt());
    }

    #[test]
    fn errors() {
        let explosive = HawkesModel::new(vec![1.0], vec![vec![exp(1.2, 1.0)]]).unwrap();
        assert!(matches!(
            simulate(&explosive, &SimulationConfig::new(10.0, 0)),
            Err(Error::NonStationary { .. })
        ));
        let increasing =
            HawkesModel::new(vec![1.0], vec![vec![LinkKernel::step(0.1, vec![0.1, 0.2]).unwrap()]])
                .unwrap();
        assert!(matches!(
            simulate(&increasing, &SimulationConfig::new(10.0, 0)),
            Err(Error::NonMonotoneKernel { i: 0, j: 0 })
        ));
        let m = HawkesModel::poisson(vec![5.0]).unwrap();
        assert!(matches!(
            simulate(&m, &SimulationConfig::new(100.0, 0).with_max_events(10)),
            Err(Error::EventBudgetExceeded { max_events: 10 })
        ));
        assert!(simulate(&m, &SimulationConfig::new(-1.0, 0)).is_err());
    }
}
