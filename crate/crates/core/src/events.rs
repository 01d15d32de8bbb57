use crate::error::{Error, Result};

/// Event times of a `d`-dimensional simple point process observed on `[0, T]`.
///
/// Times are strictly increasing within a component and lie in `(0, T]`; no
/// two components share a timestamp.
#[derive(Debug, Clone, PartialEq)]
pub struct EventStream {
    horizon: f64,
    events: Vec<Vec<f64>>,
}

impl EventStream {
    pub fn new(horizon: f64, events: Vec<Vec<f64>>) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidStream(format!(
                "observation window end must be finite and > 0, got {horizon}"
            )));
        }
        if events.is_empty() {
            return Err(Error::InvalidStream("stream needs at least one component".into()));
        }
        for (i, times) in events.iter().enumerate() {
            for (n, &t) in times.iter().enumerate() {
                if !(t > 0.0 && t <= horizon) {
                    return Err(Error::InvalidStream(format!(
                        "component {} event {t} outside (0, {horizon}]",
                        i + 1
                    )));
                }
                if n > 0 && t <= times[n - 1] {
                    return Err(Error::InvalidStream(format!(
                        "component {} times not strictly increasing at {t}",
                        i + 1
                    )));
                }
            }
        }
        let mut all: Vec<f64> = events.iter().flatten().copied().collect();
        all.sort_by(f64::total_cmp);
        if let Some(w) = all.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidStream(format!(
                "two components jump simultaneously at {}",
                w[0]
            )));
        }
        Ok(EventStream { horizon, events })
    }

    /// Stream with no events.
    pub fn empty(d: usize, horizon: f64) -> Result<Self> {
        EventStream::new(horizon, vec![Vec::new(); d])
    }

    pub(crate) fn from_parts_unchecked(horizon: f64, events: Vec<Vec<f64>>) -> Self {
        EventStream { horizon, events }
    }

    pub fn dim(&self) -> usize {
        self.events.len()
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn component(&self, i: usize) -> Result<&[f64]> {
        self.events
            .get(i)
            .map(Vec::as_slice)
            .ok_or(Error::ComponentOutOfRange { index: i, d: self.dim() })
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.events
    }

    pub fn counts(&self) -> Vec<usize> {
        self.events.iter().map(Vec::len).collect()
    }

    pub fn total_events(&self) -> usize {
        self.events.iter().map(Vec::len).sum()
    }

    /// `N_i(T) / T` for every component.
    pub fn empirical_rates(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.len() as f64 / self.horizon).collect()
    }
}
