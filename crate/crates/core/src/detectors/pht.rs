//! Page-Hinkley test.
//!
//! With `mu_k` the running mean of the phenomenon at step `k`, the detector
//! tracks `m_t = sum_k (x(k) - mu_k)` and its running minimum `M_t`, and fires
//! when `m_t - M_t > lambda`. The running mean is the one available at step
//! `k`; earlier terms are never recomputed.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Decision, Detector, DetectorKind};
use crate::error::Result;
use crate::stream::Observation;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhtState {
    pub count: u64,
    pub sum: f64,
    /// Cumulative deviation `m_t`.
    pub cumulative: f64,
    /// Running minimum `M_t` of the cumulative deviation.
    pub minimum: f64,
}

impl PhtState {
    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }
}

/// Advances `state` by `x`; returns the statistic `|m_t - M_t|` and whether
/// it exceeds `lambda`. The caller discards the state after a drift.
pub fn pht_step(state: &mut PhtState, x: f64, lambda: f64) -> (f64, bool) {
    state.count += 1;
    state.sum += x;
    // zero on the first observation of a phenomenon
    let deviation = x - state.mean();
    state.cumulative += deviation;
    state.minimum = state.minimum.min(state.cumulative);
    let stat = (state.cumulative - state.minimum).abs();
    (stat, stat > lambda)
}

#[derive(Debug, Clone)]
pub struct PageHinkley {
    lambda: f64,
    state: PhtState,
}

impl PageHinkley {
    pub fn new(lambda: f64) -> Self {
        Self {
            lambda,
            state: PhtState::default(),
        }
    }

    pub fn state(&self) -> &PhtState {
        &self.state
    }
}

impl Detector for PageHinkley {
    fn kind(&self) -> DetectorKind {
        DetectorKind::Pht
    }

    fn observe(&mut self, obs: Observation) -> Result<Option<Decision>> {
        let (statistic, drift) = pht_step(&mut self.state, obs.value, self.lambda);
        if drift {
            self.reset();
        }
        Ok(Some(Decision {
            timestamp: obs.timestamp,
            statistic,
            threshold: self.lambda,
            drift,
        }))
    }

    fn model_state(&self) -> serde_json::Value {
        json!({
            "count": self.state.count,
            "mean": self.state.mean(),
            "m": self.state.cumulative,
            "min_m": self.state.minimum,
        })
    }

    fn reset(&mut self) {
        self.state = PhtState::default();
    }
}
