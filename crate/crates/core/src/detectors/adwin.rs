//! Exhaustive two-window mean comparison.
//!
//! Every observation since the start of the phenomenon is kept. At each step
//! all cuts `k` split the buffer into `[s..=k]` and `[k+1..=t]`, and the
//! detector fires when the largest absolute difference of the two means
//! exceeds `lambda`. Prefix sums make one step `O(t - s)`.

use serde_json::Value;

use super::{Decision, Detector, DetectorKind};
use crate::error::Result;
use crate::stream::Observation;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdwinDecision {
    pub drift: bool,
    /// Buffer-local index of the last element of the left window at the
    /// largest mean difference; smallest such index on ties.
    pub cut: Option<usize>,
    pub statistic: f64,
}

impl AdwinDecision {
    const UNDECIDED: AdwinDecision = AdwinDecision {
        drift: false,
        cut: None,
        statistic: 0.0,
    };
}

/// `prefix[i]` is the sum of the first `i` buffered values.
fn scan(prefix: &[f64], lambda: f64, stride: usize) -> AdwinDecision {
    let len = prefix.len() - 1;
    if len < 2 {
        return AdwinDecision::UNDECIDED;
    }
    let total = prefix[len];
    let mut best = f64::NEG_INFINITY;
    let mut best_cut = 0;
    for k in (0..len - 1).step_by(stride) {
        let left_n = (k + 1) as f64;
        let right_n = (len - k - 1) as f64;
        let left = prefix[k + 1] / left_n;
        let right = (total - prefix[k + 1]) / right_n;
        let diff = (left - right).abs();
        if diff > best {
            best = diff;
            best_cut = k;
        }
    }
    AdwinDecision {
        drift: best > lambda,
        cut: Some(best_cut),
        statistic: best,
    }
}

/// Checks every cut of `window` (all observations since the phenomenon began).
/// Fewer than two observations give no decision.
pub fn adwin_check(window: &[f64], lambda: f64) -> AdwinDecision {
    let mut prefix = Vec::with_capacity(window.len() + 1);
    prefix.push(0.0);
    for &x in window {
        prefix.push(prefix.last().unwrap() + x);
    }
    scan(&prefix, lambda, 1)
}

#[derive(Debug, Clone)]
pub struct Adwin {
    lambda: f64,
    stride: usize,
    prefix: Vec<f64>,
    last_cut: Option<u64>,
}

impl Adwin {
    pub fn new(lambda: f64) -> Self {
        Self::with_stride(lambda, 1)
    }

    pub fn with_stride(lambda: f64, stride: usize) -> Self {
        Self {
            lambda,
            stride: stride.max(1),
            prefix: vec![0.0],
            last_cut: None,
        }
    }

    /// Observations buffered since the phenomenon began.
    pub fn buffered(&self) -> usize {
        self.prefix.len() - 1
    }

    /// Stream timestamp of the cut behind the most recent drift.
    pub fn last_cut(&self) -> Option<u64> {
        self.last_cut
    }
}

impl Detector for Adwin {
    fn kind(&self) -> DetectorKind {
        DetectorKind::Adwin
    }

    fn observe(&mut self, obs: Observation) -> Result<Option<Decision>> {
        self.prefix.push(self.prefix.last().unwrap() + obs.value);
        if self.buffered() < 2 {
            return Ok(None);
        }
        let start = obs.timestamp + 1 - self.buffered() as u64;
        let decision = scan(&self.prefix, self.lambda, self.stride);
        if decision.drift {
            self.prefix.truncate(1);
            self.last_cut = decision.cut.map(|k| start + k as u64);
        }
        Ok(Some(Decision {
            timestamp: obs.timestamp,
            statistic: decision.statistic,
            threshold: self.lambda,
            drift: decision.drift,
        }))
    }

    /// The comparison has no learned parameters: both means are recomputed
    /// from the raw buffer at every step.
    fn model_state(&self) -> Value {
        Value::Null
    }

    fn reset(&mut self) {
        self.prefix.truncate(1);
    }
}
