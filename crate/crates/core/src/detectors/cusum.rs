//! Cumulative sum over raw observations.

use serde_json::json;

use super::{Decision, Detector, DetectorKind};
use crate::error::Result;
use crate::stream::Observation;

/// One CUSUM update from `g_prev`.
///
/// Positive mode: `g = max(0, g_prev + x)`, drift iff `g >= lambda`.
/// Negative mode: `g = min(0, g_prev + x)`, drift iff `g <= -lambda`.
/// The caller restarts from zero after a drift.
pub fn cusum_step(g_prev: f64, x: f64, lambda: f64, negative_mode: bool) -> (f64, bool) {
    if negative_mode {
        let g = (g_prev + x).min(0.0);
        (g, g <= -lambda)
    } else {
        let g = (g_prev + x).max(0.0);
        (g, g >= lambda)
    }
}

#[derive(Debug, Clone)]
pub struct Cusum {
    lambda: f64,
    negative_mode: bool,
    g: f64,
}

impl Cusum {
    pub fn new(lambda: f64, negative_mode: bool) -> Self {
        Self {
            lambda,
            negative_mode,
            g: 0.0,
        }
    }

    pub fn statistic(&self) -> f64 {
        self.g
    }
}

impl Detector for Cusum {
    fn kind(&self) -> DetectorKind {
        DetectorKind::Cusum
    }

    fn observe(&mut self, obs: Observation) -> Result<Option<Decision>> {
        let (g, drift) = cusum_step(self.g, obs.value, self.lambda, self.negative_mode);
        self.g = if drift { 0.0 } else { g };
        Ok(Some(Decision {
            timestamp: obs.timestamp,
            statistic: g,
            threshold: if self.negative_mode {
                -self.lambda
            } else {
                self.lambda
            },
            drift,
        }))
    }

    fn model_state(&self) -> serde_json::Value {
        json!({ "g": self.g })
    }

    fn reset(&mut self) {
        self.g = 0.0;
    }
}
