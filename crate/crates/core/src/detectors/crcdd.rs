//! Cross-recurrence comparison of consecutive phase spaces.
//!
//! Each window is embedded, and the cross-recurrence matrix between the
//! previous and current phase spaces is built with the adaptive radius of the
//! union of both state sets. The statistic is the maximum diagonal length
//! (MDL): the longest run of consecutive neighbours along any diagonal.
//!
//! A long diagonal means the two windows trace the same trajectories, so the
//! default polarity fires when the MDL drops to `lambda` or below.
//! [`CrcddPolarity::Literal`] fires on `MDL > lambda` instead.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Decision, Detector, DetectorKind};
use crate::embedding::{
    adaptive_radius_of, embed_values, neighbors_within, EmbeddingParams, PhaseSpace,
    RecurrenceMatrix,
};
use crate::error::{Error, Result};
use crate::stream::Observation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrcddPolarity {
    /// Drift iff `mdl <= lambda`.
    #[default]
    Dissimilarity,
    /// Drift iff `mdl > lambda`.
    Literal,
}

impl CrcddPolarity {
    pub fn fires(self, mdl: usize, lambda: f64) -> bool {
        match self {
            CrcddPolarity::Dissimilarity => (mdl as f64) <= lambda,
            CrcddPolarity::Literal => (mdl as f64) > lambda,
        }
    }
}

/// Longest run of `true` along any diagonal of constant `b - a`, the main
/// diagonal included.
pub fn max_diagonal_length(r: &RecurrenceMatrix) -> usize {
    let n = r.size();
    let mut best = 0;
    for offset in 0..n {
        // upper (b = a + offset) and lower (a = b + offset) diagonals
        for lower in [false, true] {
            if lower && offset == 0 {
                continue;
            }
            let mut run = 0;
            for i in 0..n - offset {
                let hit = if lower {
                    r.get(i + offset, i)
                } else {
                    r.get(i, i + offset)
                };
                run = if hit { run + 1 } else { 0 };
                best = best.max(run);
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrcddDecision {
    pub drift: bool,
    pub mdl: usize,
    pub radius: f64,
}

/// Compares two phase spaces of equal size and embedding.
pub fn crcdd_step(
    prev: &PhaseSpace,
    curr: &PhaseSpace,
    lambda: f64,
    polarity: CrcddPolarity,
) -> Result<CrcddDecision> {
    if prev.params() != curr.params() || prev.len() != curr.len() {
        return Err(Error::IncompatibleSpaces(format!(
            "{} states {:?} vs {} states {:?}",
            prev.len(),
            prev.params(),
            curr.len(),
            curr.params()
        )));
    }
    let union: Vec<&[f64]> = prev
        .states()
        .iter()
        .chain(curr.states())
        .map(|s| s.coords.as_slice())
        .collect();
    let radius = adaptive_radius_of(&union)?;
    let r = neighbors_within(prev, curr, radius)?;
    let mdl = max_diagonal_length(&r);
    Ok(CrcddDecision {
        drift: polarity.fires(mdl, lambda),
        mdl,
        radius,
    })
}

#[derive(Debug, Clone)]
pub struct Crcdd {
    lambda: f64,
    n: usize,
    params: EmbeddingParams,
    polarity: CrcddPolarity,
    buffer: Vec<f64>,
    prev: Option<PhaseSpace>,
}

impl Crcdd {
    pub fn new(lambda: f64, n: usize, params: EmbeddingParams, polarity: CrcddPolarity) -> Self {
        Self {
            lambda,
            n,
            params,
            polarity,
            buffer: Vec::with_capacity(n),
            prev: None,
        }
    }
}

impl Detector for Crcdd {
    fn kind(&self) -> DetectorKind {
        DetectorKind::Crcdd
    }

    fn observe(&mut self, obs: Observation) -> Result<Option<Decision>> {
        self.buffer.push(obs.value);
        if self.buffer.len() < self.n {
            return Ok(None);
        }
        let curr = embed_values(&self.buffer, self.params)?;
        self.buffer.clear();
        let Some(prev) = self.prev.take() else {
            self.prev = Some(curr);
            return Ok(None);
        };
        let decision = crcdd_step(&prev, &curr, self.lambda, self.polarity)?;
        self.prev = (!decision.drift).then_some(curr);
        Ok(Some(Decision {
            timestamp: obs.timestamp,
            statistic: decision.mdl as f64,
            threshold: self.lambda,
            drift: decision.drift,
        }))
    }

    fn model_state(&self) -> serde_json::Value {
        match &self.prev {
            None => serde_json::Value::Null,
            Some(p) => json!(p
                .states()
                .iter()
                .map(|s| s.coords.clone())
                .collect::<Vec<_>>()),
        }
    }

    fn reset(&mut self) {
        self.buffer.clear();
        self.prev = None;
    }
}
