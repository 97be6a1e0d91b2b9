//! The generic band indicator.
//!
//! Past feature vectors are summarised by their per-coordinate mean and
//! population standard deviation. The current vector drifts when any
//! coordinate leaves the band `mu +- eta * sigma` by more than `lambda`.
//! A drift restarts the summary from the current vector; otherwise the
//! summary either absorbs the current vector or is replaced by it.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A detection issued by some detector at stream timestamp `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftEvent {
    #[serde(rename = "t")]
    pub timestamp: u64,
    pub detector: String,
    #[serde(rename = "stat")]
    pub statistic: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub window_index: usize,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, window_index: usize) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("feature values must be finite"));
        }
        Ok(Self {
            values,
            window_index,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Running summary of the features aggregated since window `start`.
///
/// Moments are kept with Welford's update, which agrees with a batch
/// recomputation to rounding error.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureHistory {
    start: usize,
    count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl FeatureHistory {
    /// A history holding only `first`.
    pub fn seed(first: &FeatureVector) -> Self {
        Self {
            start: first.window_index,
            count: 1,
            mean: first.values.clone(),
            m2: vec![0.0; first.dim()],
        }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Population standard deviation; zero for a single aggregated vector.
    pub fn stddev(&self) -> Vec<f64> {
        self.m2
            .iter()
            .map(|m2| (m2 / self.count as f64).max(0.0).sqrt())
            .collect()
    }

    /// Absorbs `v` into the summary.
    pub fn absorb(&mut self, v: &FeatureVector) -> Result<()> {
        self.check_dim(v)?;
        self.count += 1;
        let n = self.count as f64;
        for ((mean, m2), x) in self.mean.iter_mut().zip(&mut self.m2).zip(&v.values) {
            let delta = x - *mean;
            *mean += delta / n;
            *m2 += delta * (x - *mean);
        }
        Ok(())
    }

    fn check_dim(&self, v: &FeatureVector) -> Result<()> {
        if v.dim() != self.dim() {
            return Err(Error::IncompatibleFeatures {
                expected: self.dim(),
                got: v.dim(),
            });
        }
        Ok(())
    }

    /// Largest excursion of `v` outside the `mu +- eta * sigma` band over all
    /// coordinates; positive values lie outside the band.
    pub fn band_excess(&self, v: &FeatureVector, eta: f64) -> Result<f64> {
        self.check_dim(v)?;
        let sd = self.stddev();
        Ok(v.values
            .iter()
            .zip(&self.mean)
            .zip(&sd)
            .map(|((x, mu), s)| {
                let upper = x - (mu + eta * s);
                let lower = (mu - eta * s) - x;
                upper.max(lower)
            })
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Euclidean distance between `v` and the aggregated mean.
    pub fn divergence(&self, v: &FeatureVector) -> Result<f64> {
        self.check_dim(v)?;
        Ok(v.values
            .iter()
            .zip(&self.mean)
            .map(|(x, mu)| (x - mu) * (x - mu))
            .sum::<f64>()
            .sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorConfig {
    pub lambda: f64,
    pub eta: f64,
    /// `true` absorbs each non-drifting vector into the history; `false`
    /// replaces the history with it.
    pub accumulate: bool,
}

impl IndicatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(invalid(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(invalid(format!("eta must be >= 0, got {}", self.eta)));
        }
        Ok(())
    }
}

/// Outcome of comparing one feature vector against the history.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub drift: bool,
    /// Band excess of the current vector; drift iff it exceeds `lambda`.
    pub statistic: f64,
    pub updated: FeatureHistory,
}

/// Compares `current` against `history` and returns the next history.
pub fn evaluate(
    history: &FeatureHistory,
    current: &FeatureVector,
    cfg: &IndicatorConfig,
) -> Result<Evaluation> {
    let statistic = history.band_excess(current, cfg.eta)?;
    let drift = statistic > cfg.lambda;
    let updated = if drift || !cfg.accumulate {
        FeatureHistory::seed(current)
    } else {
        let mut h = history.clone();
        h.absorb(current)?;
        h
    };
    Ok(Evaluation {
        drift,
        statistic,
        updated,
    })
}

/// `||v_t - mu_[s,t)||_2` for each aligned (history snapshot, feature) pair.
pub fn convergence_trace(
    histories: &[FeatureHistory],
    features: &[FeatureVector],
) -> Result<Vec<f64>> {
    histories
        .iter()
        .zip(features)
        .map(|(h, v)| h.divergence(v))
        .collect()
}

/// One step of a running [`Indicator`].
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorStep {
    pub drift: bool,
    pub statistic: f64,
    /// Distance from the current vector to the pre-update mean.
    pub divergence: f64,
}

/// Single-stream owner of a feature history.
#[derive(Debug, Clone)]
pub struct Indicator {
    cfg: IndicatorConfig,
    history: Option<FeatureHistory>,
}

impl Indicator {
    pub fn new(cfg: IndicatorConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg, history: None })
    }

    pub fn history(&self) -> Option<&FeatureHistory> {
        self.history.as_ref()
    }

    /// The first vector only seeds the history and yields `None`.
    pub fn observe(&mut self, v: &FeatureVector) -> Result<Option<IndicatorStep>> {
        let Some(history) = self.history.as_ref() else {
            self.history = Some(FeatureHistory::seed(v));
            return Ok(None);
        };
        let divergence = history.divergence(v)?;
        let eval = evaluate(history, v, &self.cfg)?;
        self.history = Some(eval.updated);
        Ok(Some(IndicatorStep {
            drift: eval.drift,
            statistic: eval.statistic,
            divergence,
        }))
    }
}
