//! Unidimensional Fourier features and consecutive-window comparison.
//!
//! A window `x_0 .. x_{n-1}` is summarised by the one-sided coefficients
//!
//! ```text
//! c_j = (eps_j / n) * sum_k x_k * exp(-i * 2 pi * j * k / D),   0 <= j <= floor((n - 1) / 2)
//! ```
//!
//! with `eps_0 = 1`, `eps_j = 2` otherwise. The default denominator is
//! `D = n` (the ordinary DFT). [`DftDenominator::Literal`] uses `D = n - 1`;
//! there the last sample always lands on phase zero, so a constant window leaks
//! `2c / n` into every `c_j` with `j >= 1`.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Decision, Detector, DetectorKind};
use crate::error::{Error, Result};
use crate::stream::{Observation, StreamWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DftDenominator {
    /// Exponent `2 pi j k / n`.
    #[default]
    Standard,
    /// Exponent `2 pi j k / (n - 1)`.
    Literal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients {
    pub values: Vec<Complex64>,
}

impl FourierCoefficients {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of coefficients kept for a window of length `n`.
    pub fn count_for(n: usize) -> usize {
        n.saturating_sub(1) / 2 + 1
    }

    /// Rebuilds `n` samples from standard-denominator coefficients. Exact for
    /// odd `n`; for even `n` the Nyquist component is not represented.
    pub fn reconstruct(&self, n: usize) -> Vec<f64> {
        let w = 2.0 * std::f64::consts::PI / n as f64;
        (0..n)
            .map(|k| {
                self.values
                    .iter()
                    .enumerate()
                    .map(|(j, c)| (c * Complex64::from_polar(1.0, w * (j * k) as f64)).re)
                    .sum()
            })
            .collect()
    }

    /// Window energy implied by the one-sided coefficients:
    /// `n * (|c_0|^2 + sum_{j>0} |c_j|^2 / 2)`.
    pub fn energy(&self, n: usize) -> f64 {
        let folded: f64 = self.values.iter().skip(1).map(|c| c.norm_sqr()).sum();
        n as f64 * (self.values.first().map_or(0.0, |c| c.norm_sqr()) + folded / 2.0)
    }

    /// L2 distance with real and imaginary parts as separate coordinates.
    pub fn distance(&self, other: &FourierCoefficients) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::IncompatibleFeatures {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

/// Reusable FFT plan for one window length.
#[derive(Clone)]
pub struct FourierPlan {
    n: usize,
    denominator: DftDenominator,
    fft: Option<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for FourierPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierPlan")
            .field("n", &self.n)
            .field("denominator", &self.denominator)
            .finish()
    }
}

impl FourierPlan {
    pub fn new(n: usize, denominator: DftDenominator) -> Self {
        let len = match denominator {
            DftDenominator::Standard => n,
            DftDenominator::Literal => n.saturating_sub(1),
        };
        let fft = (n > 1).then(|| FftPlanner::new().plan_fft_forward(len));
        Self {
            n,
            denominator,
            fft,
        }
    }

    pub fn window_len(&self) -> usize {
        self.n
    }

    /// Coefficients of `values`, which must hold exactly `n` samples.
    pub fn compute(&self, values: &[f64]) -> Result<FourierCoefficients> {
        if values.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "expected a window of {} samples, got {}",
                self.n,
                values.len()
            )));
        }
        let Some(fft) = &self.fft else {
            // n = 1: the single coefficient is the sample itself
            return Ok(FourierCoefficients {
                values: values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            });
        };
        let (head, wrap) = match self.denominator {
            DftDenominator::Standard => (values, 0.0),
            // the sample at k = n - 1 has phase 2 pi j, i.e. zero
            DftDenominator::Literal => (&values[..self.n - 1], values[self.n - 1]),
        };
        let mut buf: Vec<Complex64> = head.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fft.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        let coeffs = (0..FourierCoefficients::count_for(self.n))
            .map(|j| {
                let eps = if j == 0 { 1.0 } else { 2.0 };
                (buf[j] + wrap) * (eps * scale)
            })
            .collect();
        Ok(FourierCoefficients { values: coeffs })
    }
}

/// Standard-denominator coefficients of one window.
pub fn udft_features(window: &StreamWindow) -> FourierCoefficients {
    FourierPlan::new(window.len(), DftDenominator::Standard)
        .compute(&window.values)
        .expect("plan built for this window length")
}

/// Returns `(drift, distance)` with drift iff `||prev - curr||_2 > lambda`.
pub fn udft_step(
    prev: &FourierCoefficients,
    curr: &FourierCoefficients,
    lambda: f64,
) -> Result<(bool, f64)> {
    let d = prev.distance(curr)?;
    Ok((d > lambda, d))
}

#[derive(Debug, Clone)]
pub struct Udft {
    lambda: f64,
    plan: FourierPlan,
    buffer: Vec<f64>,
    prev: Option<FourierCoefficients>,
}

impl Udft {
    pub fn new(lambda: f64, n: usize, denominator: DftDenominator) -> Self {
        Self {
            lambda,
            plan: FourierPlan::new(n, denominator),
            buffer: Vec::with_capacity(n),
            prev: None,
        }
    }
}

impl Detector for Udft {
    fn kind(&self) -> DetectorKind {
        DetectorKind::Udft
    }

    fn observe(&mut self, obs: Observation) -> Result<Option<Decision>> {
        self.buffer.push(obs.value);
        if self.buffer.len() < self.plan.window_len() {
            return Ok(None);
        }
        let curr = self.plan.compute(&self.buffer)?;
        self.buffer.clear();
        let Some(prev) = self.prev.take() else {
            self.prev = Some(curr);
            return Ok(None);
        };
        let (drift, distance) = udft_step(&prev, &curr, self.lambda)?;
        self.prev = (!drift).then_some(curr);
        Ok(Some(Decision {
            timestamp: obs.timestamp,
            statistic: distance,
            threshold: self.lambda,
            drift,
        }))
    }

    fn model_state(&self) -> serde_json::Value {
        match &self.prev {
            None => serde_json::Value::Null,
            Some(c) => json!(c.values.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()),
        }
    }

    fn reset(&mut self) {
        self.buffer.clear();
        self.prev = None;
    }
}
