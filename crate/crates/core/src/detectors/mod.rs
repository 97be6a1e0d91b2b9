//! The five streaming detectors behind one contract.
//!
//! CUSUM, Page-Hinkley and ADWIN decide on every observation. UDFT and CRCDD
//! collect fixed-length windows and decide at the last observation of each
//! window after the first. Every detector returns to its freshly-constructed
//! state after a drift, so post-drift decisions depend only on post-drift
//! observations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingParams;
use crate::error::{invalid, Error, Result};
use crate::indicator::DriftEvent;
use crate::stream::Observation;

pub mod adwin;
pub mod crcdd;
pub mod cusum;
pub mod pht;
pub mod udft;

pub use adwin::{adwin_check, Adwin, AdwinDecision};
pub use crcdd::{crcdd_step, max_diagonal_length, Crcdd, CrcddDecision, CrcddPolarity};
pub use cusum::{cusum_step, Cusum};
pub use pht::{pht_step, PageHinkley, PhtState};
pub use udft::{udft_features, udft_step, DftDenominator, FourierCoefficients, FourierPlan, Udft};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorKind {
    Cusum,
    Pht,
    Adwin,
    Udft,
    Crcdd,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 5] = [
        DetectorKind::Cusum,
        DetectorKind::Pht,
        DetectorKind::Adwin,
        DetectorKind::Udft,
        DetectorKind::Crcdd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::Cusum => "cusum",
            DetectorKind::Pht => "pht",
            DetectorKind::Adwin => "adwin",
            DetectorKind::Udft => "udft",
            DetectorKind::Crcdd => "crcdd",
        }
    }

    /// Upper-case label used in tables.
    pub fn label(self) -> &'static str {
        match self {
            DetectorKind::Cusum => "CUSUM",
            DetectorKind::Pht => "PHT",
            DetectorKind::Adwin => "ADWIN",
            DetectorKind::Udft => "UDFT",
            DetectorKind::Crcdd => "CRCDD",
        }
    }

    pub fn is_windowed(self) -> bool {
        matches!(self, DetectorKind::Udft | DetectorKind::Crcdd)
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DetectorKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| invalid(format!("unknown detector `{s}`")))
    }
}

/// Everything needed to build one detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub kind: DetectorKind,
    pub lambda: f64,
    /// Window length for UDFT and CRCDD.
    pub window_n: usize,
    /// Embedding used by CRCDD.
    pub embedding: EmbeddingParams,
    /// CUSUM tracks the running minimum and fires at `-lambda`.
    pub negative_mode: bool,
    /// ADWIN evaluates every `adwin_stride`-th cut.
    pub adwin_stride: usize,
    pub crcdd_polarity: CrcddPolarity,
    pub dft_denominator: DftDenominator,
}

impl DetectorConfig {
    /// Shipped defaults for `kind`, taken from the bundled run configuration.
    pub fn shipped(kind: DetectorKind) -> Self {
        crate::config::RunConfig::shipped().detector(kind)
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(invalid(format!(
                "lambda must be finite and >= 0, got {}",
                self.lambda
            )));
        }
        match self.kind {
            DetectorKind::Adwin if self.adwin_stride == 0 => {
                Err(invalid("adwin stride must be at least 1"))
            }
            DetectorKind::Udft if self.window_n == 0 => {
                Err(invalid("window length n must be at least 1"))
            }
            DetectorKind::Crcdd => {
                self.embedding.validate()?;
                if self.embedding.state_count(self.window_n).is_none() {
                    return Err(Error::WindowTooShort {
                        n: self.window_n,
                        minimum: self.embedding.min_window_len(),
                    });
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn build(&self) -> Result<Box<dyn Detector>> {
        self.validate()?;
        Ok(match self.kind {
            DetectorKind::Cusum => Box::new(Cusum::new(self.lambda, self.negative_mode)),
            DetectorKind::Pht => Box::new(PageHinkley::new(self.lambda)),
            DetectorKind::Adwin => Box::new(Adwin::with_stride(self.lambda, self.adwin_stride)),
            DetectorKind::Udft => {
                Box::new(Udft::new(self.lambda, self.window_n, self.dft_denominator))
            }
            DetectorKind::Crcdd => Box::new(Crcdd::new(
                self.lambda,
                self.window_n,
                self.embedding,
                self.crcdd_polarity,
            )),
        })
    }
}

/// A single decision made by a detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub timestamp: u64,
    pub statistic: f64,
    pub threshold: f64,
    pub drift: bool,
}

impl Decision {
    pub fn event(&self, kind: DetectorKind) -> Option<DriftEvent> {
        self.drift.then(|| DriftEvent {
            timestamp: self.timestamp,
            detector: kind.name().to_string(),
            statistic: self.statistic,
            threshold: self.threshold,
        })
    }
}

/// Streaming contract shared by all detectors.
pub trait Detector: Send {
    fn kind(&self) -> DetectorKind;

    /// Feeds one observation; returns a decision whenever one is made.
    fn observe(&mut self, obs: Observation) -> Result<Option<Decision>>;

    /// Bounded summary the indicator has learned about the current
    /// phenomenon. Raw observation buffers are not part of it.
    fn model_state(&self) -> serde_json::Value;

    /// Returns to the freshly-constructed state.
    fn reset(&mut self);
}

/// Events plus any warnings raised while running a detector over a stream.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutput {
    pub events: Vec<DriftEvent>,
    pub warnings: Vec<String>,
}

/// Runs `cfg` over `stream`, calling `on_decision` for every decision.
pub fn run_detector_with<I, F>(
    cfg: &DetectorConfig,
    stream: I,
    mut on_decision: F,
) -> Result<RunOutput>
where
    I: IntoIterator<Item = Observation>,
    F: FnMut(&Decision),
{
    let mut detector = cfg.build()?;
    let mut out = RunOutput::default();
    let mut seen = 0usize;
    for obs in stream {
        seen += 1;
        if let Some(d) = detector.observe(obs)? {
            on_decision(&d);
            out.events.extend(d.event(cfg.kind));
        }
    }
    if cfg.kind.is_windowed() {
        if seen < cfg.window_n {
            out.warnings.push(format!(
                "{}: stream of {seen} observations is shorter than one window (n = {})",
                cfg.kind, cfg.window_n
            ));
        } else if !seen.is_multiple_of(cfg.window_n) {
            out.warnings.push(format!(
                "{}: {} trailing observations did not fill a window and were not evaluated",
                cfg.kind,
                seen % cfg.window_n
            ));
        }
    }
    Ok(out)
}

pub fn run_detector<I>(cfg: &DetectorConfig, stream: I) -> Result<RunOutput>
where
    I: IntoIterator<Item = Observation>,
{
    run_detector_with(cfg, stream, |_| {})
}

/// Runs several detectors over one shared stream, one thread each.
pub fn run_detectors_parallel(
    cfgs: &[DetectorConfig],
    stream: &[Observation],
) -> Vec<Result<RunOutput>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = cfgs
            .iter()
            .map(|cfg| scope.spawn(move || run_detector(cfg, stream.iter().copied())))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("detector thread panicked"))
            .collect()
    })
}
