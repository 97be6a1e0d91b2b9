//! Streaming concept-drift detection.
//!
//! A stream of scalar observations is cut into fixed-length, non-overlapping
//! windows. Each detector extracts features from observations or windows and
//! compares them against what it has learned about the current phenomenon,
//! issuing a [`DriftEvent`] when the comparison crosses its threshold and
//! starting over from a fresh state.
//!
//! Modules:
//! - [`stream`]: observations, windowing and synthetic generators
//! - [`io`]: CSV / JSONL readers and writers
//! - [`embedding`]: delay-coordinate phase-space reconstruction
//! - [`indicator`]: the generic mean/deviation band indicator
//! - [`detectors`]: CUSUM, Page-Hinkley, ADWIN, UDFT and CRCDD
//! - [`compliance`]: the R1-R4 requirement ledger and behavioural probes
//! - [`metrics`]: MTBFA / MTD / MDR scoring against ground truth
//! - [`config`]: flat key/value run configuration

pub mod compliance;
pub mod config;
pub mod detectors;
pub mod embedding;
mod error;
pub mod indicator;
pub mod io;
pub mod metrics;
pub mod stream;

pub use detectors::{Detector, DetectorConfig, DetectorKind};
pub use embedding::{EmbeddingParams, PhaseSpace, PhaseState};
pub use error::{Error, Result};
pub use indicator::{DriftEvent, FeatureHistory, FeatureVector, IndicatorConfig};
pub use metrics::EvaluationReport;
pub use stream::{GroundTruth, Observation, StreamWindow};
