//! Scoring detector output against ground truth.
//!
//! Each true drift `d` claims the first event in `[d, next drift)` (or up to
//! the end of the stream for the last drift). Every event that is not claimed
//! is a false alarm. From that matching:
//!
//! - MTD: mean of `detection - d` over claimed drifts
//! - MDR: fraction of true drifts with no claimed event
//! - MTBFA: mean gap between consecutive false alarms; with fewer than two
//!   false alarms it is censored at the stream length

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indicator::DriftEvent;
use crate::stream::GroundTruth;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DriftMatch {
    pub truth: u64,
    pub detection: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub mtbfa: f64,
    /// `mtbfa` is the stream length because at most one false alarm occurred.
    pub mtbfa_censored: bool,
    /// `None` when no drift was detected.
    pub mtd: Option<f64>,
    pub mdr: f64,
    pub matched: usize,
    pub false_alarms: usize,
    pub per_drift: Vec<DriftMatch>,
}

pub const CSV_HEADER: &str = "detector,mtbfa,mtbfa_censored,mtd,mdr,matched,false_alarms";

impl EvaluationReport {
    /// One row under [`CSV_HEADER`]; an undefined MTD is left empty.
    pub fn csv_row(&self, detector: &str) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            detector,
            self.mtbfa,
            self.mtbfa_censored,
            self.mtd.map(|v| v.to_string()).unwrap_or_default(),
            self.mdr,
            self.matched,
            self.false_alarms
        )
    }
}

pub fn evaluate(
    events: &[DriftEvent],
    truth: &GroundTruth,
    stream_len: u64,
) -> Result<EvaluationReport> {
    let times: Vec<u64> = events.iter().map(|e| e.timestamp).collect();
    evaluate_timestamps(&times, truth, stream_len)
}

/// [`evaluate`] on bare event timestamps.
pub fn evaluate_timestamps(
    times: &[u64],
    truth: &GroundTruth,
    stream_len: u64,
) -> Result<EvaluationReport> {
    truth.validate(stream_len)?;
    if times.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidInput(
            "events must be sorted by timestamp".into(),
        ));
    }
    if let Some(&t) = times.iter().find(|&&t| t >= stream_len) {
        return Err(Error::InvalidInput(format!(
            "event at t={t} lies outside a stream of length {stream_len}"
        )));
    }

    let points = &truth.drift_points;
    let mut claimed = vec![false; times.len()];
    let mut per_drift = Vec::with_capacity(points.len());
    for (i, &d) in points.iter().enumerate() {
        let end = points.get(i + 1).copied().unwrap_or(stream_len);
        let first = times.partition_point(|&t| t < d);
        let detection = (first < times.len() && times[first] < end).then(|| {
            claimed[first] = true;
            times[first]
        });
        per_drift.push(DriftMatch {
            truth: d,
            detection,
        });
    }

    let delays: Vec<f64> = per_drift
        .iter()
        .filter_map(|m| m.detection.map(|t| (t - m.truth) as f64))
        .collect();
    let matched = delays.len();
    let mtd = (matched > 0).then(|| delays.iter().sum::<f64>() / matched as f64);
    let mdr = if points.is_empty() {
        0.0
    } else {
        (points.len() - matched) as f64 / points.len() as f64
    };

    let false_times: Vec<u64> = times
        .iter()
        .zip(&claimed)
        .filter(|(_, &c)| !c)
        .map(|(&t, _)| t)
        .collect();
    let (mtbfa, mtbfa_censored) = match false_times.as_slice() {
        [first, .., last] => (
            (last - first) as f64 / (false_times.len() - 1) as f64,
            false,
        ),
        _ => (stream_len as f64, true),
    };

    Ok(EvaluationReport {
        mtbfa,
        mtbfa_censored,
        mtd,
        mdr,
        matched,
        false_alarms: false_times.len(),
        per_drift,
    })
}
