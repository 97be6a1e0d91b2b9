//! Observations, fixed-length windowing and synthetic stream generators.
//!
//! Generators draw from [`ChaCha8Rng`] seeded with `seed_from_u64`, and Gaussian
//! samples come from `rand_distr::StandardNormal` (ziggurat), scaled and shifted
//! per segment. Both algorithms are pinned by the crate versions in `Cargo.lock`,
//! so a given seed reproduces the same stream on every machine.

use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A single scalar sample `x(k)` at index `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    #[serde(rename = "t")]
    pub timestamp: u64,
    #[serde(rename = "x")]
    pub value: f64,
}

impl Observation {
    pub fn new(timestamp: u64, value: f64) -> Self {
        Self { timestamp, value }
    }
}

/// Builds a stream with timestamps `0, 1, 2, ...` from raw values.
pub fn from_values<I: IntoIterator<Item = f64>>(values: I) -> Vec<Observation> {
    values
        .into_iter()
        .enumerate()
        .map(|(k, v)| Observation::new(k as u64, v))
        .collect()
}

/// The `index`-th block of `len` consecutive observations.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamWindow {
    pub index: usize,
    pub values: Vec<f64>,
}

impl StreamWindow {
    pub fn new(index: usize, values: Vec<f64>) -> Self {
        Self { index, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Stream timestamp of the first observation in the window.
    pub fn start_timestamp(&self) -> u64 {
        (self.index * self.values.len()) as u64
    }

    /// Stream timestamp of the last observation in the window.
    pub fn end_timestamp(&self) -> u64 {
        self.start_timestamp() + self.values.len().saturating_sub(1) as u64
    }
}

/// Pull-based windowing adapter over any observation iterator.
///
/// Yields only full windows. Whatever is left over once the source is
/// exhausted is available from [`Windows::remainder`].
#[derive(Debug)]
pub struct Windows<I> {
    source: I,
    n: usize,
    next_index: usize,
    pending: Vec<Observation>,
}

impl<I: Iterator<Item = Observation>> Windows<I> {
    pub fn new(source: I, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("window length n must be at least 1"));
        }
        Ok(Self {
            source,
            n,
            next_index: 0,
            pending: Vec::with_capacity(n),
        })
    }

    /// Observations consumed but not yet part of a full window.
    pub fn remainder(&self) -> &[Observation] {
        &self.pending
    }
}

impl<I: Iterator<Item = Observation>> Iterator for Windows<I> {
    type Item = StreamWindow;

    fn next(&mut self) -> Option<StreamWindow> {
        while self.pending.len() < self.n {
            self.pending.push(self.source.next()?);
        }
        let values = self.pending.drain(..).map(|o| o.value).collect();
        let window = StreamWindow::new(self.next_index, values);
        self.next_index += 1;
        Some(window)
    }
}

/// Full windows plus the trailing partial block.
#[derive(Debug, Clone, PartialEq)]
pub struct Windowed {
    pub windows: Vec<StreamWindow>,
    pub remainder: Vec<Observation>,
}

/// Slices `stream` into `floor(len / n)` non-overlapping windows.
pub fn window_stream(stream: &[Observation], n: usize) -> Result<Windowed> {
    let mut it = Windows::new(stream.iter().copied(), n)?;
    let windows = it.by_ref().collect();
    Ok(Windowed {
        windows,
        remainder: it.remainder().to_vec(),
    })
}

/// Timestamps where the generating process changed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub drift_points: Vec<u64>,
}

impl GroundTruth {
    /// Validates that points are strictly increasing and inside `[0, stream_len)`.
    pub fn new(drift_points: Vec<u64>, stream_len: u64) -> Result<Self> {
        let truth = Self { drift_points };
        truth.validate(stream_len)?;
        Ok(truth)
    }

    pub fn validate(&self, stream_len: u64) -> Result<()> {
        if self.drift_points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "drift points must be strictly increasing".into(),
            ));
        }
        if let Some(&last) = self.drift_points.last() {
            if last >= stream_len {
                return Err(Error::InvalidInput(format!(
                    "drift point {last} lies outside a stream of length {stream_len}"
                )));
            }
        }
        Ok(())
    }
}

/// One stationary Gaussian stretch of a piecewise stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub length: usize,
    pub mean: f64,
    pub stddev: f64,
}

impl Segment {
    pub fn new(length: usize, mean: f64, stddev: f64) -> Self {
        Self {
            length,
            mean,
            stddev,
        }
    }
}

impl FromStr for Segment {
    type Err = Error;

    /// Parses `length:mean:stddev`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() != 3 {
            return Err(invalid(format!(
                "segment `{s}` must have the form length:mean:stddev"
            )));
        }
        let length = parts[0]
            .parse()
            .map_err(|_| invalid(format!("bad segment length `{}`", parts[0])))?;
        let mean = parts[1]
            .parse()
            .map_err(|_| invalid(format!("bad segment mean `{}`", parts[1])))?;
        let stddev = parts[2]
            .parse()
            .map_err(|_| invalid(format!("bad segment stddev `{}`", parts[2])))?;
        Ok(Segment::new(length, mean, stddev))
    }
}

/// Parses a comma-separated list of `length:mean:stddev` segments.
pub fn parse_segments(s: &str) -> Result<Vec<Segment>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// Concatenated Gaussian segments; the ground truth holds the first timestamp
/// of every segment after the first.
pub fn generate_piecewise_gaussian(
    segments: &[Segment],
    seed: u64,
) -> Result<(Vec<Observation>, GroundTruth)> {
    if segments.is_empty() {
        return Err(invalid("at least one segment is required"));
    }
    for seg in segments {
        if seg.length == 0 {
            return Err(invalid("segment length must be at least 1"));
        }
        if !(seg.stddev >= 0.0 && seg.stddev.is_finite()) || !seg.mean.is_finite() {
            return Err(invalid(format!(
                "segment mean must be finite and stddev finite and non-negative, got {seg:?}"
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: usize = segments.iter().map(|s| s.length).sum();
    let mut values = Vec::with_capacity(total);
    let mut drift_points = Vec::with_capacity(segments.len() - 1);
    for (i, seg) in segments.iter().enumerate() {
        if i > 0 {
            drift_points.push(values.len() as u64);
        }
        for _ in 0..seg.length {
            let z: f64 = StandardNormal.sample(&mut rng);
            values.push(seg.mean + seg.stddev * z);
        }
    }
    Ok((from_values(values), GroundTruth { drift_points }))
}

/// Lorenz system coefficients `(sigma, rho, beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorenzParams {
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
}

impl Default for LorenzParams {
    /// The classical chaotic regime.
    fn default() -> Self {
        Self {
            sigma: 10.0,
            rho: 28.0,
            beta: 8.0 / 3.0,
        }
    }
}

impl LorenzParams {
    fn derivative(&self, s: [f64; 3]) -> [f64; 3] {
        let [x, y, z] = s;
        [
            self.sigma * (y - x),
            x * (self.rho - z) - y,
            x * y - self.beta * z,
        ]
    }
}

pub const DEFAULT_LORENZ_DT: f64 = 0.01;

fn axpy(s: [f64; 3], h: f64, d: [f64; 3]) -> [f64; 3] {
    [s[0] + h * d[0], s[1] + h * d[1], s[2] + h * d[2]]
}

fn rk4_step(params: &LorenzParams, s: [f64; 3], dt: f64) -> [f64; 3] {
    let k1 = params.derivative(s);
    let k2 = params.derivative(axpy(s, dt / 2.0, k1));
    let k3 = params.derivative(axpy(s, dt / 2.0, k2));
    let k4 = params.derivative(axpy(s, dt, k3));
    let mut out = s;
    for i in 0..3 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// x-coordinate of the Lorenz flow integrated with fixed-step RK4.
///
/// The first sample is the initial state; every following sample is taken
/// after one more step of size `dt`.
pub fn generate_lorenz(
    count: usize,
    dt: f64,
    initial: [f64; 3],
    params: LorenzParams,
) -> Result<Vec<Observation>> {
    if count == 0 {
        return Err(invalid("count must be at least 1"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid(format!("dt must be positive and finite, got {dt}")));
    }
    if initial.iter().any(|v| !v.is_finite()) {
        return Err(invalid(format!(
            "initial state must be finite, got {initial:?}"
        )));
    }
    let mut state = initial;
    let mut xs = Vec::with_capacity(count);
    xs.push(state[0]);
    for _ in 1..count {
        state = rk4_step(&params, state, dt);
        xs.push(state[0]);
    }
    Ok(from_values(xs))
}

/// Iterates `x_{k+1} = r * x_k * (1 - x_k)` from `x0`.
pub fn generate_logistic_map(count: usize, r: f64, x0: f64) -> Result<Vec<Observation>> {
    if count == 0 {
        return Err(invalid("count must be at least 1"));
    }
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(invalid(format!("x0 must lie in (0, 1), got {x0}")));
    }
    if !r.is_finite() {
        return Err(invalid(format!("r must be finite, got {r}")));
    }
    let xs = std::iter::successors(Some(x0), |&x| Some(r * x * (1.0 - x))).take(count);
    Ok(from_values(xs))
}
