//! Delay-coordinate phase-space reconstruction.
//!
//! A window `x_0 .. x_{n-1}` (window-local indices) embedded with dimension `m`
//! and delay `tau` yields `N = n - (m - 1) * tau` states
//! `rho_k = (x_k, x_{k+tau}, ..., x_{k+(m-1)tau})`. Distances are Euclidean.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::stream::StreamWindow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EmbeddingParams {
    pub m: usize,
    pub tau: usize,
}

impl EmbeddingParams {
    pub fn new(m: usize, tau: usize) -> Result<Self> {
        let p = Self { m, tau };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.tau == 0 {
            return Err(invalid(format!(
                "embedding needs m >= 1 and tau >= 1, got m = {}, tau = {}",
                self.m, self.tau
            )));
        }
        Ok(())
    }

    /// Smallest window length that yields at least one state.
    pub fn min_window_len(&self) -> usize {
        (self.m - 1) * self.tau + 1
    }

    /// Number of states produced from a window of length `n`, if any.
    pub fn state_count(&self, n: usize) -> Option<usize> {
        n.checked_sub((self.m - 1) * self.tau).filter(|&c| c > 0)
    }
}

impl Default for EmbeddingParams {
    fn default() -> Self {
        Self { m: 2, tau: 8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub coords: Vec<f64>,
    /// Window-local index `k` of the first coordinate.
    pub origin_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpace {
    params: EmbeddingParams,
    states: Vec<PhaseState>,
}

impl PhaseSpace {
    /// Wraps pre-built states; every state must have `params.m` coordinates.
    pub fn from_states(params: EmbeddingParams, states: Vec<PhaseState>) -> Result<Self> {
        params.validate()?;
        if states.is_empty() {
            return Err(Error::InsufficientStates {
                got: 0,
                required: 1,
            });
        }
        if let Some(bad) = states.iter().find(|s| s.coords.len() != params.m) {
            return Err(invalid(format!(
                "state at origin {} has {} coordinates, expected {}",
                bad.origin_index,
                bad.coords.len(),
                params.m
            )));
        }
        Ok(Self { params, states })
    }

    pub fn params(&self) -> EmbeddingParams {
        self.params
    }

    pub fn states(&self) -> &[PhaseState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Reorders states so that position `i` holds the old state `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        let is_permutation = order.len() == self.len()
            && order
                .iter()
                .all(|&i| i < seen.len() && !std::mem::replace(&mut seen[i], true));
        if !is_permutation {
            return Err(invalid("order must be a permutation of the state indices"));
        }
        Ok(Self {
            params: self.params,
            states: order.iter().map(|&i| self.states[i].clone()).collect(),
        })
    }
}

/// Embeds the values of `window` using window-local indices.
pub fn embed(window: &StreamWindow, params: EmbeddingParams) -> Result<PhaseSpace> {
    embed_values(&window.values, params)
}

pub fn embed_values(values: &[f64], params: EmbeddingParams) -> Result<PhaseSpace> {
    params.validate()?;
    let n = values.len();
    let count = params.state_count(n).ok_or(Error::WindowTooShort {
        n,
        minimum: params.min_window_len(),
    })?;
    let states = (0..count)
        .map(|k| PhaseState {
            coords: (0..params.m).map(|j| values[k + j * params.tau]).collect(),
            origin_index: k,
        })
        .collect();
    Ok(PhaseSpace { params, states })
}

/// Regression view of a phase space: the first `m - 1` coordinates of each
/// state are the input, the last coordinate the output.
#[derive(Debug, Clone, PartialEq)]
pub struct SupervisedPairs {
    pub inputs: Vec<Vec<f64>>,
    pub outputs: Vec<f64>,
}

impl SupervisedPairs {
    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    /// Reassembles the `k`-th state from its input and output.
    pub fn join(&self, k: usize) -> Vec<f64> {
        let mut coords = self.inputs[k].clone();
        coords.push(self.outputs[k]);
        coords
    }
}

pub fn to_supervised(space: &PhaseSpace) -> Result<SupervisedPairs> {
    if space.params.m < 2 {
        return Err(Error::NoOutputDimension);
    }
    let (inputs, outputs) = space
        .states
        .iter()
        .map(|s| {
            let (input, output) = s.coords.split_at(s.coords.len() - 1);
            (input.to_vec(), output[0])
        })
        .unzip();
    Ok(SupervisedPairs { inputs, outputs })
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Neighbour count `ceil(ln N)`, clamped to `[1, N - 1]`.
pub fn neighbor_count(n_states: usize) -> usize {
    let k = (n_states as f64).ln().ceil() as usize;
    k.clamp(1, n_states.saturating_sub(1).max(1))
}

/// Mean, over all states, of the distance to the `ceil(ln N)`-th nearest
/// other state (the largest distance among its nearest neighbours).
pub fn adaptive_radius(space: &PhaseSpace) -> Result<f64> {
    let states: Vec<&[f64]> = space.states.iter().map(|s| s.coords.as_slice()).collect();
    adaptive_radius_of(&states)
}

pub(crate) fn adaptive_radius_of(states: &[&[f64]]) -> Result<f64> {
    let n = states.len();
    if n < 2 {
        return Err(Error::InsufficientStates {
            got: n,
            required: 2,
        });
    }
    let k = neighbor_count(n);
    let mut dists = Vec::with_capacity(n - 1);
    let mut total = 0.0;
    for (i, a) in states.iter().enumerate() {
        dists.clear();
        dists.extend(
            states
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, b)| euclidean(a, b)),
        );
        let (_, kth, _) = dists.select_nth_unstable_by(k - 1, f64::total_cmp);
        total += *kth;
    }
    Ok(total / n as f64)
}

/// Cross-recurrence matrix between two phase spaces; entry `(a, b)` marks
/// state `a` of the first space and state `b` of the second as neighbours.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceMatrix {
    size: usize,
    entries: Vec<bool>,
}

impl RecurrenceMatrix {
    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut entries = Vec::with_capacity(size * size);
        for a in 0..size {
            for b in 0..size {
                entries.push(f(a, b));
            }
        }
        Self { size, entries }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, a: usize, b: usize) -> bool {
        self.entries[a * self.size + b]
    }

    pub fn count_ones(&self) -> usize {
        self.entries.iter().filter(|&&e| e).count()
    }
}

/// Marks `(a, b)` when `dist(rho_a, rho_b) <= radius`.
///
/// The boundary is included so exact ties (identical states at radius zero)
/// still count as neighbours.
pub fn neighbors_within(
    space_a: &PhaseSpace,
    space_b: &PhaseSpace,
    radius: f64,
) -> Result<RecurrenceMatrix> {
    if space_a.params != space_b.params {
        return Err(Error::IncompatibleSpaces(format!(
            "embedding parameters differ: {:?} vs {:?}",
            space_a.params, space_b.params
        )));
    }
    if space_a.len() != space_b.len() {
        return Err(Error::IncompatibleSpaces(format!(
            "state counts differ: {} vs {}",
            space_a.len(),
            space_b.len()
        )));
    }
    if radius.is_nan() || radius < 0.0 {
        return Err(invalid(format!(
            "radius must be non-negative, got {radius}"
        )));
    }
    Ok(RecurrenceMatrix::from_fn(space_a.len(), |a, b| {
        euclidean(&space_a.states[a].coords, &space_b.states[b].coords) <= radius
    }))
}
