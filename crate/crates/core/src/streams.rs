//! Distinct-elements (F0) sketching and the streaming-to-protocol reduction.
//!
//! The sketch is k-minimum-values over a seeded bijective 64-bit hash, so
//! streams with fewer than `k` distinct elements are counted exactly. Its
//! serialized state is `32 + 64k` bits regardless of content: a 32-bit count
//! of held values followed by `k` 64-bit slots, unused slots set to all ones.

use std::collections::{BTreeSet, HashSet};
use std::io::{BufRead, Read, Write};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::problem::{GhdParams, Problem};
use crate::protocols::{Action, Party, Protocol, PublicCoins};
use crate::rng::{derive_seed, mix64};

const COUNT_BITS: usize = 32;

/// A KMV distinct-elements sketch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StreamingEstimator {
    k: usize,
    seed: u64,
    mins: BTreeSet<u64>,
}

/// Fresh sketch of capacity `k` with hash seed 0.
pub fn kmv_f0(k: usize) -> Result<StreamingEstimator> {
    StreamingEstimator::new(k, 0)
}

impl StreamingEstimator {
    pub fn new(k: usize, seed: u64) -> Result<Self> {
        if k < 2 || k >= 1 << COUNT_BITS {
            return Err(Error::invalid(format!("sketch size k={k} outside 2..2^32")));
        }
        Ok(Self { k, seed, mins: BTreeSet::new() })
    }

    /// Same capacity, different hash seed, empty.
    pub fn reseeded(&self, seed: u64) -> Self {
        Self { k: self.k, seed, mins: BTreeSet::new() }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Re-inserting elements never changes the state, so a stream can be
    /// replayed any number of times.
    pub fn passes_supported(&self) -> usize {
        usize::MAX
    }

    fn hash(&self, element: u64) -> u64 {
        mix64(element ^ mix64(self.seed))
    }

    pub fn insert(&mut self, element: u64) {
        let h = self.hash(element);
        if self.mins.len() < self.k {
            self.mins.insert(h);
        } else if h < *self.mins.last().expect("sketch is full") && self.mins.insert(h) {
            self.mins.pop_last();
        }
    }

    pub fn extend(&mut self, stream: &[u64]) {
        for &e in stream {
            self.insert(e);
        }
    }

    /// Exact count below `k` distinct hashes, else `(k-1)/u_k` with `u_k` the
    /// k-th smallest hash scaled into `(0, 1]`.
    pub fn estimate(&self) -> f64 {
        if self.mins.len() < self.k {
            return self.mins.len() as f64;
        }
        let vk = *self.mins.last().expect("sketch is full");
        let u = (vk as f64 + 1.0) / 2f64.powi(64);
        (self.k - 1) as f64 / u
    }

    /// Size of [`Self::to_state`] in bits.
    pub fn state_bits(&self) -> usize {
        COUNT_BITS + 64 * self.k
    }

    pub fn to_state(&self) -> BitString {
        let mut bits = Vec::with_capacity(self.state_bits());
        let count = self.mins.len() as u32;
        bits.extend((0..COUNT_BITS).map(|i| (count >> i) & 1 == 1));
        for slot in self.mins.iter().copied().chain(std::iter::repeat(u64::MAX)).take(self.k) {
            bits.extend((0..64).map(|i| (slot >> i) & 1 == 1));
        }
        BitString::from_bits(&bits)
    }

    /// Restores a sketch with this capacity and seed from a serialized state.
    pub fn from_state(&self, state: &BitString) -> Result<Self> {
        if state.len() != self.state_bits() {
            return Err(Error::invalid(format!(
                "state of {} bits for a sketch of {} bits",
                state.len(),
                self.state_bits()
            )));
        }
        let read = |offset: usize, width: usize| -> u64 {
            (0..width).filter(|&i| state.get(offset + i)).fold(0u64, |acc, i| acc | 1 << i)
        };
        let count = read(0, COUNT_BITS) as usize;
        if count > self.k {
            return Err(Error::invalid(format!("state holds {count} values, capacity {}", self.k)));
        }
        let mins: BTreeSet<u64> = (0..count).map(|j| read(COUNT_BITS + 64 * j, 64)).collect();
        if mins.len() != count {
            return Err(Error::invalid("state holds repeated values"));
        }
        Ok(Self { k: self.k, seed: self.seed, mins })
    }

    /// Length-prefixed blob: 8-byte little-endian byte count, then the state
    /// bits packed little-endian.
    pub fn write_blob<W: Write>(&self, mut w: W) -> Result<()> {
        let state = self.to_state();
        let bytes: Vec<u8> = state.words().iter().flat_map(|w| w.to_le_bytes()).take(state.len().div_ceil(8)).collect();
        w.write_all(&(bytes.len() as u64).to_le_bytes())?;
        w.write_all(&bytes)?;
        Ok(())
    }

    pub fn read_blob<R: Read>(&self, mut r: R) -> Result<Self> {
        let mut len = [0u8; 8];
        r.read_exact(&mut len)?;
        let len = u64::from_le_bytes(len) as usize;
        if len != self.state_bits().div_ceil(8) {
            return Err(Error::invalid(format!("blob of {len} bytes does not match sketch size")));
        }
        let mut bytes = vec![0u8; len];
        r.read_exact(&mut bytes)?;
        let bits: Vec<bool> = (0..self.state_bits()).map(|i| (bytes[i / 8] >> (i % 8)) & 1 == 1).collect();
        self.from_state(&BitString::from_bits(&bits))
    }
}

/// Exact number of distinct elements.
pub fn exact_f0(stream: &[u64]) -> usize {
    stream.iter().collect::<HashSet<_>>().len()
}

/// Stream segments `(2i + x_i)_{i=1..n}` and `(2i + y_i)_{i=1..n}`; the F0 of
/// their concatenation is `n + dist(x, y)`.
pub fn ghd_to_f0_stream(x: &BitString, y: &BitString) -> Result<(Vec<u64>, Vec<u64>)> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    Ok((f0_segment(x), f0_segment(y)))
}

fn f0_segment(v: &BitString) -> Vec<u64> {
    v.iter().enumerate().map(|(i, b)| 2 * (i as u64 + 1) + u64::from(b)).collect()
}

/// Newline-delimited unsigned integers.
pub fn read_stream<R: BufRead>(r: R) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        out.push(line.parse().map_err(|_| Error::invalid(format!("bad stream element {line:?}")))?);
    }
    Ok(out)
}

pub fn write_stream<W: Write>(mut w: W, stream: &[u64]) -> Result<()> {
    for e in stream {
        writeln!(w, "{e}")?;
    }
    Ok(())
}

/// Relative F0 accuracy that separates the two promise classes when Bob
/// thresholds at `n + t`: `g / (2(n + t + g))`.
pub fn separating_accuracy(params: &GhdParams) -> f64 {
    params.g / (2.0 * (params.n as f64 + params.t + params.g))
}

/// `⌈6/ε²⌉`.
pub fn kmv_size_for(eps: f64) -> usize {
    (6.0 / (eps * eps)).ceil() as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionAccounting {
    pub passes: usize,
    pub state_bits: usize,
    pub messages: usize,
    pub total_bits: usize,
}

/// The protocol induced by a `passes`-pass streaming algorithm: Alice runs
/// the sketch over her segment and ships the state; Bob continues over his
/// and either ships it back for another pass or, after the last pass,
/// outputs 1 iff the F0 estimate exceeds `n + t`. The hash seed comes from
/// the public coins.
#[derive(Clone, Debug)]
pub struct StreamProtocol {
    pub params: GhdParams,
    pub passes: usize,
    template: StreamingEstimator,
}

pub fn streaming_to_protocol(
    est: &StreamingEstimator,
    passes: usize,
    params: GhdParams,
) -> Result<(StreamProtocol, ReductionAccounting)> {
    if passes == 0 {
        return Err(Error::invalid("at least one pass is required"));
    }
    if passes > est.passes_supported() {
        return Err(Error::invalid("estimator cannot replay that many passes"));
    }
    let state_bits = est.state_bits();
    let messages = 2 * passes - 1;
    let accounting = ReductionAccounting { passes, state_bits, messages, total_bits: messages * state_bits };
    Ok((StreamProtocol { params, passes, template: est.reseeded(0) }, accounting))
}

struct StreamParty {
    sketch: StreamingEstimator,
    segment: Vec<u64>,
    is_bob: bool,
    passes_left: usize,
    threshold: f64,
}

impl Party for StreamParty {
    fn step(&mut self, incoming: Option<&BitString>) -> Result<Action> {
        let mut sketch = match incoming {
            Some(state) => self.sketch.from_state(state)?,
            None if !self.is_bob => self.sketch.reseeded(self.sketch.seed()),
            None => return Err(Error::ContractViolation("Bob cannot open the stream".into())),
        };
        sketch.extend(&self.segment);
        if self.is_bob {
            self.passes_left -= 1;
            if self.passes_left == 0 {
                return Ok(Action::Output(sketch.estimate() > self.threshold));
            }
        }
        Ok(Action::Send(sketch.to_state()))
    }
}

impl StreamProtocol {
    fn party(&self, input: &BitString, coins: &PublicCoins, is_bob: bool) -> Box<dyn Party> {
        let seed: u64 = coins.rng(0).random();
        Box::new(StreamParty {
            sketch: self.template.reseeded(seed),
            segment: f0_segment(input),
            is_bob,
            passes_left: self.passes,
            threshold: self.params.n as f64 + self.params.t,
        })
    }
}

impl Protocol for StreamProtocol {
    fn name(&self) -> String {
        format!("f0_stream(k={}, passes={})", self.template.k(), self.passes)
    }

    fn problem(&self) -> Problem {
        Problem::Ghd(self.params)
    }

    fn declared_cost(&self) -> usize {
        (2 * self.passes - 1) * self.template.state_bits()
    }

    fn alice(&self, x: &BitString, coins: &PublicCoins) -> Box<dyn Party> {
        self.party(x, coins, false)
    }

    fn bob(&self, y: &BitString, coins: &PublicCoins) -> Box<dyn Party> {
        self.party(y, coins, true)
    }
}

/// Fraction of `trials` hash seeds for which a size-`k` sketch of the stream
/// `0..distinct` misses the true count by more than a factor `1 ± eps`.
pub fn kmv_failure_rate(k: usize, distinct: u64, eps: f64, trials: u64, seed: u64) -> Result<f64> {
    let base = StreamingEstimator::new(k, 0)?;
    let failures: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut s = base.reseeded(derive_seed(seed, i));
            for e in 0..distinct {
                s.insert(e);
            }
            u64::from((s.estimate() / distinct as f64 - 1.0).abs() > eps)
        })
        .sum();
    Ok(failures as f64 / trials as f64)
}

/// Smallest `k` (by bisection over `[2, hi]`) whose failure rate at accuracy
/// `eps` is at most `target`, with common hash seeds across candidate `k`.
pub fn kmv_frontier(eps: f64, distinct: u64, target: f64, trials: u64, seed: u64) -> Result<usize> {
    let mut hi = 4 * kmv_size_for(eps);
    if kmv_failure_rate(hi, distinct, eps, trials, seed)? > target {
        return Err(Error::Infeasible(format!("no k <= {hi} reaches failure rate {target}")));
    }
    let mut lo = 2;
    while lo < hi {
        let mid = (lo + hi) / 2;
        if kmv_failure_rate(mid, distinct, eps, trials, seed)? <= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}
