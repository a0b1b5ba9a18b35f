//! Minimizing a pairwise-additive objective `Σ_{(x,y) ∈ R} w(x, y)` over
//! rectangles `R`, used both for the joker slack and for discrepancy.
//!
//! * Exhaustive (`n <= 4`): for a fixed row set the best column set takes
//!   every column with negative column sum (or the single smallest one), so
//!   enumerating the `2^{2^n} - 1` row sets in Gray-code order covers all
//!   `(2^{2^n} - 1)^2` nonempty rectangles. Weights are scaled by a power of
//!   two into `i128`, which is lossless, so sums are exact.
//! * Random: half the samples are products of subcubes, half products of
//!   random-density sets.
//! * Greedy: alternating best responses from random row sets, with
//!   Metropolis kicks on the rows once a start stops improving. When the
//!   weights depend only on distance the row and column sums are one
//!   XOR-convolution with the weight profile, done by a floating-point
//!   Walsh–Hadamard transform.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::certificate::{slack, CorruptionCertificate};
use super::{mass_on_rectangle, CommMatrix, PairDistribution, Rectangle, MAX_TABLE_N};
use crate::cube::CubeSet;
use crate::cubexform::MAX_TRANSFORM_N;
use crate::error::{Error, Result};
use crate::problem::Label;
use crate::rng::{derive_seed, stream_rng, Rng};

/// Largest `n` for the exhaustive scan.
pub const MAX_EXHAUSTIVE_N: usize = 4;
/// Above this `n`, starts and samples run one at a time (the transforms
/// themselves stay parallel) to bound memory.
const PARALLEL_STARTS_MAX_N: usize = 16;
const KICKS_PER_START: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ScanMode {
    Exhaustive,
    Random { samples: usize },
    Greedy { starts: usize, rounds: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    #[serde(flatten)]
    pub mode: ScanMode,
    /// Only rectangles with at least this much mass under the reference
    /// distribution (`μ₁` for the joker slack, `μ` for discrepancy) count.
    /// Not available in exhaustive mode.
    #[serde(default)]
    pub mass_floor: Option<f64>,
}

impl ScanSpec {
    pub fn exhaustive() -> Self {
        Self { mode: ScanMode::Exhaustive, mass_floor: None }
    }

    pub fn random(samples: usize) -> Self {
        Self { mode: ScanMode::Random { samples }, mass_floor: None }
    }

    pub fn greedy(starts: usize) -> Self {
        Self { mode: ScanMode::Greedy { starts, rounds: 32 }, mass_floor: None }
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.mass_floor = Some(floor);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectangleScanReport {
    pub mode: ScanMode,
    pub worst_rectangle: Rectangle,
    pub min_slack: f64,
    /// Rectangles whose objective was evaluated. Exhaustive mode counts every
    /// nonempty rectangle; a greedy best-response step counts the `2^n`
    /// single-line toggles its sums price at once.
    pub rectangles_examined: u64,
    /// Candidates that met the mass floor. When none did, the worst
    /// rectangle is the empty one.
    pub candidates_above_floor: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub mode: ScanMode,
    /// `max |μ(R ∩ f^{-1}(0)) - μ(R ∩ f^{-1}(1))|` over scanned rectangles.
    pub value: f64,
    /// The signed difference on the witness.
    pub signed: f64,
    pub witness: Rectangle,
    pub rectangles_examined: u64,
}

enum WeightKind {
    /// `w(x, y) = profile[dist(x, y)]`; `spectrum` is the transform of
    /// `z ↦ profile[|z|]`, filled for greedy scans.
    ByDistance { profile: Vec<f64>, spectrum: Vec<f64> },
    /// Row-major `2^n × 2^n`.
    Table(Vec<f64>),
}

pub(crate) struct Weights {
    n: usize,
    kind: WeightKind,
}

impl Weights {
    fn by_distance(n: usize, profile: Vec<f64>) -> Self {
        Self { n, kind: WeightKind::ByDistance { profile, spectrum: Vec::new() } }
    }

    fn at(&self, x: u64, y: u64) -> f64 {
        match &self.kind {
            WeightKind::ByDistance { profile, .. } => profile[(x ^ y).count_ones() as usize],
            WeightKind::Table(t) => t[((x << self.n) | y) as usize],
        }
    }

    fn negated(&self) -> Self {
        let kind = match &self.kind {
            WeightKind::ByDistance { profile, spectrum } => WeightKind::ByDistance {
                profile: profile.iter().map(|w| -w).collect(),
                spectrum: spectrum.iter().map(|w| -w).collect(),
            },
            WeightKind::Table(t) => WeightKind::Table(t.iter().map(|w| -w).collect()),
        };
        Self { n: self.n, kind }
    }

    fn prepare_spectrum(&mut self) {
        let n = self.n;
        if let WeightKind::ByDistance { profile, spectrum } = &mut self.kind {
            if spectrum.is_empty() {
                let mut v: Vec<f64> = (0..1u64 << n).map(|z| profile[z.count_ones() as usize]).collect();
                wht_f64(&mut v);
                *spectrum = v;
            }
        }
    }

    /// With `against_rows`, `s[y] = Σ_{x ∈ set} w(x, y)`; otherwise
    /// `s[x] = Σ_{y ∈ set} w(x, y)`.
    fn line_sums(&self, set: &[bool], against_rows: bool) -> Vec<f64> {
        let side = 1usize << self.n;
        match &self.kind {
            WeightKind::ByDistance { spectrum, .. } => {
                let mut v: Vec<f64> = set.par_iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
                wht_f64(&mut v);
                v.par_iter_mut().zip(spectrum.par_iter()).for_each(|(a, s)| *a *= s);
                wht_f64(&mut v);
                let scale = 1.0 / side as f64;
                v.par_iter_mut().for_each(|a| *a *= scale);
                v
            }
            WeightKind::Table(t) => {
                if against_rows {
                    let mut s = vec![0.0; side];
                    for (x, _) in set.iter().enumerate().filter(|(_, &b)| b) {
                        for (acc, w) in s.iter_mut().zip(&t[x * side..(x + 1) * side]) {
                            *acc += w;
                        }
                    }
                    s
                } else {
                    (0..side)
                        .into_par_iter()
                        .map(|x| {
                            t[x * side..(x + 1) * side].iter().zip(set).filter(|(_, &b)| b).map(|(w, _)| w).sum()
                        })
                        .collect()
                }
            }
        }
    }
}

fn wht_f64(v: &mut [f64]) {
    let len = v.len();
    if len <= 1 << 14 {
        let mut h = 1;
        while h < len {
            for block in v.chunks_mut(2 * h) {
                let (lo, hi) = block.split_at_mut(h);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = x + y;
                    *b = x - y;
                }
            }
            h *= 2;
        }
        return;
    }
    let (lo, hi) = v.split_at_mut(len / 2);
    rayon::join(|| wht_f64(lo), || wht_f64(hi));
    lo.par_iter_mut().zip(hi.par_iter_mut()).with_min_len(4096).for_each(|(a, b)| {
        let (x, y) = (*a, *b);
        *a = x + y;
        *b = x - y;
    });
}

type Objective<'a> = dyn Fn(&Rectangle) -> Result<f64> + Sync + 'a;

struct Found {
    value: f64,
    rect: Rectangle,
}

struct EngineResult {
    best: Option<Found>,
    examined: u64,
    above_floor: u64,
}

fn keep_better(a: Option<(Found, u64)>, b: Option<(Found, u64)>) -> Option<(Found, u64)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            if (b.0.value, b.1) < (a.0.value, a.1) {
                Some(b)
            } else {
                Some(a)
            }
        }
    }
}

fn set_from_flags(n: usize, flags: &[bool]) -> Result<CubeSet> {
    CubeSet::from_members(n, flags.iter().enumerate().filter(|(_, &b)| b).map(|(z, _)| z as u64))
}

/// Exact global minimum of `Σ_{R} q` over nonempty rectangles of a
/// `2^n × 2^n` integer table; returns the value and the row and column masks
/// of a minimizer.
pub(crate) fn exhaustive_min(n: usize, q: &[i128]) -> (i128, u64, u64) {
    let side = 1usize << n;
    let mut sums = vec![0i128; side];
    let mut rows = 0u64;
    let mut best = (i128::MAX, 0u64);
    let value_of = |sums: &[i128]| -> i128 {
        let neg: i128 = sums.iter().filter(|&&s| s < 0).sum();
        if sums.iter().any(|&s| s < 0) {
            neg
        } else {
            *sums.iter().min().expect("nonempty")
        }
    };
    for i in 1u64..(1u64 << side) {
        let bit = i.trailing_zeros() as usize;
        rows ^= 1 << bit;
        let row = &q[bit * side..(bit + 1) * side];
        if rows >> bit & 1 == 1 {
            sums.iter_mut().zip(row).for_each(|(s, w)| *s += w);
        } else {
            sums.iter_mut().zip(row).for_each(|(s, w)| *s -= w);
        }
        let v = value_of(&sums);
        if v < best.0 {
            best = (v, rows);
        }
    }
    let rows = best.1;
    let mut sums = vec![0i128; side];
    for x in (0..side).filter(|x| rows >> x & 1 == 1) {
        sums.iter_mut().zip(&q[x * side..(x + 1) * side]).for_each(|(s, w)| *s += w);
    }
    let mut cols = sums.iter().enumerate().filter(|(_, &s)| s < 0).fold(0u64, |m, (y, _)| m | 1 << y);
    if cols == 0 {
        let y = (0..side).min_by_key(|&y| sums[y]).expect("nonempty");
        cols = 1 << y;
    }
    (best.0, rows, cols)
}

/// Lossless `i128` image of an `f64` table: every weight times a common
/// power of two, with the largest magnitude near `2^100`.
pub(crate) fn quantize(table: &[f64]) -> Vec<i128> {
    let max = table.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    if max == 0.0 {
        return vec![0; table.len()];
    }
    let exp = 100 - max.log2().ceil() as i32;
    table.iter().map(|w| (w * 2f64.powi(exp)) as i128).collect()
}

fn run_exhaustive(weights: &Weights, exact: &Objective) -> Result<EngineResult> {
    let n = weights.n;
    if n > MAX_EXHAUSTIVE_N {
        return Err(Error::Capacity(format!("exhaustive scan needs n <= {MAX_EXHAUSTIVE_N}, got {n}")));
    }
    let side = 1u64 << n;
    let table: Vec<f64> = (0..side).flat_map(|x| (0..side).map(move |y| (x, y))).map(|(x, y)| weights.at(x, y)).collect();
    let (_, rows, cols) = exhaustive_min(n, &quantize(&table));
    let pick = |mask: u64| CubeSet::from_members(n, (0..side).filter(|z| mask >> z & 1 == 1));
    let rect = Rectangle::new(pick(rows)?, pick(cols)?)?;
    let subsets = (1u64 << side) - 1;
    Ok(EngineResult {
        best: Some(Found { value: exact(&rect)?, rect }),
        examined: subsets * subsets,
        above_floor: subsets * subsets,
    })
}

/// A random subcube or random-density set with density at least `min_density`.
fn random_side(n: usize, min_density: f64, rng: &mut Rng) -> Result<CubeSet> {
    let min_density = min_density.clamp(0.0, 1.0);
    let set = if rng.random_bool(0.5) {
        let max_fixed = if min_density > 0.0 { (-min_density.log2()).floor() as usize } else { n };
        let fixed = rng.random_range(0..=max_fixed.min(n));
        let coords = rand::seq::index::sample(rng, n, fixed);
        let mask = coords.iter().fold(0u64, |m, i| m | 1 << i);
        let value = rng.random::<u64>() & mask;
        CubeSet::from_members(n, (0..1u64 << n).filter(|z| z & mask == value))?
    } else {
        let density = rng.random_range(min_density..=1.0);
        CubeSet::random(n, density, rng)?
    };
    if set.is_empty() {
        return CubeSet::from_members(n, [rng.random_range(0..1u64 << n)]);
    }
    Ok(set)
}

/// Mass floor: the reference law's exact rectangle mass and its pair
/// weights, used by the greedy scan to keep candidates heavy.
struct Floor<'a> {
    mass: &'a Objective<'a>,
    weights: Weights,
    value: f64,
}

fn floor_ok(floor: Option<&Floor>, r: &Rectangle) -> Result<bool> {
    match floor {
        None => Ok(true),
        Some(f) => Ok((f.mass)(r)? >= f.value),
    }
}

fn run_random(
    n: usize,
    samples: usize,
    seed: u64,
    exact: &Objective,
    floor: Option<&Floor>,
) -> Result<EngineResult> {
    let one = |i: usize| -> Result<Option<(Found, u64)>> {
        let mut rng = stream_rng(derive_seed(seed, i as u64), 0);
        // With a floor, aim both sides at a product density above it.
        let target = floor.map_or(0.0, |f| f.value);
        let rows = random_side(n, target, &mut rng)?;
        let density = rows.len() as f64 / (1u64 << n) as f64;
        let cols = random_side(n, target / density, &mut rng)?;
        let rect = Rectangle::new(rows, cols)?;
        if !floor_ok(floor, &rect)? {
            return Ok(None);
        }
        Ok(Some((Found { value: exact(&rect)?, rect }, i as u64)))
    };
    let results: Vec<Result<Option<(Found, u64)>>> = if n <= PARALLEL_STARTS_MAX_N {
        (0..samples).into_par_iter().map(one).collect()
    } else {
        (0..samples).map(one).collect()
    };
    let mut best = None;
    let mut above = 0;
    for r in results {
        let r = r?;
        above += u64::from(r.is_some());
        best = keep_better(best, r);
    }
    Ok(EngineResult { best: best.map(|b| b.0), examined: samples as u64, above_floor: above })
}

fn best_response(sums: &[f64]) -> Vec<bool> {
    let mut pick: Vec<bool> = sums.iter().map(|&s| s < 0.0).collect();
    if !pick.iter().any(|&b| b) {
        let (i, _) = sums.iter().enumerate().fold((0, f64::INFINITY), |m, (i, &s)| if s < m.1 { (i, s) } else { m });
        pick[i] = true;
    }
    pick
}

/// Best response subject to a mass floor: after the unconstrained choice,
/// lines are added in increasing order of objective per unit mass until the
/// floor is met (or every line is taken).
fn floored_response(sums: &[f64], masses: &[f64], floor: f64) -> Vec<bool> {
    let mut pick = best_response(sums);
    let mut mass: f64 = masses.iter().zip(&pick).filter(|(_, &b)| b).map(|(m, _)| m).sum();
    if mass >= floor {
        return pick;
    }
    let mut rest: Vec<usize> = (0..sums.len()).filter(|&i| !pick[i] && masses[i] > 0.0).collect();
    rest.par_sort_unstable_by(|&a, &b| (sums[a] / masses[a]).total_cmp(&(sums[b] / masses[b])));
    for i in rest {
        if mass >= floor {
            break;
        }
        pick[i] = true;
        mass += masses[i];
    }
    pick
}

fn respond(weights: &Weights, floor: Option<&Floor>, set: &[bool], against_rows: bool) -> (Vec<f64>, Vec<bool>) {
    let sums = weights.line_sums(set, against_rows);
    let pick = match floor {
        Some(f) => floored_response(&sums, &f.weights.line_sums(set, against_rows), f.value),
        None => best_response(&sums),
    };
    (sums, pick)
}

fn greedy_start(
    weights: &Weights,
    rounds: usize,
    seed: u64,
    exact: &Objective,
    floor: Option<&Floor>,
) -> Result<(Option<Found>, u64, u64)> {
    let n = weights.n;
    let side = 1usize << n;
    let mut rng = stream_rng(seed, 0);
    let density = rng.random_range(0.05..0.95);
    let mut rows: Vec<bool> = (0..side).map(|_| rng.random_bool(density)).collect();
    if !rows.iter().any(|&b| b) {
        rows[rng.random_range(0..side)] = true;
    }
    let mut examined = 0u64;
    let mut above = 0u64;
    let mut best: Option<(f64, Vec<bool>, Vec<bool>)> = None;
    let mut previous = f64::INFINITY;
    let mut kicks = KICKS_PER_START;
    for _ in 0..rounds {
        let (_, cols) = respond(weights, floor, &rows, true);
        let (row_sums, next) = respond(weights, floor, &cols, false);
        examined += 2 * side as u64;
        rows = next;
        let value: f64 = row_sums.iter().zip(&rows).filter(|(_, &b)| b).map(|(s, _)| s).sum();
        let rect = Rectangle::new(set_from_flags(n, &rows)?, set_from_flags(n, &cols)?)?;
        if floor_ok(floor, &rect)? {
            above += 1;
            if best.as_ref().is_none_or(|b| value < b.0) {
                best = Some((value, rows.clone(), cols.clone()));
            }
        }
        if value < previous - 1e-12 * previous.abs() {
            previous = value;
            continue;
        }
        if kicks == 0 {
            break;
        }
        kicks -= 1;
        let scale = if value != 0.0 { value.abs() } else { row_sums.iter().fold(0.0f64, |m, s| m.max(s.abs())) };
        let temperature = 0.01 * scale;
        for (x, r) in rows.iter_mut().enumerate() {
            let delta = if *r { -row_sums[x] } else { row_sums[x] };
            if delta < 0.0 || (temperature > 0.0 && rng.random_bool((-delta / temperature).exp().min(1.0))) {
                *r = !*r;
            }
        }
        if !rows.iter().any(|&b| b) {
            rows[rng.random_range(0..side)] = true;
        }
        previous = f64::INFINITY;
    }
    let found = match best {
        None => None,
        Some((_, rows, cols)) => {
            let rect = Rectangle::new(set_from_flags(n, &rows)?, set_from_flags(n, &cols)?)?;
            Some(Found { value: exact(&rect)?, rect })
        }
    };
    Ok((found, examined, above))
}

fn run_greedy(
    weights: &mut Weights,
    starts: usize,
    rounds: usize,
    seed: u64,
    exact: &Objective,
    floor: Option<&mut Floor>,
) -> Result<EngineResult> {
    if weights.n > MAX_TRANSFORM_N {
        return Err(Error::Capacity(format!("greedy scan needs n <= {MAX_TRANSFORM_N}")));
    }
    weights.prepare_spectrum();
    let weights = &*weights;
    let floor = floor.map(|f| {
        f.weights.prepare_spectrum();
        &*f
    });
    let one = |i: usize| greedy_start(weights, rounds, derive_seed(seed, i as u64), exact, floor);
    let results: Vec<_> = if weights.n <= PARALLEL_STARTS_MAX_N {
        (0..starts).into_par_iter().map(one).collect()
    } else {
        (0..starts).map(one).collect()
    };
    let (mut best, mut examined, mut above) = (None, 0, 0);
    for (i, r) in results.into_iter().enumerate() {
        let (found, e, a) = r?;
        examined += e;
        above += a;
        best = keep_better(best, found.map(|f| (f, i as u64)));
    }
    Ok(EngineResult { best: best.map(|b| b.0), examined, above_floor: above })
}

fn minimize(
    weights: &mut Weights,
    spec: &ScanSpec,
    seed: u64,
    exact: &Objective,
    floor_law: &PairDistribution,
) -> Result<EngineResult> {
    let n = weights.n;
    let floor_mass = |r: &Rectangle| mass_on_rectangle(floor_law, r);
    let mut floor = match spec.mass_floor {
        Some(f) if !(f.is_finite() && f >= 0.0) => return Err(Error::invalid(format!("mass floor {f}"))),
        Some(value) => Some(Floor {
            mass: &floor_mass,
            weights: Weights::by_distance(n, (0..=n).map(|d| floor_law.pair_mass(n, d)).collect()),
            value,
        }),
        None => None,
    };
    match spec.mode {
        ScanMode::Exhaustive => {
            if floor.is_some() {
                return Err(Error::invalid("a mass floor is not supported in exhaustive mode"));
            }
            run_exhaustive(weights, exact)
        }
        ScanMode::Random { samples } => run_random(n, samples, seed, exact, floor.as_ref()),
        ScanMode::Greedy { starts, rounds } => run_greedy(weights, starts, rounds, seed, exact, floor.as_mut()),
    }
}

/// Searches for rectangles violating the joker inequality of `cert` on the
/// `n`-bit cube; the report carries the smallest slack found.
pub fn check_joker_inequality(
    cert: &CorruptionCertificate,
    spec: &ScanSpec,
    n: usize,
    seed: u64,
) -> Result<RectangleScanReport> {
    for law in [&cert.mu0, &cert.mu1, &cert.muplus] {
        law.validate(n)?;
    }
    let (a0, a1, ap) = (cert.alpha0.to_f64(), cert.alpha1.to_f64(), cert.alphaplus.to_f64());
    let profile: Vec<f64> = (0..=n)
        .map(|d| a0 * cert.mu0.pair_mass(n, d) - a1 * cert.mu1.pair_mass(n, d) + ap * cert.muplus.pair_mass(n, d))
        .collect();
    let additive = (-cert.m).exp2();
    let exact = |r: &Rectangle| slack(cert, r).map(|s| s - additive);
    let result = minimize(&mut Weights::by_distance(n, profile), spec, seed, &exact, &cert.mu1)?;
    let (worst_rectangle, min_slack) = match result.best {
        Some(f) => (f.rect, f.value + additive),
        None => (Rectangle::empty(n)?, additive),
    };
    Ok(RectangleScanReport {
        mode: spec.mode,
        worst_rectangle,
        min_slack,
        rectangles_examined: result.examined,
        candidates_above_floor: result.above_floor,
    })
}

fn label_sign(l: Label) -> f64 {
    match l {
        Label::Zero => 1.0,
        Label::One => -1.0,
        Label::Star => 0.0,
    }
}

/// Largest `|μ(R ∩ f^{-1}(0)) - μ(R ∩ f^{-1}(1))|` over the scanned
/// rectangles of `matrix`.
pub fn discrepancy_scan(
    mu: &PairDistribution,
    matrix: &CommMatrix,
    spec: &ScanSpec,
    seed: u64,
) -> Result<DiscrepancyReport> {
    let n = matrix.n();
    mu.validate(n)?;
    let by_distance = matrix.distance_labels();
    let mut weights = match &by_distance {
        Some(labels) => {
            Weights::by_distance(n, (0..=n).map(|d| mu.pair_mass(n, d) * label_sign(labels[d])).collect())
        }
        None => {
            if n > MAX_TABLE_N {
                return Err(Error::Capacity(format!("explicit weights need n <= {MAX_TABLE_N}")));
            }
            let side = 1u64 << n;
            let table = (0..side)
                .flat_map(|x| (0..side).map(move |y| (x, y)))
                .map(|(x, y)| mu.pair_mass(n, (x ^ y).count_ones() as usize) * label_sign(matrix.label(x, y)))
                .collect();
            Weights { n, kind: WeightKind::Table(table) }
        }
    };
    let signed = |r: &Rectangle| -> Result<f64> {
        if r.is_empty() {
            return Ok(0.0);
        }
        match &by_distance {
            Some(labels) => {
                let hist = r.distance_histogram()?;
                Ok(hist
                    .counts
                    .iter()
                    .enumerate()
                    .filter(|(d, &c)| c != 0 && labels[*d] != Label::Star)
                    .map(|(d, &c)| c as f64 * mu.pair_mass(n, d) * label_sign(labels[d]))
                    .sum())
            }
            None => {
                let cols = r.cols.members();
                Ok(r.rows
                    .members()
                    .into_iter()
                    .flat_map(|x| cols.iter().map(move |&y| (x, y)))
                    .map(|(x, y)| mu.pair_mass(n, (x ^ y).count_ones() as usize) * label_sign(matrix.label(x, y)))
                    .sum())
            }
        }
    };
    let negated = |r: &Rectangle| signed(r).map(|v| -v);
    let low = minimize(&mut weights, spec, seed, &signed, mu)?;
    let high = minimize(&mut weights.negated(), spec, derive_seed(seed, 1), &negated, mu)?;
    let examined = low.examined + high.examined;
    let candidates = [low.best.map(|f| (f.value, f.rect)), high.best.map(|f| (-f.value, f.rect))];
    let mut best: Option<(f64, Rectangle)> = None;
    for (v, r) in candidates.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| v.abs() > b.0.abs()) {
            best = Some((v, r));
        }
    }
    let (signed_value, witness) = match best {
        Some((v, r)) => (v, r),
        None => (0.0, Rectangle::empty(n)?),
    };
    Ok(DiscrepancyReport {
        mode: spec.mode,
        value: signed_value.abs(),
        signed: signed_value,
        witness,
        rectangles_examined: examined,
    })
}
