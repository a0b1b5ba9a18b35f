//! Communication matrices, rectangles, pair distributions, rectangle scans
//! and the corruption-with-jokers certificate arithmetic.

mod certificate;
mod scan;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::cube::CubeSet;
use crate::cubexform::{distance_histogram, xi_measure_of_histogram, DistanceHistogram};
use crate::error::{Error, Result};
use crate::laws::check_correlation;
use crate::problem::{GhdParams, Label};
use crate::stats::{binomial_pmf, choose};

pub use certificate::{
    corruption_lower_bound, ghd_joker_certificate, partition_slack_audit, slack, support_condition, CertificateBound,
    CorruptionCertificate, SlackAudit, SupportCheck,
};
pub use scan::{check_joker_inequality, discrepancy_scan, DiscrepancyReport, RectangleScanReport, ScanMode, ScanSpec};

/// Largest `n` of a ghd matrix.
pub const MAX_MATRIX_N: usize = 14;
/// Largest `n` of a matrix stored as an explicit `4^n` table.
pub const MAX_TABLE_N: usize = 12;

#[derive(Clone, Debug)]
enum Labels {
    ByDistance(Vec<Label>),
    Table(Vec<Label>),
}

/// A partial Boolean function on `{0,1}^n × {0,1}^n`. Ghd matrices are kept
/// as one label per distance class; others as a row-major table indexed by
/// `x·2^n + y`.
#[derive(Clone, Debug)]
pub struct CommMatrix {
    n: usize,
    labels: Labels,
}

pub fn build_ghd_matrix(params: &GhdParams) -> Result<CommMatrix> {
    if params.n > MAX_MATRIX_N {
        return Err(Error::Capacity(format!("ghd matrix with n={} exceeds n <= {MAX_MATRIX_N}", params.n)));
    }
    Ok(CommMatrix {
        n: params.n,
        labels: Labels::ByDistance((0..=params.n).map(|d| params.label_at_distance(d)).collect()),
    })
}

impl CommMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(u64, u64) -> Label) -> Result<Self> {
        if n == 0 || n > MAX_TABLE_N {
            return Err(Error::Capacity(format!("explicit matrix with n={n} outside 1..={MAX_TABLE_N}")));
        }
        let side = 1u64 << n;
        let mut table = Vec::with_capacity(1 << (2 * n));
        for x in 0..side {
            for y in 0..side {
                table.push(f(x, y));
            }
        }
        Ok(Self { n, labels: Labels::Table(table) })
    }

    pub fn constant(n: usize, label: Label) -> Result<Self> {
        if n == 0 || n > MAX_MATRIX_N {
            return Err(Error::invalid(format!("matrix dimension n={n} outside 1..={MAX_MATRIX_N}")));
        }
        Ok(Self { n, labels: Labels::ByDistance(vec![label; n + 1]) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self, x: u64, y: u64) -> Label {
        match &self.labels {
            Labels::ByDistance(v) => v[(x ^ y).count_ones() as usize],
            Labels::Table(t) => t[((x << self.n) | y) as usize],
        }
    }

    pub fn label_bits(&self, x: &BitString, y: &BitString) -> Result<Label> {
        if x.len() != self.n || y.len() != self.n {
            return Err(Error::invalid(format!("inputs of length {}/{} for n={}", x.len(), y.len(), self.n)));
        }
        Ok(self.label(x.as_u64(), y.as_u64()))
    }

    /// The label of each distance class if the matrix depends only on
    /// `dist(x, y)`; checked entry by entry for tables.
    pub fn distance_labels(&self) -> Option<Vec<Label>> {
        match &self.labels {
            Labels::ByDistance(v) => Some(v.clone()),
            Labels::Table(t) => {
                let mut seen: Vec<Option<Label>> = vec![None; self.n + 1];
                let side = 1u64 << self.n;
                for x in 0..side {
                    for y in 0..side {
                        let d = (x ^ y).count_ones() as usize;
                        let l = t[((x << self.n) | y) as usize];
                        match seen[d] {
                            None => seen[d] = Some(l),
                            Some(prev) if prev != l => return None,
                            _ => {}
                        }
                    }
                }
                Some(seen.into_iter().map(|l| l.unwrap_or(Label::Star)).collect())
            }
        }
    }

    /// `(|f^{-1}(0)|, |f^{-1}(1)|)`.
    pub fn preimage_sizes(&self) -> (u128, u128) {
        match &self.labels {
            Labels::ByDistance(v) => {
                let side = 1u128 << self.n;
                let mut sizes = (0, 0);
                for (d, l) in v.iter().enumerate() {
                    let c = side * choose(self.n as u64, d as u64);
                    match l {
                        Label::Zero => sizes.0 += c,
                        Label::One => sizes.1 += c,
                        Label::Star => {}
                    }
                }
                sizes
            }
            Labels::Table(t) => t.iter().fold((0, 0), |(z, o), l| match l {
                Label::Zero => (z + 1, o),
                Label::One => (z, o + 1),
                Label::Star => (z, o),
            }),
        }
    }
}

/// `rows × cols`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rectangle {
    pub rows: CubeSet,
    pub cols: CubeSet,
}

impl Rectangle {
    pub fn new(rows: CubeSet, cols: CubeSet) -> Result<Self> {
        if rows.n() != cols.n() {
            return Err(Error::invalid(format!("rectangle sides over n={} and n={}", rows.n(), cols.n())));
        }
        Ok(Self { rows, cols })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Ok(Self { rows: CubeSet::empty(n)?, cols: CubeSet::empty(n)? })
    }

    pub fn full(n: usize) -> Result<Self> {
        Ok(Self { rows: CubeSet::full(n)?, cols: CubeSet::full(n)? })
    }

    /// `{(x, y) : x_i = 0, y_i = 1 for all i < s}`.
    pub fn disagreeing_prefix(n: usize, s: usize) -> Result<Self> {
        if s > n || n > crate::cube::MAX_DENSE_N {
            return Err(Error::invalid(format!("prefix length s={s} with n={n}")));
        }
        let low = (1u64 << s) - 1;
        let rows = CubeSet::from_members(n, (0..1u64 << (n - s)).map(|z| z << s))?;
        let cols = CubeSet::from_members(n, (0..1u64 << (n - s)).map(|z| (z << s) | low))?;
        Ok(Self { rows, cols })
    }

    pub fn n(&self) -> usize {
        self.rows.n()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty() || self.cols.is_empty()
    }

    pub fn size(&self) -> u128 {
        self.rows.len() as u128 * self.cols.len() as u128
    }

    pub fn contains(&self, x: u64, y: u64) -> bool {
        self.rows.contains(x) && self.cols.contains(y)
    }

    pub fn is_disjoint(&self, other: &Rectangle) -> bool {
        self.rows.is_disjoint(&other.rows) || self.cols.is_disjoint(&other.cols)
    }

    pub fn distance_histogram(&self) -> Result<DistanceHistogram> {
        if self.is_empty() {
            return Ok(DistanceHistogram { n: self.n(), counts: vec![0; self.n() + 1] });
        }
        distance_histogram(&self.rows, &self.cols)
    }

    /// Both sides in the cube-set text format, each preceded by a `rows` or
    /// `cols` line.
    pub fn write_text<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "rows")?;
        self.rows.write_text(&mut w)?;
        writeln!(w, "cols")?;
        self.cols.write_text(&mut w)
    }
}

#[derive(Serialize, Deserialize)]
struct RectangleRepr {
    n: usize,
    rows: Vec<BitString>,
    cols: Vec<BitString>,
}

impl Serialize for Rectangle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.n();
        let side = |c: &CubeSet| c.members().into_iter().map(|z| BitString::from_u64(z, n)).collect();
        RectangleRepr { n, rows: side(&self.rows), cols: side(&self.cols) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Rectangle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = RectangleRepr::deserialize(d)?;
        let side = |v: &[BitString]| CubeSet::from_bitstrings(r.n, v).map_err(serde::de::Error::custom);
        Ok(Rectangle { rows: side(&r.rows)?, cols: side(&r.cols)? })
    }
}

/// A distribution on `{0,1}^n × {0,1}^n` whose pair mass depends only on the
/// distance of the pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairDistribution {
    /// `ξ_p`.
    Xi { p: f64 },
    /// Distance drawn from `pmf` (indexed `0..=n`), then a uniform pair at
    /// that distance.
    DistanceConditioned { pmf: Vec<f64> },
    Mixture { parts: Vec<WeightedPart> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedPart {
    pub weight: f64,
    pub law: PairDistribution,
}

impl PairDistribution {
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            PairDistribution::Xi { p } => check_correlation(*p),
            PairDistribution::DistanceConditioned { pmf } => {
                if pmf.len() != n + 1 {
                    return Err(Error::invalid(format!("distance pmf of length {} for n={n}", pmf.len())));
                }
                check_weights(pmf.iter().copied())
            }
            PairDistribution::Mixture { parts } => {
                if parts.is_empty() {
                    return Err(Error::invalid("empty mixture"));
                }
                check_weights(parts.iter().map(|p| p.weight))?;
                parts.iter().try_for_each(|p| p.law.validate(n))
            }
        }
    }

    /// Distribution of `dist(x, y)`.
    pub fn distance_pmf(&self, n: usize) -> Result<Vec<f64>> {
        self.validate(n)?;
        Ok(self.distance_pmf_unchecked(n))
    }

    fn distance_pmf_unchecked(&self, n: usize) -> Vec<f64> {
        match self {
            PairDistribution::Xi { p } => binomial_pmf(n, (1.0 - p) / 2.0),
            PairDistribution::DistanceConditioned { pmf } => pmf.clone(),
            PairDistribution::Mixture { parts } => {
                let mut out = vec![0.0; n + 1];
                for part in parts {
                    for (o, q) in out.iter_mut().zip(part.law.distance_pmf_unchecked(n)) {
                        *o += part.weight * q;
                    }
                }
                out
            }
        }
    }

    /// Mass of one pair at distance `d`.
    pub fn pair_mass(&self, n: usize, d: usize) -> f64 {
        match self {
            PairDistribution::Xi { p } => {
                let (keep, flip) = ((1.0 + p) / 2.0, (1.0 - p) / 2.0);
                0.5f64.powi(n as i32) * keep.powi((n - d) as i32) * flip.powi(d as i32)
            }
            PairDistribution::DistanceConditioned { pmf } => {
                pmf[d] * 0.5f64.powi(n as i32) / choose(n as u64, d as u64) as f64
            }
            PairDistribution::Mixture { parts } => parts.iter().map(|p| p.weight * p.law.pair_mass(n, d)).sum(),
        }
    }

    /// Mass of a set of pairs with the given distance histogram.
    pub fn mass_of_histogram(&self, hist: &DistanceHistogram) -> Result<f64> {
        self.validate(hist.n)?;
        self.mass_of_histogram_unchecked(hist)
    }

    fn mass_of_histogram_unchecked(&self, hist: &DistanceHistogram) -> Result<f64> {
        let n = hist.n;
        match self {
            PairDistribution::Xi { p } => xi_measure_of_histogram(hist, *p),
            PairDistribution::DistanceConditioned { .. } => Ok(hist
                .counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(d, &c)| c as f64 * self.pair_mass(n, d))
                .sum()),
            PairDistribution::Mixture { parts } => {
                let mut total = 0.0;
                for p in parts {
                    total += p.weight * p.law.mass_of_histogram_unchecked(hist)?;
                }
                Ok(total)
            }
        }
    }

    /// Mass of the pairs labeled `label` by a distance-dependent function.
    pub fn mass_on_label(&self, n: usize, labels: &[Label], label: Label) -> Result<f64> {
        if labels.len() != n + 1 {
            return Err(Error::invalid("one label per distance class expected"));
        }
        Ok(self.distance_pmf(n)?.iter().zip(labels).filter(|(_, &l)| l == label).map(|(q, _)| q).sum())
    }
}

fn check_weights(w: impl Iterator<Item = f64>) -> Result<()> {
    let mut total = 0.0;
    for x in w {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::invalid(format!("negative or non-finite weight {x}")));
        }
        total += x;
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("weights sum to {total}, expected 1")));
    }
    Ok(())
}

/// Exact measure of `R` under `dist`.
pub fn mass_on_rectangle(dist: &PairDistribution, r: &Rectangle) -> Result<f64> {
    dist.validate(r.n())?;
    if r.is_empty() {
        return Ok(0.0);
    }
    dist.mass_of_histogram_unchecked(&r.distance_histogram()?)
}
