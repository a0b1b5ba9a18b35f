//! The gap-Hamming-distance partial function and its relatives.

use serde::{Deserialize, Serialize};

use crate::bits::{hamming_distance, BitString};
use crate::error::{Error, Result};

/// Value of a partial Boolean function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "star")]
    Star,
}

impl Label {
    pub fn is_promise(self) -> bool {
        self != Label::Star
    }

    /// Whether the protocol output `bit` is wrong on an input with this label.
    /// Star inputs accept either output.
    pub fn is_error(self, bit: bool) -> bool {
        match self {
            Label::Zero => bit,
            Label::One => !bit,
            Label::Star => false,
        }
    }

    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Label::One
        } else {
            Label::Zero
        }
    }
}

/// Parameters of `ghd_{n,t,g}`: length, threshold and gap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhdParams {
    pub n: usize,
    pub t: f64,
    pub g: f64,
}

impl GhdParams {
    pub fn new(n: usize, t: f64, g: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n must be at least 1"));
        }
        let nf = n as f64;
        if !(0.0..=nf).contains(&t) || !t.is_finite() {
            return Err(Error::invalid(format!("threshold t={t} outside [0, {n}]")));
        }
        if !(0.0..=nf).contains(&g) || !g.is_finite() {
            return Err(Error::invalid(format!("gap g={g} outside [0, {n}]")));
        }
        Ok(Self { n, t, g })
    }

    /// `ghd_{n, n/2, sqrt(n)}`.
    pub fn standard(n: usize) -> Result<Self> {
        Self::new(n, n as f64 / 2.0, (n as f64).sqrt())
    }

    /// Label of an input pair at distance `d`. The comparisons are between the
    /// integer `d` and the real bounds `t - g`, `t + g`; nothing is rounded.
    pub fn label_at_distance(&self, d: usize) -> Label {
        let d = d as f64;
        if d <= self.t - self.g {
            Label::Zero
        } else if d > self.t + self.g {
            Label::One
        } else {
            Label::Star
        }
    }

    /// Largest promise distance labelled 0, if any.
    pub fn last_zero_distance(&self) -> Option<usize> {
        (0..=self.n).rev().find(|&d| self.label_at_distance(d) == Label::Zero)
    }

    /// Smallest promise distance labelled 1, if any.
    pub fn first_one_distance(&self) -> Option<usize> {
        (0..=self.n).find(|&d| self.label_at_distance(d) == Label::One)
    }
}

/// `ghd_{n,t,g}(x, y)`.
pub fn ghd_label(params: &GhdParams, x: &BitString, y: &BitString) -> Result<Label> {
    if x.len() != params.n || y.len() != params.n {
        return Err(Error::invalid(format!(
            "inputs of length {}/{} for ghd with n={}",
            x.len(),
            y.len(),
            params.n
        )));
    }
    Ok(params.label_at_distance(hamming_distance(x, y)?))
}

/// A partial function a protocol is meant to compute.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case")]
pub enum Problem {
    /// Gap-Hamming-Distance.
    Ghd(GhdParams),
    /// Gap-intersection-size: inputs are indicator vectors of subsets of `[n]`;
    /// output 0 if `|x ∩ y| <= t - g`, 1 if `|x ∩ y| > t + g`.
    Gis(GhdParams),
}

impl Problem {
    pub fn params(&self) -> GhdParams {
        match *self {
            Problem::Ghd(p) | Problem::Gis(p) => p,
        }
    }

    pub fn input_len(&self) -> usize {
        self.params().n
    }

    pub fn label(&self, x: &BitString, y: &BitString) -> Result<Label> {
        match self {
            Problem::Ghd(p) => ghd_label(p, x, y),
            Problem::Gis(p) => {
                if x.len() != p.n || y.len() != p.n {
                    return Err(Error::invalid("input length does not match gis n"));
                }
                Ok(p.label_at_distance(x.and(y)?.weight()))
            }
        }
    }

    /// For problems whose label depends only on the Hamming distance, the
    /// label of distance `d`.
    pub fn label_at_distance(&self, d: usize) -> Option<Label> {
        match self {
            Problem::Ghd(p) => Some(p.label_at_distance(d)),
            Problem::Gis(_) => None,
        }
    }
}
