use std::fmt;
use std::sync::Arc;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::stats::{normal_cdf, normal_quantile, normal_sf};

/// Smallest acceptance rate tolerated by rejection sampling.
pub const MIN_ACCEPTANCE: f64 = 1e-6;
const REJECTION_PILOT: u64 = 10_000_000;

/// A measurable subset of `R^n`. JSON form: `{"kind": ..., "params": {...}}`.
/// Directions `a` may be shorter than `n` (missing coordinates are zero) and
/// are normalized before use.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum GaussSet {
    Whole,
    /// `{x : ⟨a, x⟩ > t}`.
    Halfspace { a: Vec<f64>, t: f64 },
    /// `{x : |⟨a, x⟩| <= t}`, `a = e_1` when omitted.
    SymmetricSlab {
        #[serde(default)]
        a: Option<Vec<f64>>,
        t: f64,
    },
    /// `{x : r1 <= ‖x‖ <= r2}`.
    Shell { r1: f64, r2: f64 },
    /// `{x : |x_coord| > t}`.
    CoordThreshold {
        t: f64,
        #[serde(default)]
        coord: usize,
    },
    /// Arbitrary predicate; sampled by rejection and not serializable.
    #[serde(skip)]
    Custom {
        name: String,
        symmetric: bool,
        test: Arc<dyn Fn(&[f64]) -> bool + Send + Sync>,
    },
}

impl fmt::Debug for GaussSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaussSet::Custom { name, symmetric, .. } => {
                f.debug_struct("Custom").field("name", name).field("symmetric", symmetric).finish()
            }
            other => write!(f, "{}", serde_json::to_string(other).map_err(|_| fmt::Error)?),
        }
    }
}

/// `A = {x₁ < -t}` and `B = {x₁ > t}`.
pub fn opposing_halfspaces(t: f64) -> (GaussSet, GaussSet) {
    (GaussSet::Halfspace { a: vec![-1.0], t }, GaussSet::Halfspace { a: vec![1.0], t })
}

fn unit(a: &[f64], n: usize) -> Result<Vec<f64>> {
    if a.len() > n || a.is_empty() {
        return Err(Error::invalid(format!("direction of length {} in dimension {n}", a.len())));
    }
    let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::invalid("zero or non-finite direction"));
    }
    Ok(a.iter().map(|v| v / norm).collect())
}

fn dot(a: &[f64], x: &[f64]) -> f64 {
    a.iter().zip(x).map(|(p, q)| p * q).sum()
}

fn gaussian_vec(n: usize, rng: &mut Rng) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

impl GaussSet {
    pub fn custom(name: impl Into<String>, symmetric: bool, test: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        GaussSet::Custom { name: name.into(), symmetric, test: Arc::new(test) }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        match self {
            GaussSet::Halfspace { a, t } => {
                unit(a, n)?;
                finite(*t)
            }
            GaussSet::SymmetricSlab { a, t } => {
                if let Some(a) = a {
                    unit(a, n)?;
                }
                if !(*t > 0.0) {
                    return Err(Error::invalid("slab half-width must be positive"));
                }
                finite(*t)
            }
            GaussSet::Shell { r1, r2 } => {
                if !(0.0 <= *r1 && r1 < r2) {
                    return Err(Error::invalid(format!("shell radii {r1}, {r2}")));
                }
                Ok(())
            }
            GaussSet::CoordThreshold { t, coord } => {
                if *coord >= n || !(*t >= 0.0) {
                    return Err(Error::invalid(format!("coordinate {coord}, threshold {t} in dimension {n}")));
                }
                finite(*t)
            }
            GaussSet::Whole | GaussSet::Custom { .. } => Ok(()),
        }
    }

    /// Number of leading coordinates membership depends on, when that is
    /// fewer than all of them for every `n`.
    pub(crate) fn leading_support(&self) -> Option<usize> {
        match self {
            GaussSet::Whole => Some(0),
            GaussSet::Halfspace { a, .. } => Some(a.len()),
            GaussSet::SymmetricSlab { a, .. } => Some(a.as_ref().map_or(1, Vec::len)),
            GaussSet::CoordThreshold { coord, .. } => Some(coord + 1),
            GaussSet::Shell { .. } | GaussSet::Custom { .. } => None,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            GaussSet::Whole | GaussSet::SymmetricSlab { .. } | GaussSet::Shell { .. } => true,
            GaussSet::CoordThreshold { .. } => true,
            GaussSet::Halfspace { .. } => false,
            GaussSet::Custom { symmetric, .. } => *symmetric,
        }
    }

    /// `γ^n(A)` in closed form, when known.
    pub fn exact_measure(&self, n: usize) -> Option<f64> {
        match self {
            GaussSet::Whole => Some(1.0),
            GaussSet::Halfspace { t, .. } => Some(normal_sf(*t)),
            GaussSet::SymmetricSlab { t, .. } => Some(normal_cdf(*t) - normal_cdf(-*t)),
            GaussSet::CoordThreshold { t, .. } => Some(2.0 * normal_sf(*t)),
            GaussSet::Shell { r1, r2 } => {
                let chi = ChiSquared::new(n as f64).ok()?;
                Some(chi.cdf(r2 * r2) - chi.cdf(r1 * r1))
            }
            GaussSet::Custom { .. } => None,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            GaussSet::Whole => true,
            GaussSet::Halfspace { a, t } => dot(a, x) / norm(a) > *t,
            GaussSet::SymmetricSlab { a, t } => match a {
                Some(a) => (dot(a, x) / norm(a)).abs() <= *t,
                None => x[0].abs() <= *t,
            },
            GaussSet::Shell { r1, r2 } => {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                *r1 <= r && r <= *r2
            }
            GaussSet::CoordThreshold { t, coord } => x[*coord].abs() > *t,
            GaussSet::Custom { test, .. } => test(x),
        }
    }

    /// `count` draws from `γ^n` conditioned on the set. Structured kinds are
    /// sampled exactly (truncated normal along the defining direction by
    /// inverse CDF, truncated chi-square radius for shells); custom sets by
    /// rejection, failing once the observed acceptance rate drops below
    /// [`MIN_ACCEPTANCE`].
    pub fn sample_conditional(&self, n: usize, count: usize, rng: &mut Rng) -> Result<Vec<Vec<f64>>> {
        self.validate(n)?;
        if let Some(g) = self.exact_measure(n) {
            if g < MIN_ACCEPTANCE * 1e-6 {
                return Err(Error::Infeasible(format!("set measure {g:e} too small to condition on")));
            }
        }
        let mut out = Vec::with_capacity(count);
        match self {
            GaussSet::Whole => (0..count).for_each(|_| out.push(gaussian_vec(n, rng))),
            GaussSet::Halfspace { a, t } => {
                let a = unit(a, n)?;
                let tail = normal_sf(*t);
                for _ in 0..count {
                    let u: f64 = rng.random();
                    let s = -normal_quantile((u * tail).max(f64::MIN_POSITIVE));
                    out.push(with_projection(gaussian_vec(n, rng), &a, s));
                }
            }
            GaussSet::SymmetricSlab { a, t } => {
                let a = unit(a.as_deref().unwrap_or(&[1.0]), n)?;
                let (lo, width) = (normal_cdf(-*t), normal_cdf(*t) - normal_cdf(-*t));
                for _ in 0..count {
                    let u: f64 = rng.random();
                    let s = normal_quantile(lo + u * width).clamp(-*t, *t);
                    out.push(with_projection(gaussian_vec(n, rng), &a, s));
                }
            }
            GaussSet::CoordThreshold { t, coord } => {
                let tail = normal_sf(*t);
                for _ in 0..count {
                    let u: f64 = rng.random();
                    let s = -normal_quantile((u * tail).max(f64::MIN_POSITIVE));
                    let mut x = gaussian_vec(n, rng);
                    x[*coord] = if rng.random_bool(0.5) { s } else { -s };
                    out.push(x);
                }
            }
            GaussSet::Shell { r1, r2 } => {
                let chi = ChiSquared::new(n as f64).map_err(|e| Error::invalid(e.to_string()))?;
                let (lo, hi) = (chi.cdf(r1 * r1), chi.cdf(r2 * r2));
                for _ in 0..count {
                    let u: f64 = rng.random();
                    let r = chi.inverse_cdf(lo + u * (hi - lo)).max(0.0).sqrt().clamp(*r1, *r2);
                    let mut x = gaussian_vec(n, rng);
                    let len = norm(&x);
                    x.iter_mut().for_each(|v| *v *= r / len);
                    out.push(x);
                }
            }
            GaussSet::Custom { test, .. } => {
                let mut attempts = 0u64;
                while out.len() < count {
                    let x = gaussian_vec(n, rng);
                    attempts += 1;
                    if test(&x) {
                        out.push(x);
                    } else if attempts >= REJECTION_PILOT && (out.len() as f64) < MIN_ACCEPTANCE * attempts as f64 {
                        return Err(Error::Infeasible(format!(
                            "rejection acceptance {} / {attempts} below {MIN_ACCEPTANCE:e}",
                            out.len()
                        )));
                    }
                }
            }
        }
        Ok(out)
    }
}

fn finite(v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("non-finite set parameter"))
    }
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Replaces the component of `x` along unit `a` by `s`.
fn with_projection(mut x: Vec<f64>, a: &[f64], s: f64) -> Vec<f64> {
    let shift = s - dot(a, &x);
    x.iter_mut().zip(a).for_each(|(v, ai)| *v += shift * ai);
    x
}
