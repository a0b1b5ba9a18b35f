use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{delta_orthogonality, kl_to_gaussian, GaussSet, KlEstimate, KlMethod, BATCH};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub direction: Vec<f64>,
    pub kl_estimate: KlEstimate,
    /// Norm of the direction's component orthogonal to the earlier
    /// directions: `⟨x, y_k⟩ = α⟨x, y*_k⟩ + ⟨x, y_k - α y*_k⟩` with `y*_k`
    /// the normalized residual. Absent for the first direction.
    pub alpha: Option<f64>,
    pub decomposition_note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionExperiment {
    pub reports: Vec<ProjectionReport>,
    /// Fraction of directions whose estimate is at most `eps`; only for
    /// orthonormal families.
    pub fraction_within_eps: Option<f64>,
    pub note: String,
}

/// Draws `samples` points from `γ^n` conditioned on `set` and estimates the
/// divergence from the standard normal of each one-dimensional projection.
/// All directions share the same draws.
pub fn projection_experiment(
    set: &GaussSet,
    n: usize,
    directions: &[Vec<f64>],
    samples: usize,
    seed: u64,
    eps: Option<f64>,
) -> Result<ProjectionExperiment> {
    if directions.is_empty() {
        return Err(Error::invalid("at least one direction required"));
    }
    if directions.iter().any(|d| d.len() != n) {
        return Err(Error::invalid(format!("directions must have dimension {n}")));
    }
    let geometry = delta_orthogonality(directions, 0.0)?;
    let batches = samples.div_ceil(BATCH);
    let parts: Vec<Vec<Vec<f64>>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(derive_seed(seed, b as u64), 0);
            let len = (samples - b * BATCH).min(BATCH);
            let xs = set.sample_conditional(n, len, &mut rng)?;
            Ok(directions
                .iter()
                .map(|d| xs.iter().map(|x| x.iter().zip(d).map(|(a, b)| a * b).sum()).collect())
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut reports = Vec::with_capacity(directions.len());
    for (k, d) in directions.iter().enumerate() {
        let values: Vec<f64> = parts.iter().flat_map(|p| p[k].iter().copied()).collect();
        let kl_estimate = kl_to_gaussian(&values, KlMethod::Binned)?;
        let (alpha, decomposition_note) = if k == 0 {
            (None, "first direction".to_string())
        } else {
            let a = geometry.residual_norms[k];
            let note = format!("squared projection onto earlier directions {:.3e}", geometry.proj_sq[k]);
            (Some(a), note)
        };
        reports.push(ProjectionReport { direction: d.clone(), kl_estimate, alpha, decomposition_note });
    }
    let orthonormal = geometry.max_proj_sq <= 1e-12;
    let fraction_within_eps = match eps {
        Some(e) if orthonormal => {
            Some(reports.iter().filter(|r| r.kl_estimate.value <= e).count() as f64 / reports.len() as f64)
        }
        _ => None,
    };
    let note = if orthonormal {
        "orthonormal family; each projection is estimated unconditionally, not conditioned on earlier projections"
    } else {
        "directions not orthonormal; no fraction reported"
    };
    Ok(ProjectionExperiment { reports, fraction_within_eps, note: note.to_string() })
}
