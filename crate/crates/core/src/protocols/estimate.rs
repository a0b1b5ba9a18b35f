//! Error estimation: Monte Carlo with normal-approximation intervals, and an
//! exact mode that enumerates all inputs and all coin outcomes.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_protocol, Protocol, PublicCoins};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::laws::{sample_pair_at_distance, CubePairLaw};
use crate::problem::{Label, Problem};
use crate::rng::{derive_seed, stream_rng, Rng as LabRng};
use crate::stats::Proportion;

/// Largest input length for [`exact_error`].
pub const MAX_EXACT_N: usize = 12;
const MAX_EXACT_RUNS: u128 = 1 << 34;

/// Which error is measured.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "spec", rename_all = "snake_case")]
pub enum ErrorSpec {
    /// `max` over promise inputs. Monte Carlo samples pairs on the two
    /// promise levels closest to the gap (the protocols here err most there).
    WorstCasePromise,
    /// `Pr_{(x,y) ~ ξ_p}[promise input and wrong output]`.
    Xi { p: f64 },
    /// `max` over an explicit list of input pairs.
    Pairs { pairs: Vec<(BitString, BitString)> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMode {
    WorstCasePromise,
    Distributional,
    ByDistance,
}

/// Error on one group of inputs: a promise level (distance for ghd,
/// intersection size for gis) or one explicit pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryClass {
    pub label: Label,
    pub level: usize,
    pub error: f64,
    pub ci95: f64,
    pub trials: u64,
}

/// `δ_d`: error on uniform pairs at distance `d`; zero inside the gap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceError {
    pub d: usize,
    pub label: Label,
    pub delta: f64,
    pub ci95: f64,
    pub trials: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub mode: ErrorMode,
    pub value: f64,
    pub ci95: f64,
    pub trials: u64,
    pub exact: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<BoundaryClass>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub profile: Vec<DistanceError>,
}

impl ErrorEstimate {
    /// `Σ_d w_d δ_d` with interval `sqrt(Σ_d w_d² ci_d²)`, for a profile.
    pub fn mix_profile(&self, weights: &[f64]) -> Result<(f64, f64)> {
        if self.mode != ErrorMode::ByDistance || weights.len() != self.profile.len() {
            return Err(Error::invalid("weights must match a by-distance profile"));
        }
        let value = self.profile.iter().zip(weights).map(|(e, w)| w * e.delta).sum();
        let var: f64 = self.profile.iter().zip(weights).map(|(e, w)| (w * e.ci95).powi(2)).sum();
        Ok((value, var.sqrt()))
    }
}

/// Extreme promise levels: the largest level labelled 0 and the smallest
/// labelled 1.
fn boundary_levels(problem: &Problem) -> Vec<(Label, usize)> {
    let p = problem.params();
    let mut out = Vec::new();
    if let Some(d) = p.last_zero_distance() {
        out.push((Label::Zero, d));
    }
    if let Some(d) = p.first_one_distance() {
        out.push((Label::One, d));
    }
    out
}

/// A random input pair at the given level of the problem.
fn sample_at_level(problem: &Problem, level: usize, rng: &mut LabRng) -> (BitString, BitString) {
    let n = problem.input_len();
    match problem {
        Problem::Ghd(_) => sample_pair_at_distance(n, level, rng),
        Problem::Gis(_) => {
            // `level` common elements; every other coordinate is one of
            // (0,0), (1,0), (0,1) uniformly.
            let common = rand::seq::index::sample(rng, n, level).into_vec();
            let mut x = BitString::zeros(n);
            let mut y = BitString::zeros(n);
            let mut is_common = vec![false; n];
            for &i in &common {
                is_common[i] = true;
                x.set(i, true);
                y.set(i, true);
            }
            for i in (0..n).filter(|&i| !is_common[i]) {
                match rng.random_range(0..3) {
                    1 => x.set(i, true),
                    2 => y.set(i, true),
                    _ => {}
                }
            }
            (x, y)
        }
    }
}

/// Count of wrong outputs over `trials` draws of `(x, y, coins)`.
fn count_errors<F>(p: &dyn Protocol, trials: u64, seed: u64, draw: F) -> Result<u64>
where
    F: Fn(&mut LabRng) -> (BitString, BitString) + Sync,
{
    let problem = p.problem();
    (0..trials)
        .into_par_iter()
        .map(|i| -> Result<u64> {
            let mut rng = stream_rng(derive_seed(seed, i), 0);
            let (x, y) = draw(&mut rng);
            let coins = PublicCoins::Seeded(rng.random());
            let (out, _) = run_protocol(p, &x, &y, &coins)?;
            Ok(u64::from(problem.label(&x, &y)?.is_error(out)))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Monte Carlo estimate of the error selected by `spec`.
pub fn estimate_error(p: &dyn Protocol, spec: &ErrorSpec, trials: u64, seed: u64) -> Result<ErrorEstimate> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let problem = p.problem();
    let n = p.input_len();
    match spec {
        ErrorSpec::WorstCasePromise => {
            let mut classes = Vec::new();
            for (c, (label, level)) in boundary_levels(&problem).into_iter().enumerate() {
                let errors = count_errors(p, trials, derive_seed(seed, c as u64), |rng| {
                    sample_at_level(&problem, level, rng)
                })?;
                let prop = Proportion::from_counts(errors, trials);
                classes.push(BoundaryClass { label, level, error: prop.value, ci95: prop.ci95, trials });
            }
            Ok(worst_of(ErrorMode::WorstCasePromise, classes, false))
        }
        ErrorSpec::Xi { p: rho } => {
            let law = CubePairLaw::new(n, *rho)?;
            let errors = count_errors(p, trials, seed, |rng| law.sample_with(rng))?;
            let prop = Proportion::from_counts(errors, trials);
            Ok(ErrorEstimate {
                mode: ErrorMode::Distributional,
                value: prop.value,
                ci95: prop.ci95,
                trials,
                exact: false,
                classes: Vec::new(),
                profile: Vec::new(),
            })
        }
        ErrorSpec::Pairs { pairs } => {
            let mut classes = Vec::new();
            for (i, (x, y)) in pairs.iter().enumerate() {
                let label = problem.label(x, y)?;
                let errors = count_errors(p, trials, derive_seed(seed, i as u64), |_| (x.clone(), y.clone()))?;
                let prop = Proportion::from_counts(errors, trials);
                classes.push(BoundaryClass { label, level: pair_level(&problem, x, y)?, error: prop.value, ci95: prop.ci95, trials });
            }
            Ok(worst_of(ErrorMode::WorstCasePromise, classes, false))
        }
    }
}

fn pair_level(problem: &Problem, x: &BitString, y: &BitString) -> Result<usize> {
    Ok(match problem {
        Problem::Ghd(_) => crate::bits::hamming_distance(x, y)?,
        Problem::Gis(_) => x.and(y)?.weight(),
    })
}

fn worst_of(mode: ErrorMode, classes: Vec<BoundaryClass>, exact: bool) -> ErrorEstimate {
    let worst = classes
        .iter()
        .max_by(|a, b| a.error.total_cmp(&b.error))
        .map(|c| (c.error, c.ci95))
        .unwrap_or((0.0, 0.0));
    ErrorEstimate {
        mode,
        value: worst.0,
        ci95: worst.1,
        trials: classes.iter().map(|c| c.trials).sum(),
        exact,
        classes,
        profile: Vec::new(),
    }
}

/// Exact error by enumerating all `4^n` inputs and every coin outcome.
/// Requires `n <= 12` and a protocol with enumerable randomness.
pub fn exact_error(p: &dyn Protocol, spec: &ErrorSpec) -> Result<ErrorEstimate> {
    let n = p.input_len();
    if n > MAX_EXACT_N {
        return Err(Error::Capacity(format!("exact error needs n <= {MAX_EXACT_N}, got {n}")));
    }
    let outcomes = p
        .coin_outcomes()
        .ok_or_else(|| Error::invalid(format!("{} has no enumerable randomness", p.name())))?;
    let problem = p.problem();
    let wrong_fraction = |x: &BitString, y: &BitString| -> Result<f64> {
        let label = problem.label(x, y)?;
        if !label.is_promise() {
            return Ok(0.0);
        }
        let mut wrong = 0u64;
        for j in 0..outcomes {
            let (out, _) = run_protocol(p, x, y, &PublicCoins::Enumerated(j))?;
            wrong += u64::from(label.is_error(out));
        }
        Ok(wrong as f64 / outcomes as f64)
    };
    if let ErrorSpec::Pairs { pairs } = spec {
        let mut classes = Vec::new();
        for (x, y) in pairs {
            classes.push(BoundaryClass {
                label: problem.label(x, y)?,
                level: pair_level(&problem, x, y)?,
                error: wrong_fraction(x, y)?,
                ci95: 0.0,
                trials: outcomes,
            });
        }
        return Ok(worst_of(ErrorMode::WorstCasePromise, classes, true));
    }
    let size = 1u64 << n;
    if u128::from(size) * u128::from(size) * u128::from(outcomes) > MAX_EXACT_RUNS {
        return Err(Error::Capacity(format!("{outcomes} coin outcomes over 4^{n} inputs is too many runs")));
    }
    // Per x: (max error on 0-inputs, max on 1-inputs, ξ-weighted error sum).
    let flip = match spec {
        ErrorSpec::Xi { p } => {
            crate::laws::check_correlation(*p)?;
            (1.0 - p) / 2.0
        }
        _ => 0.5,
    };
    let per_x: Vec<(Option<(f64, usize)>, Option<(f64, usize)>, f64)> = (0..size)
        .into_par_iter()
        .map(|xv| -> Result<_> {
            let x = BitString::from_u64(xv, n);
            let mut worst0: Option<(f64, usize)> = None;
            let mut worst1: Option<(f64, usize)> = None;
            let mut weighted = 0.0;
            for yv in 0..size {
                let y = BitString::from_u64(yv, n);
                let label = problem.label(&x, &y)?;
                if !label.is_promise() {
                    continue;
                }
                let e = wrong_fraction(&x, &y)?;
                let level = pair_level(&problem, &x, &y)?;
                let slot = if label == Label::Zero { &mut worst0 } else { &mut worst1 };
                if slot.is_none_or(|(w, _)| e > w) {
                    *slot = Some((e, level));
                }
                let d = (xv ^ yv).count_ones() as i32;
                weighted += e * 0.5f64.powi(n as i32) * flip.powi(d) * (1.0 - flip).powi(n as i32 - d);
            }
            Ok((worst0, worst1, weighted))
        })
        .collect::<Result<_>>()?;
    match spec {
        ErrorSpec::Xi { .. } => Ok(ErrorEstimate {
            mode: ErrorMode::Distributional,
            value: per_x.iter().map(|r| r.2).sum(),
            ci95: 0.0,
            trials: outcomes,
            exact: true,
            classes: Vec::new(),
            profile: Vec::new(),
        }),
        _ => {
            let pick = |sel: fn(&(Option<(f64, usize)>, Option<(f64, usize)>, f64)) -> Option<(f64, usize)>| {
                per_x.iter().filter_map(sel).max_by(|a, b| a.0.total_cmp(&b.0))
            };
            let mut classes = Vec::new();
            for (label, best) in [(Label::Zero, pick(|r| r.0)), (Label::One, pick(|r| r.1))] {
                if let Some((error, level)) = best {
                    classes.push(BoundaryClass { label, level, error, ci95: 0.0, trials: outcomes });
                }
            }
            Ok(worst_of(ErrorMode::WorstCasePromise, classes, true))
        }
    }
}

/// `δ_d` for every distance `d`, each from `trials_per_d` uniform pairs at
/// distance `d` (a uniform `x`, then a uniform `d`-subset flipped). Distances
/// inside the gap are not run and report `δ_d = 0`.
pub fn error_by_distance_profile(p: &dyn Protocol, trials_per_d: u64, seed: u64) -> Result<ErrorEstimate> {
    if trials_per_d == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let problem = p.problem();
    let Problem::Ghd(params) = problem else {
        return Err(Error::invalid("distance profile needs a distance-labelled problem"));
    };
    let n = params.n;
    let mut profile = Vec::with_capacity(n + 1);
    for d in 0..=n {
        let label = params.label_at_distance(d);
        if !label.is_promise() {
            profile.push(DistanceError { d, label, delta: 0.0, ci95: 0.0, trials: 0 });
            continue;
        }
        let errors = count_errors(p, trials_per_d, derive_seed(seed, d as u64), |rng| sample_pair_at_distance(n, d, rng))?;
        let prop = Proportion::from_counts(errors, trials_per_d);
        profile.push(DistanceError { d, label, delta: prop.value, ci95: prop.ci95, trials: trials_per_d });
    }
    let worst = profile.iter().max_by(|a, b| a.delta.total_cmp(&b.delta)).expect("n >= 1");
    Ok(ErrorEstimate {
        mode: ErrorMode::ByDistance,
        value: worst.delta,
        ci95: worst.ci95,
        trials: profile.iter().map(|e| e.trials).sum(),
        exact: false,
        classes: Vec::new(),
        profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::GhdParams;
    use crate::protocols::{
        apply_reduction, sampling_error_at_distance, sampling_protocol, trivial_protocol, Reduction,
    };
    use std::sync::Arc;

    #[test]
    fn trivial_protocol_never_errs() {
        let p = trivial_protocol(GhdParams::new(10, 5.0, 1.0).unwrap());
        for spec in [ErrorSpec::WorstCasePromise, ErrorSpec::Xi { p: 0.3 }] {
            assert_eq!(estimate_error(&p, &spec, 500, 1).unwrap().value, 0.0);
            assert_eq!(exact_error(&p, &spec).unwrap().value, 0.0);
        }
        let prof = error_by_distance_profile(&p, 50, 2).unwrap();
        assert!(prof.profile.iter().all(|e| e.delta == 0.0));
    }

    #[test]
    fn exact_worst_case_matches_hypergeometric() {
        let params = GhdParams::new(6, 3.0, 2.0).unwrap();
        let p = sampling_protocol(params, 4).unwrap();
        let exact = exact_error(&p, &ErrorSpec::WorstCasePromise).unwrap();
        let formula = (0..=6).map(|d| sampling_error_at_distance(&p, d)).fold(0.0, f64::max);
        assert!((exact.value - formula).abs() < 1e-12);
        let mc = estimate_error(&p, &ErrorSpec::WorstCasePromise, 20_000, 5).unwrap();
        assert!((mc.value - exact.value).abs() <= mc.ci95 + 1e-12);
    }

    #[test]
    fn gis_boundary_sampler_hits_level() {
        let problem = Problem::Gis(GhdParams::new(9, 4.0, 1.0).unwrap());
        let mut rng = stream_rng(1, 0);
        for level in 0..=9 {
            let (x, y) = sample_at_level(&problem, level, &mut rng);
            assert_eq!(x.and(&y).unwrap().weight(), level);
        }
    }

    #[test]
    fn widening_the_gap_cannot_increase_error() {
        let inner = Arc::new(sampling_protocol(GhdParams::new(40, 20.0, 2.0).unwrap(), 10).unwrap());
        let wide = apply_reduction(Reduction::WidenGap { g: 6.0 }, inner.clone()).unwrap();
        let narrow = estimate_error(inner.as_ref(), &ErrorSpec::Xi { p: 0.0 }, 4000, 3).unwrap();
        let wider = estimate_error(&wide, &ErrorSpec::Xi { p: 0.0 }, 4000, 3).unwrap();
        assert!(wider.value <= narrow.value);
    }

    #[test]
    fn profile_is_zero_in_the_gap() {
        let p = sampling_protocol(GhdParams::new(20, 10.0, 3.0).unwrap(), 6).unwrap();
        let prof = error_by_distance_profile(&p, 200, 9).unwrap();
        for e in &prof.profile {
            if e.label == Label::Star {
                assert_eq!((e.delta, e.trials), (0.0, 0));
            }
        }
        let w = crate::laws::distance_law(20, 0.0).unwrap().pmf;
        let (v, ci) = prof.mix_profile(&w).unwrap();
        assert!(v >= 0.0 && ci >= 0.0);
    }
}
