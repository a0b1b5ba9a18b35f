//! Command-line value parsers.

use std::str::FromStr;

use ghdlab::fraction::Fraction;
use ghdlab::gauss::GaussSet;
use ghdlab::bounds::PairDistribution;

/// A real given as a decimal or an exact `a/b`.
pub fn real(s: &str) -> Result<f64, String> {
    if s.contains('/') {
        return Fraction::from_str(s).map(Fraction::to_f64).map_err(|e| e.to_string());
    }
    let v: f64 = s.trim().parse().map_err(|_| format!("cannot parse {s:?} as a number"))?;
    if !v.is_finite() {
        return Err(format!("{s:?} is not finite"));
    }
    Ok(v)
}

pub fn fraction(s: &str) -> Result<Fraction, String> {
    Fraction::from_str(s).map_err(|e| e.to_string())
}

/// A value that may be derived from the other parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Auto {
    Auto,
    Value(f64),
}

pub fn auto_real(s: &str) -> Result<Auto, String> {
    if s == "auto" {
        Ok(Auto::Auto)
    } else {
        real(s).map(Auto::Value)
    }
}

/// `slab:T`, `slab:T:a1,a2,..`, `halfspace:T[:a1,..]`, `shell:R1:R2`,
/// `coord:T[:i]`, `whole`, or the set's JSON form.
pub fn gauss_set(s: &str) -> Result<GaussSet, String> {
    if s.trim_start().starts_with('{') {
        return serde_json::from_str(s).map_err(|e| e.to_string());
    }
    let parts: Vec<&str> = s.split(':').collect();
    let num = |i: usize| -> Result<f64, String> {
        parts.get(i).ok_or_else(|| format!("{s:?}: missing field {i}")).and_then(|v| real(v))
    };
    let direction = |i: usize| -> Result<Option<Vec<f64>>, String> {
        parts.get(i).map(|v| v.split(',').map(real).collect()).transpose()
    };
    let set = match parts[0] {
        "whole" => GaussSet::Whole,
        "slab" => GaussSet::SymmetricSlab { a: direction(2)?, t: num(1)? },
        "halfspace" => GaussSet::Halfspace { a: direction(2)?.unwrap_or_else(|| vec![1.0]), t: num(1)? },
        "shell" => GaussSet::Shell { r1: num(1)?, r2: num(2)? },
        "coord" => GaussSet::CoordThreshold {
            t: num(1)?,
            coord: parts.get(2).map(|v| v.parse().map_err(|_| format!("bad coordinate {v:?}"))).transpose()?.unwrap_or(0),
        },
        other => return Err(format!("unknown set kind {other:?}")),
    };
    Ok(set)
}

/// `xi:P`, `uniform` (= `xi:0`), or the law's JSON form.
pub fn pair_law(s: &str) -> Result<PairDistribution, String> {
    if s.trim_start().starts_with('{') {
        return serde_json::from_str(s).map_err(|e| e.to_string());
    }
    match s.split_once(':') {
        Some(("xi", p)) => Ok(PairDistribution::Xi { p: real(p)? }),
        None if s == "uniform" => Ok(PairDistribution::Xi { p: 0.0 }),
        _ => Err(format!("unknown pair law {s:?}")),
    }
}

/// Inline JSON, or `@path` to read it from a file.
pub fn json_text(s: &str) -> Result<String, String> {
    match s.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}")),
        None => Ok(s.to_string()),
    }
}
