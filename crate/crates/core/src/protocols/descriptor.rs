//! JSON protocol descriptors: `{"name": ..., "params": {...}, "reductions": [...]}`.
//! Reductions are applied in list order, each wrapping the protocol built so
//! far (innermost first).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{apply_reduction, hyperplane_gip_protocol, sampling_protocol, trivial_protocol, Protocol, Reduction};
use crate::error::{Error, Result};
use crate::problem::GhdParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolDescriptor {
    pub name: String,
    pub params: serde_json::Value,
    #[serde(default)]
    pub reductions: Vec<Reduction>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TrivialParams {
    n: usize,
    t: f64,
    g: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SamplingParams {
    n: usize,
    t: f64,
    g: f64,
    k: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HyperplaneParams {
    dim: usize,
    k: usize,
    eps: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StreamParams {
    n: usize,
    t: f64,
    g: f64,
    passes: usize,
    sketch_size: usize,
}

fn parse<T: for<'de> Deserialize<'de>>(name: &str, v: &serde_json::Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::invalid(format!("bad params for {name}: {e}")))
}

/// Builds the protocol a descriptor names. Base protocols: `trivial`
/// (`n, t, g`), `sampling` (`n, t, g, k`), `hyperplane` (`dim, k, eps`) and
/// `f0_stream` (`n, t, g, passes, sketch_size`).
pub fn build_protocol(desc: &ProtocolDescriptor) -> Result<Arc<dyn Protocol>> {
    let mut p: Arc<dyn Protocol> = match desc.name.as_str() {
        "trivial" => {
            let p: TrivialParams = parse("trivial", &desc.params)?;
            Arc::new(trivial_protocol(GhdParams::new(p.n, p.t, p.g)?))
        }
        "sampling" => {
            let s: SamplingParams = parse("sampling", &desc.params)?;
            Arc::new(sampling_protocol(GhdParams::new(s.n, s.t, s.g)?, s.k)?)
        }
        "hyperplane" => {
            let h: HyperplaneParams = parse("hyperplane", &desc.params)?;
            Arc::new(hyperplane_gip_protocol(h.dim, h.k, h.eps)?)
        }
        "f0_stream" => {
            let s: StreamParams = parse("f0_stream", &desc.params)?;
            let sketch = crate::streams::kmv_f0(s.sketch_size)?;
            Arc::new(crate::streams::streaming_to_protocol(&sketch, s.passes, GhdParams::new(s.n, s.t, s.g)?)?.0)
        }
        other => return Err(Error::invalid(format!("unknown protocol {other:?}"))),
    };
    for r in &desc.reductions {
        p = Arc::new(apply_reduction(*r, p)?);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Problem;

    #[test]
    fn descriptor_round_trip_and_build() {
        let text = r#"{"name":"sampling","params":{"n":32,"t":16,"g":8,"k":8},
            "reductions":[{"kind":"randomize_uniform"},{"kind":"center_shift","b":1.0}]}"#;
        let d: ProtocolDescriptor = serde_json::from_str(text).unwrap();
        assert_eq!(d.reductions.len(), 2);
        let p = build_protocol(&d).unwrap();
        assert_eq!(p.input_len(), 16);
        assert_eq!(p.declared_cost(), 8);
        assert_eq!(p.name(), "center_shift(randomize_uniform(sampling(k=8)))");
        let again: ProtocolDescriptor = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(again, d);
        let Problem::Ghd(outer) = p.problem() else { panic!() };
        assert_eq!(outer.t, 4.0);
    }

    #[test]
    fn unknown_names_and_fields_rejected() {
        let d = ProtocolDescriptor { name: "magic".into(), params: serde_json::json!({}), reductions: vec![] };
        assert!(build_protocol(&d).is_err());
        let d = ProtocolDescriptor {
            name: "trivial".into(),
            params: serde_json::json!({"n": 4, "t": 2, "g": 1, "k": 3}),
            reductions: vec![],
        };
        assert!(build_protocol(&d).is_err());
    }
}
