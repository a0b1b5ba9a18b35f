//! Reductions: a protocol for an inner problem becomes a protocol for an
//! outer one by transforming the inputs locally (and possibly with shared
//! randomness) before simulating the inner protocol. Costs are unchanged.

use std::sync::Arc;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{Action, Party, Protocol, PublicCoins};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::problem::{GhdParams, Problem};

const RANDOMIZER_STREAM: u64 = 0x72616e64;

/// One reduction step, described from the outer problem's point of view.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Reduction {
    /// The inner protocol, read as one for the wider gap `g`.
    WidenGap { g: f64 },
    /// Both inputs repeated `k` times; distances scale by `k`.
    Repeat { k: usize },
    /// Alice appends `0^(offset+filler)`, Bob appends `1^offset 0^filler`;
    /// distances grow by `offset`.
    Pad { offset: usize, filler: usize },
    /// Alice complements her input; distances map to `n - d`. The threshold
    /// becomes `n - t` and the output is negated.
    Complement,
    /// Padding that moves the threshold of a length-`2n` problem at `n` to
    /// `n/2 - b√n` at length `n`: `offset = round(n/2 + b√n)`,
    /// `filler = n - offset`.
    CenterShift { b: f64 },
    /// Shared `z` and permutation `σ`; both parties use `σ(input ⊕ z)`.
    RandomizeUniform,
    /// Gap-intersection-size on `[n]` through ghd on `3n` bits:
    /// `x' = (x, 1^{n-|x|} 0^{|x|}, 0^n)`, `y' = (y, 0^n, 1^{n-|y|} 0^{|y|})`,
    /// so `dist(x', y') = 2n - 2|x ∩ y|`. The output is negated.
    GisEncode,
}

impl Reduction {
    pub fn tag(&self) -> &'static str {
        match self {
            Reduction::WidenGap { .. } => "widen_gap",
            Reduction::Repeat { .. } => "repeat",
            Reduction::Pad { .. } => "pad",
            Reduction::Complement => "complement",
            Reduction::CenterShift { .. } => "center_shift",
            Reduction::RandomizeUniform => "randomize_uniform",
            Reduction::GisEncode => "gis_encode",
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Transform {
    Identity,
    Repeat(usize),
    Pad { offset: usize, filler: usize },
    ComplementAlice,
    Randomize,
    Gis,
}

/// A protocol obtained by applying a [`Reduction`] to an inner protocol.
pub struct Reduced {
    pub kind: Reduction,
    inner: Arc<dyn Protocol>,
    outer: Problem,
    transform: Transform,
    negate: bool,
}

fn inner_ghd(inner: &dyn Protocol, kind: &Reduction) -> Result<GhdParams> {
    match inner.problem() {
        Problem::Ghd(p) => Ok(p),
        Problem::Gis(_) => Err(Error::invalid(format!("{} needs an inner ghd protocol", kind.tag()))),
    }
}

fn pad_outer(inner: GhdParams, offset: usize, filler: usize) -> Result<GhdParams> {
    if offset + filler >= inner.n {
        return Err(Error::invalid(format!(
            "padding {offset}+{filler} leaves no input bits of the inner n={}",
            inner.n
        )));
    }
    GhdParams::new(inner.n - offset - filler, inner.t - offset as f64, inner.g)
}

/// Wraps `inner` (a protocol for the inner problem) into a protocol for the
/// outer problem of `kind`.
pub fn apply_reduction(kind: Reduction, inner: Arc<dyn Protocol>) -> Result<Reduced> {
    let p = inner_ghd(inner.as_ref(), &kind)?;
    let (outer, transform, negate) = match kind {
        Reduction::WidenGap { g } => {
            if g < p.g {
                return Err(Error::invalid(format!("widen_gap to g={g} below the inner gap {}", p.g)));
            }
            (Problem::Ghd(GhdParams::new(p.n, p.t, g)?), Transform::Identity, false)
        }
        Reduction::Repeat { k } => {
            if k == 0 || p.n % k != 0 {
                return Err(Error::invalid(format!("repeat factor {k} does not divide inner n={}", p.n)));
            }
            let kf = k as f64;
            (Problem::Ghd(GhdParams::new(p.n / k, p.t / kf, p.g / kf)?), Transform::Repeat(k), false)
        }
        Reduction::Pad { offset, filler } => {
            (Problem::Ghd(pad_outer(p, offset, filler)?), Transform::Pad { offset, filler }, false)
        }
        Reduction::Complement => {
            // A 0-input at distance d <= t - g lands at n - d >= (n - t) + g,
            // which the inner promise labels 1 only when strict; distances
            // exactly on that boundary are inner star inputs.
            let nf = p.n as f64;
            (Problem::Ghd(GhdParams::new(p.n, nf - p.t, p.g)?), Transform::ComplementAlice, true)
        }
        Reduction::CenterShift { b } => {
            if p.n % 2 != 0 || b <= 0.0 {
                return Err(Error::invalid("center_shift needs an even inner length and b > 0"));
            }
            let n = p.n / 2;
            let nf = n as f64;
            let offset = (nf / 2.0 + b * nf.sqrt()).round();
            if offset > nf {
                return Err(Error::invalid(format!("center_shift b={b} too large for n={n}")));
            }
            let offset = offset as usize;
            let filler = n - offset;
            (Problem::Ghd(pad_outer(p, offset, filler)?), Transform::Pad { offset, filler }, false)
        }
        Reduction::RandomizeUniform => (Problem::Ghd(p), Transform::Randomize, false),
        Reduction::GisEncode => {
            if p.n % 3 != 0 {
                return Err(Error::invalid(format!("gis_encode needs inner length 3n, got {}", p.n)));
            }
            // Inner threshold 2n - 2t and gap 2g. As with complement, an
            // intersection of exactly t - g maps to the inner boundary.
            let n = p.n / 3;
            let t = (2.0 * n as f64 - p.t) / 2.0;
            (Problem::Gis(GhdParams::new(n, t, p.g / 2.0)?), Transform::Gis, true)
        }
    };
    Ok(Reduced { kind, inner, outer, transform, negate })
}

fn randomizer(len: usize, coins: &PublicCoins) -> (BitString, Vec<usize>) {
    let mut rng = coins.rng(RANDOMIZER_STREAM);
    let z = BitString::random(len, &mut rng);
    let mut perm: Vec<usize> = (0..len).collect();
    perm.shuffle(&mut rng);
    (z, perm)
}

fn gis_block(v: &BitString) -> BitString {
    let n = v.len();
    let w = v.weight();
    BitString::ones(n - w).concat(&BitString::zeros(w))
}

impl Reduced {
    pub fn inner(&self) -> &Arc<dyn Protocol> {
        &self.inner
    }

    /// The inner-protocol inputs `(x', y')` the parties derive from `(x, y)`.
    pub fn transform_inputs(&self, x: &BitString, y: &BitString, coins: &PublicCoins) -> Result<(BitString, BitString)> {
        Ok((self.alice_input(x, coins)?, self.bob_input(y, coins)?))
    }

    fn alice_input(&self, x: &BitString, coins: &PublicCoins) -> Result<BitString> {
        Ok(match self.transform {
            Transform::Identity => x.clone(),
            Transform::Repeat(k) => x.repeat(k),
            Transform::Pad { offset, filler } => x.concat(&BitString::zeros(offset + filler)),
            Transform::ComplementAlice => x.complement(),
            Transform::Randomize => {
                let (z, perm) = randomizer(x.len(), coins);
                x.xor(&z)?.permute(&perm)?
            }
            Transform::Gis => x.concat(&gis_block(x)).concat(&BitString::zeros(x.len())),
        })
    }

    fn bob_input(&self, y: &BitString, coins: &PublicCoins) -> Result<BitString> {
        Ok(match self.transform {
            Transform::Identity | Transform::ComplementAlice => y.clone(),
            Transform::Repeat(k) => y.repeat(k),
            Transform::Pad { offset, filler } => y.concat(&BitString::ones(offset)).concat(&BitString::zeros(filler)),
            Transform::Randomize => {
                let (z, perm) = randomizer(y.len(), coins);
                y.xor(&z)?.permute(&perm)?
            }
            Transform::Gis => y.concat(&BitString::zeros(y.len())).concat(&gis_block(y)),
        })
    }

    /// Only the randomizing step consumes shared coins; every other step hands
    /// them to the inner protocol untouched.
    fn inner_coins(&self, coins: &PublicCoins) -> PublicCoins {
        match self.transform {
            Transform::Randomize => coins.child(),
            _ => *coins,
        }
    }

    fn wrap(&self, party: Box<dyn Party>) -> Box<dyn Party> {
        if self.negate {
            Box::new(Negate(party))
        } else {
            party
        }
    }
}

struct Negate(Box<dyn Party>);

impl Party for Negate {
    fn step(&mut self, incoming: Option<&BitString>) -> Result<Action> {
        Ok(match self.0.step(incoming)? {
            Action::Output(b) => Action::Output(!b),
            a => a,
        })
    }
}

/// Party that failed to derive its inner input; reports the error when run.
struct Broken(Option<Error>);

impl Party for Broken {
    fn step(&mut self, _: Option<&BitString>) -> Result<Action> {
        Err(self.0.take().unwrap_or_else(|| Error::invalid("input transform failed")))
    }
}

impl Protocol for Reduced {
    fn name(&self) -> String {
        format!("{}({})", self.kind.tag(), self.inner.name())
    }

    fn problem(&self) -> Problem {
        self.outer
    }

    fn declared_cost(&self) -> usize {
        self.inner.declared_cost()
    }

    fn coin_outcomes(&self) -> Option<u64> {
        match self.transform {
            Transform::Randomize => None,
            _ => self.inner.coin_outcomes(),
        }
    }

    fn alice(&self, x: &BitString, coins: &PublicCoins) -> Box<dyn Party> {
        match self.alice_input(x, coins) {
            Ok(xi) => self.wrap(self.inner.alice(&xi, &self.inner_coins(coins))),
            Err(e) => Box::new(Broken(Some(e))),
        }
    }

    fn bob(&self, y: &BitString, coins: &PublicCoins) -> Box<dyn Party> {
        match self.bob_input(y, coins) {
            Ok(yi) => self.wrap(self.inner.bob(&yi, &self.inner_coins(coins))),
            Err(e) => Box::new(Broken(Some(e))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::hamming_distance;
    use crate::protocols::{run_seeded, trivial_protocol};
    use crate::rng::stream_rng;
    use proptest::prelude::*;

    fn trivial(n: usize, t: f64, g: f64) -> Arc<dyn Protocol> {
        Arc::new(trivial_protocol(GhdParams::new(n, t, g).unwrap()))
    }

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn outer_parameters() {
        let r = apply_reduction(Reduction::Repeat { k: 3 }, trivial(12, 6.0, 3.0)).unwrap();
        assert_eq!(r.problem(), Problem::Ghd(GhdParams::new(4, 2.0, 1.0).unwrap()));
        let r = apply_reduction(Reduction::Pad { offset: 2, filler: 1 }, trivial(10, 5.0, 1.0)).unwrap();
        assert_eq!(r.problem(), Problem::Ghd(GhdParams::new(7, 3.0, 1.0).unwrap()));
        let r = apply_reduction(Reduction::CenterShift { b: 1.0 }, trivial(32, 16.0, 32f64.sqrt())).unwrap();
        // n = 16, offset = 8 + 4 = 12, outer t = 16 - 12 = 4 = 8 - 1·4.
        assert_eq!(r.problem(), Problem::Ghd(GhdParams::new(16, 4.0, 32f64.sqrt()).unwrap()));
        let r = apply_reduction(Reduction::GisEncode, trivial(12, 4.0, 2.0)).unwrap();
        assert_eq!(r.problem(), Problem::Gis(GhdParams::new(4, 2.0, 1.0).unwrap()));
        assert!(apply_reduction(Reduction::WidenGap { g: 0.5 }, trivial(8, 4.0, 1.0)).is_err());
        assert!(apply_reduction(Reduction::Repeat { k: 3 }, trivial(8, 4.0, 1.0)).is_err());
        let gis = Arc::new(r) as Arc<dyn Protocol>;
        assert!(apply_reduction(Reduction::Complement, gis).is_err());
    }

    #[test]
    fn worked_examples() {
        let r = apply_reduction(Reduction::Repeat { k: 3 }, trivial(6, 3.0, 1.0)).unwrap();
        let (a, b) = r.transform_inputs(&bs("01"), &bs("11"), &PublicCoins::Seeded(0)).unwrap();
        assert_eq!((a.to_string().as_str(), b.to_string().as_str()), ("010101", "111111"));
        assert_eq!(hamming_distance(&a, &b).unwrap(), 3);
        let r = apply_reduction(Reduction::Pad { offset: 2, filler: 1 }, trivial(7, 3.0, 1.0)).unwrap();
        let (a, b) = r.transform_inputs(&bs("1010"), &bs("1010"), &PublicCoins::Seeded(0)).unwrap();
        assert_eq!(hamming_distance(&a, &b).unwrap(), 2);
    }

    #[test]
    fn reduced_trivial_protocols_are_correct_off_the_boundary() {
        let mut rng = stream_rng(4, 0);
        let cases: Vec<(Reduction, Arc<dyn Protocol>)> = vec![
            (Reduction::Repeat { k: 2 }, trivial(16, 8.0, 2.0)),
            (Reduction::Pad { offset: 3, filler: 2 }, trivial(13, 7.0, 1.5)),
            (Reduction::Complement, trivial(8, 3.0, 1.5)),
            (Reduction::RandomizeUniform, trivial(8, 4.0, 1.5)),
            (Reduction::GisEncode, trivial(24, 8.0, 1.0)),
        ];
        for (kind, inner) in cases {
            let r = apply_reduction(kind, inner).unwrap();
            let n = r.input_len();
            for seed in 0..300 {
                let x = BitString::random(n, &mut rng);
                let y = BitString::random(n, &mut rng);
                let (out, t) = run_seeded(&r, &x, &y, seed).unwrap();
                assert_eq!(t.total_bits, r.declared_cost());
                assert!(!r.problem().label(&x, &y).unwrap().is_error(out), "{} on {x} {y}", r.name());
            }
        }
    }

    proptest! {
        #[test]
        fn distance_transfer(n in 1usize..40, k in 1usize..5, offset in 0usize..6, filler in 0usize..6, seed in any::<u64>()) {
            let mut rng = stream_rng(seed, 0);
            let x = BitString::random(n, &mut rng);
            let y = BitString::random(n, &mut rng);
            let d = hamming_distance(&x, &y).unwrap();
            let coins = PublicCoins::Seeded(seed);
            let nf = n as f64;
            let dist = |r: &Reduced| {
                let (a, b) = r.transform_inputs(&x, &y, &coins).unwrap();
                hamming_distance(&a, &b).unwrap()
            };
            let rep = apply_reduction(Reduction::Repeat { k }, trivial(k * n, nf / 2.0 * k as f64, 0.0)).unwrap();
            prop_assert_eq!(dist(&rep), k * d);
            let pad = apply_reduction(Reduction::Pad { offset, filler }, trivial(n + offset + filler, offset as f64, 0.0)).unwrap();
            prop_assert_eq!(dist(&pad), d + offset);
            let comp = apply_reduction(Reduction::Complement, trivial(n, nf / 2.0, 0.0)).unwrap();
            prop_assert_eq!(dist(&comp), n - d);
            let rnd = apply_reduction(Reduction::RandomizeUniform, trivial(n, nf / 2.0, 0.0)).unwrap();
            prop_assert_eq!(dist(&rnd), d);
            let gis = apply_reduction(Reduction::GisEncode, trivial(3 * n, nf, 0.0)).unwrap();
            let inter = x.and(&y).unwrap().weight();
            prop_assert_eq!(2 * inter, x.weight() + y.weight() - d);
            prop_assert_eq!(dist(&gis), 2 * n - 2 * inter);
        }
    }
}
