//! Two-party public-coin protocols with exact bit accounting.
//!
//! A [`Protocol`] builds one [`Party`] per player from that player's input and
//! the shared [`PublicCoins`]. The runner alternates between the parties,
//! starting with Alice, delivering each message to the other side until one
//! of them outputs a bit. The output bit itself is not counted as
//! communication.

mod builtin;
mod descriptor;
mod estimate;
mod reductions;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::rng::{derive_seed, stream_rng, Rng};

pub use builtin::{
    gip_on_vectors, hyperplane_gip_protocol, sampling_error_at_distance, sampling_protocol, trivial_protocol,
    unrank_subset, GipAnswer, HyperplaneProtocol, SamplingProtocol, TrivialProtocol,
};
pub use descriptor::{build_protocol, ProtocolDescriptor};
pub use estimate::{
    error_by_distance_profile, estimate_error, exact_error, BoundaryClass, DistanceError, ErrorEstimate, ErrorMode,
    ErrorSpec, MAX_EXACT_N,
};
pub use reductions::{apply_reduction, Reduced, Reduction};

/// Shared randomness. `Seeded` coins expand a seed into independent streams;
/// `Enumerated(j)` selects outcome `j` of a protocol whose randomness has
/// finitely many equally likely outcomes (see [`Protocol::coin_outcomes`]).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PublicCoins {
    Seeded(u64),
    Enumerated(u64),
}

impl PublicCoins {
    /// Generator for a named stream of the shared randomness.
    pub fn rng(&self, stream: u64) -> Rng {
        match *self {
            PublicCoins::Seeded(s) => stream_rng(s, stream),
            PublicCoins::Enumerated(j) => stream_rng(j ^ 0x656e_756d_0000_0000, stream),
        }
    }

    /// Coins handed to a wrapped protocol, independent of the wrapper's own.
    pub fn child(&self) -> Self {
        match *self {
            PublicCoins::Seeded(s) => PublicCoins::Seeded(derive_seed(s, 0x9e37)),
            e @ PublicCoins::Enumerated(_) => e,
        }
    }
}

/// What a party does on its turn.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    Send(BitString),
    Output(bool),
}

/// One player's endpoint. `incoming` is `None` only on Alice's first turn.
pub trait Party: Send {
    fn step(&mut self, incoming: Option<&BitString>) -> Result<Action>;
}

pub trait Protocol: Send + Sync {
    fn name(&self) -> String;

    /// The partial function this protocol is meant to compute.
    fn problem(&self) -> Problem;

    fn input_len(&self) -> usize {
        self.problem().input_len()
    }

    /// Worst-case number of communicated bits, output bit excluded.
    fn declared_cost(&self) -> usize;

    /// Number of equally likely outcomes of the public randomness, when the
    /// protocol can be driven by [`PublicCoins::Enumerated`]. Deterministic
    /// protocols report `Some(1)`.
    fn coin_outcomes(&self) -> Option<u64> {
        None
    }

    fn alice(&self, x: &BitString, coins: &PublicCoins) -> Box<dyn Party>;
    fn bob(&self, y: &BitString, coins: &PublicCoins) -> Box<dyn Party>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    Alice,
    Bob,
}

impl Player {
    fn other(self) -> Self {
        match self {
            Player::Alice => Player::Bob,
            Player::Bob => Player::Alice,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub sender: Player,
    pub bits: usize,
    pub payload: BitString,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub messages: Vec<Message>,
    pub total_bits: usize,
    /// Number of messages; consecutive messages always change sender.
    pub rounds: usize,
    pub output_by: Option<Player>,
}

/// Upper bound on messages in one run, as a guard against parties that never
/// output.
const MAX_MESSAGES: usize = 1 << 20;

/// Runs `p` on `(x, y)` with the given shared coins.
pub fn run_protocol(p: &dyn Protocol, x: &BitString, y: &BitString, coins: &PublicCoins) -> Result<(bool, Transcript)> {
    let n = p.input_len();
    if x.len() != n || y.len() != n {
        return Err(Error::invalid(format!(
            "inputs of length {}/{} for protocol {} on n={n}",
            x.len(),
            y.len(),
            p.name()
        )));
    }
    let cost = p.declared_cost();
    let mut alice = p.alice(x, coins);
    let mut bob = p.bob(y, coins);
    let mut transcript = Transcript::default();
    let mut turn = Player::Alice;
    let mut last: Option<BitString> = None;
    loop {
        let party = match turn {
            Player::Alice => &mut alice,
            Player::Bob => &mut bob,
        };
        match party.step(last.as_ref())? {
            Action::Output(bit) => {
                transcript.output_by = Some(turn);
                return Ok((bit, transcript));
            }
            Action::Send(msg) => {
                transcript.total_bits += msg.len();
                transcript.rounds += 1;
                if transcript.total_bits > cost {
                    return Err(Error::ContractViolation(format!(
                        "{} sent {} bits, declared cost {cost}",
                        p.name(),
                        transcript.total_bits
                    )));
                }
                if transcript.rounds > MAX_MESSAGES {
                    return Err(Error::ContractViolation(format!("{} exceeded {MAX_MESSAGES} messages", p.name())));
                }
                transcript.messages.push(Message { sender: turn, bits: msg.len(), payload: msg.clone() });
                last = Some(msg);
                turn = turn.other();
            }
        }
    }
}

/// [`run_protocol`] with coins expanded from `seed`.
pub fn run_seeded(p: &dyn Protocol, x: &BitString, y: &BitString, seed: u64) -> Result<(bool, Transcript)> {
    run_protocol(p, x, y, &PublicCoins::Seeded(seed))
}

/// A party that sends a fixed message on its first turn and then expects to
/// be done.
pub(crate) struct SendOnce(pub Option<BitString>);

impl Party for SendOnce {
    fn step(&mut self, _incoming: Option<&BitString>) -> Result<Action> {
        self.0
            .take()
            .map(Action::Send)
            .ok_or_else(|| Error::ContractViolation("sender asked to act twice".into()))
    }
}

/// A party that outputs a function of the first message it receives.
pub(crate) struct Decide<F: FnMut(&BitString) -> bool + Send>(pub F);

impl<F: FnMut(&BitString) -> bool + Send> Party for Decide<F> {
    fn step(&mut self, incoming: Option<&BitString>) -> Result<Action> {
        let msg = incoming.ok_or_else(|| Error::ContractViolation("receiver moved first".into()))?;
        Ok(Action::Output((self.0)(msg)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::GhdParams;

    struct Chatty;

    impl Protocol for Chatty {
        fn name(&self) -> String {
            "chatty".into()
        }
        fn problem(&self) -> Problem {
            Problem::Ghd(GhdParams::new(4, 2.0, 1.0).unwrap())
        }
        fn declared_cost(&self) -> usize {
            3
        }
        fn alice(&self, x: &BitString, _: &PublicCoins) -> Box<dyn Party> {
            Box::new(SendOnce(Some(x.clone())))
        }
        fn bob(&self, _: &BitString, _: &PublicCoins) -> Box<dyn Party> {
            Box::new(Decide(|_: &BitString| true))
        }
    }

    #[test]
    fn overspending_is_a_contract_violation() {
        let x = BitString::zeros(4);
        assert!(matches!(run_seeded(&Chatty, &x, &x, 0), Err(Error::ContractViolation(_))));
    }

    #[test]
    fn trivial_transcript_shape() {
        let p = trivial_protocol(GhdParams::new(5, 2.0, 0.5).unwrap());
        let x: BitString = "10110".parse().unwrap();
        let y: BitString = "00111".parse().unwrap();
        let (out, t) = run_seeded(&p, &x, &y, 3).unwrap();
        assert!(!out);
        assert_eq!(t.total_bits, 5);
        assert_eq!(t.rounds, 1);
        assert_eq!(t.messages[0].sender, Player::Alice);
        assert_eq!(t.messages[0].payload, x);
        assert_eq!(t.output_by, Some(Player::Bob));
        assert_eq!(run_seeded(&p, &x, &y, 3).unwrap(), (out, t));
    }

    #[test]
    fn wrong_length_rejected() {
        let p = trivial_protocol(GhdParams::new(5, 2.0, 0.5).unwrap());
        let x = BitString::zeros(4);
        assert!(matches!(run_seeded(&p, &x, &x, 0), Err(Error::InvalidInput(_))));
    }
}
