//! A laboratory for the Gap-Hamming-Distance communication problem.
//!
//! The crate is organised by subsystem:
//!
//! * [`bits`], [`cube`], [`problem`], [`laws`]: bit strings, hypercube subsets,
//!   the ghd partial function and the correlated input laws on the cube.
//! * [`cubexform`]: exact pair-distance histograms via XOR-convolution and the
//!   anti-concentration inequality for product sets.
//! * [`protocols`]: a two-party public-coin protocol simulator with exact bit
//!   accounting, the sampling / hyperplane upper bounds and the reduction toolkit.
//! * [`bounds`]: communication matrices, rectangle scans and the
//!   corruption-with-jokers certificate arithmetic.
//! * [`gauss`]: Gaussian samplers and Monte Carlo checks of the noise
//!   correlation inequality, projections and divergence estimators.
//! * [`streams`]: a k-minimum-values distinct-elements sketch and the
//!   streaming-to-protocol reduction.
//!
//! Every randomized routine is a pure function of its parameters and an
//! explicit 64-bit seed (see [`rng`]).

pub mod bits;
pub mod bounds;
pub mod cube;
pub mod cubexform;
pub mod error;
pub mod fraction;
pub mod gauss;
pub mod laws;
pub mod problem;
pub mod protocols;
pub mod rng;
pub mod stats;
pub mod streams;

pub use bits::BitString;
pub use cube::CubeSet;
pub use error::{Error, Result};
pub use problem::{GhdParams, Label};
