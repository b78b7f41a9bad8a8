//! Rate allocation laboratory for the fading Gaussian multiple-access channel.
//!
//! The crate is organised bottom-up:
//!
//! * [`mac`] – channel parameters and the rank functions of the instantaneous
//!   and throughput capacity regions,
//! * [`polymatroid`] – membership, vertices, linear and concave maximization
//!   over a region given by a rank oracle,
//! * [`utility`] – weighted alpha-fair utilities,
//! * [`fading`] – finite-state Markov gain processes,
//! * [`policies`] – greedy, max-weight, congestion control, offline optimum
//!   and the block-transmission scheme,
//! * [`queueing`] – queue evolution, Lyapunov diagnostics and stability
//!   verdicts,
//! * [`sim`] – scenario configuration, seeded replication and CSV output.
//!
//! All rates are in nats per slot, one slot being one channel use. Users are
//! indexed from zero.

pub mod error;
pub mod fading;
pub mod mac;
pub mod policies;
pub mod polymatroid;
pub mod queueing;
pub mod sim;
pub mod utility;

pub use error::{Error, Result};
pub use fading::{ChannelState, FadingProcess, GainChain};
pub use mac::{InstantaneousRegion, MacConfig, RateVector, ThroughputRegion};
pub use policies::{BlockScheme, CongestionController};
pub use polymatroid::{RankOracle, SolverOptions, UserSet};
pub use queueing::{QueueVector, RunTrace};
pub use utility::{AlphaFairUtility, Utility};

/// Absolute tolerance used for every rank and constraint comparison.
pub const TOLERANCE: f64 = 1e-9;
