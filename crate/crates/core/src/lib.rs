//! Coding for the two-user AWGN broadcast channel where each receiver already
//! knows the other receiver's message.
//!
//! The crate is organised by layer:
//!
//! - [`lattice`]: real lattices, quantization, modulo reduction, shaping diagnostics.
//! - [`nested`]: the nested-lattice network-coding framework (exact, small dimension).
//! - [`ldlc`]: low-density lattice codes with M-algorithm shaping and BP decoding.
//! - [`bicm`]: repeat-accumulate coded BICM with XOR network coding.
//! - [`channel`]: the broadcast channel, SNR bookkeeping and the Monte Carlo engine.

pub mod bicm;
pub mod channel;
mod error;
pub mod lattice;
pub mod ldlc;
pub mod nested;

use serde::{Deserialize, Serialize};

pub use bicm::{BitMetricPair, Constellation, Interleaver, RaCode};
pub use channel::{BroadcastChannel, ErrorStats, SignalKind, TrialMoments};
pub use error::{Error, Result};
pub use lattice::{GeneratorMatrix, Lattice, LatticePoint, RegionStats};
pub use ldlc::{DiscretizedDensity, LdlcCode, RateDiverseMapping, ShapingResult};
pub use nested::{DitherVector, NestedCodePair};

/// One of the two receivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum User {
    A,
    B,
}

impl User {
    pub const BOTH: [User; 2] = [User::A, User::B];

    pub fn other(self) -> User {
        match self {
            User::A => User::B,
            User::B => User::A,
        }
    }
}

impl std::fmt::Display for User {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            User::A => "A",
            User::B => "B",
        })
    }
}
