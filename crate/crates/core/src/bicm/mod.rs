//! Bit-interleaved coded modulation with XOR network coding.
//!
//! Both users' repeat-accumulate codewords have the same length; the base
//! station XORs them, interleaves and maps onto a Gray-labeled constellation.
//! A receiver turns its bit metrics into metrics of its own coded bits by
//! swapping each pair where the other user's coded bit is 1.

mod interleaver;
mod modulation;
mod pipeline;
mod ra;

pub use interleaver::{make_interleaver, Interleaver};
pub use modulation::{
    apply_side_info, demod_bit_metrics, distance_gain_db, gray_modulate, BitMetricPair,
    Constellation, JOINT_8PSK_DISTANCE,
};
pub use pipeline::{bicm_nc_trial, bicm_p2p_trial, bit_errors, BicmLink, NcDecoded};
pub use ra::{boxplus, ra_decode, ra_encode, RaCode, DEFAULT_RA_ITERATIONS};
