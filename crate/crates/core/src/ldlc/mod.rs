//! Low-density lattice codes for rate-diverse network coding.
//!
//! One Latin-square LDLC generator `G` serves both users: user `u` codes with
//! `G M_u`, and `G M` is the common shaping lattice. Shaping picks the offset
//! `k` with an M-algorithm search, and receivers decode with grid-based BP.

mod bp;
mod parity;
mod shaping;

pub use bp::{
    bp_decode, BpConfig, BpDecoder, BpOutput, DiscretizedDensity, DEFAULT_ITERATIONS, DEFAULT_SPAN,
    DEFAULT_STEP,
};
pub use parity::{build_parity, check_latin_square, ldlc_encode, LdlcCode};
pub use shaping::{
    build_mapping, cancel_side_info, centered_mod, count_symbol_errors, exhaustive_shaping,
    k_range, m_algorithm, network_combine, network_encode_shape, recover_message,
    single_user_shape, unshaped_power, IntegerRange, RateDiverseMapping, ShapingResult,
    DEFAULT_EPSILON, DEFAULT_M_WIDTH,
};

/// The degree-7 generating sequence `{1, 1/√7 (x6)}`.
pub fn degree_seven_sequence() -> Vec<f64> {
    let h = 1.0 / 7f64.sqrt();
    vec![1.0, h, h, h, h, h, h]
}
