//! Fixed inputs for the kernel benchmarks, so every run times the same work.

use latnc_core::channel::gaussian_noise;
use latnc_core::ldlc::{build_parity, degree_seven_sequence, network_encode_shape};
use latnc_core::{LdlcCode, RateDiverseMapping, Result, User};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct LdlcFixture {
    pub code: LdlcCode,
    pub mapping: RateDiverseMapping,
    pub b_a: Vec<i64>,
    pub b_b: Vec<i64>,
    /// Noisy network-coded codeword with user B's part already removed.
    pub y_a: Vec<f64>,
    pub noise_var: f64,
}

/// Degree-7 code with `L_A = 4`, `L_B = 2`, observed by user A at noise
/// variance `noise_var`.
pub fn ldlc_fixture(n: usize, noise_var: f64, seed: u64) -> Result<LdlcFixture> {
    let code = build_parity(&degree_seven_sequence(), n, seed)?;
    let mapping = RateDiverseMapping::uniform(n, 4, 2, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b_a: Vec<i64> = (0..n).map(|_| rng.gen_range(-4..4)).collect();
    let b_b: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..2)).collect();
    let shaped = network_encode_shape(&code, &mapping, &b_a, &b_b, 64)?;
    let noise = gaussian_noise(n, noise_var, seed, 0);
    let y: Vec<f64> = shaped.x.iter().zip(&noise).map(|(x, z)| x + z).collect();
    let y_a = latnc_core::ldlc::cancel_side_info(&y, 1.0, &code, &mapping, User::A, &b_b)?;
    Ok(LdlcFixture {
        code,
        mapping,
        b_a,
        b_b,
        y_a,
        noise_var,
    })
}

pub fn random_bits(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.gen_range(0..2u8)).collect()
}

pub fn random_points(count: usize, dimension: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..dimension).map(|_| rng.gen_range(-10.0..10.0)).collect())
        .collect()
}
