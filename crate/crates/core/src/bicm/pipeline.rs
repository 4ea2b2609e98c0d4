use num_complex::Complex64;

use super::interleaver::make_interleaver;
use super::modulation::{apply_side_info, Constellation};
use super::ra::RaCode;
use crate::channel::{
    complex_gaussian_noise, transmit_broadcast_complex, user_stream, BroadcastChannel,
};
use crate::{Error, Result, User};

/// Decoded information bits of both receivers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcDecoded {
    pub a: Vec<u8>,
    pub b: Vec<u8>,
}

/// Shared parameters of one BICM link.
#[derive(Debug, Clone)]
pub struct BicmLink<'a> {
    pub code_a: &'a RaCode,
    pub code_b: &'a RaCode,
    pub constellation: &'a Constellation,
    pub interleaver_seed: u64,
    pub iterations: usize,
}

impl BicmLink<'_> {
    fn code(&self, user: User) -> &RaCode {
        match user {
            User::A => self.code_a,
            User::B => self.code_b,
        }
    }

    fn coded_length(&self) -> Result<usize> {
        let (a, b) = (self.code_a.coded_length(), self.code_b.coded_length());
        if a != b {
            return Err(Error::CodedLengthMismatch { a, b });
        }
        Ok(a)
    }
}

/// One network-coded packet: encode both users, XOR, interleave, modulate,
/// broadcast, then at each receiver demodulate, deinterleave, remap with the
/// other user's coded bits and decode.
pub fn bicm_nc_trial(
    link: &BicmLink<'_>,
    bits_a: &[u8],
    bits_b: &[u8],
    channel: &BroadcastChannel,
    noise_seed: u64,
) -> Result<NcDecoded> {
    let len = link.coded_length()?;
    let c_a = link.code_a.encode(bits_a)?;
    let c_b = link.code_b.encode(bits_b)?;
    let c_nc: Vec<u8> = c_a.iter().zip(&c_b).map(|(a, b)| a ^ b).collect();
    let pi = make_interleaver(len, link.interleaver_seed)?;
    let x = link.constellation.modulate(&pi.interleave(&c_nc)?)?;
    let (y_a, y_b) = transmit_broadcast_complex(channel, &x, noise_seed)?;
    let receive = |user: User, y: &[Complex64], side: &[u8]| -> Result<Vec<u8>> {
        let noise_var = channel.noise_var.max(f64::MIN_POSITIVE);
        let metrics = link
            .constellation
            .demodulate(y, channel.beta(user), noise_var)?;
        let own = apply_side_info(&pi.deinterleave(&metrics)?, side)?;
        link.code(user).decode(&own, link.iterations)
    };
    Ok(NcDecoded {
        a: receive(User::A, &y_a, &c_b)?,
        b: receive(User::B, &y_b, &c_a)?,
    })
}

/// Single-user point-to-point BICM packet for `user`, with the same noise
/// realisation the broadcast receiver of that user sees for `noise_seed`.
pub fn bicm_p2p_trial(
    link: &BicmLink<'_>,
    user: User,
    bits: &[u8],
    channel: &BroadcastChannel,
    noise_seed: u64,
) -> Result<Vec<u8>> {
    let code = link.code(user);
    let c = code.encode(bits)?;
    let pi = make_interleaver(c.len(), link.interleaver_seed)?;
    let x = link.constellation.modulate(&pi.interleave(&c)?)?;
    let beta = channel.beta(user);
    let y: Vec<Complex64> = if channel.noise_var == 0.0 {
        x.iter().map(|v| v * beta).collect()
    } else {
        let noise =
            complex_gaussian_noise(x.len(), channel.noise_var, noise_seed, user_stream(user));
        x.iter().zip(noise).map(|(v, n)| v * beta + n).collect()
    };
    let noise_var = channel.noise_var.max(f64::MIN_POSITIVE);
    let metrics = link.constellation.demodulate(&y, beta, noise_var)?;
    code.decode(&pi.deinterleave(&metrics)?, link.iterations)
}

pub fn bit_errors(a: &[u8], b: &[u8]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}
