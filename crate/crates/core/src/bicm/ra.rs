use super::interleaver::{make_interleaver, Interleaver};
use super::modulation::BitMetricPair;
use crate::{Error, Result};

/// Default number of sum-product iterations.
pub const DEFAULT_RA_ITERATIONS: usize = 20;

/// LLR magnitude cap inside the decoder.
const LLR_CAP: f64 = 60.0;

/// Non-systematic regular repeat-accumulate code of rate `1/q`:
/// repeat every bit `q` times, permute, then take the running XOR.
#[derive(Debug, Clone, PartialEq)]
pub struct RaCode {
    repetition: usize,
    info_length: usize,
    permutation: Interleaver,
}

impl RaCode {
    pub fn new(info_length: usize, repetition: usize, seed: u64) -> Result<Self> {
        if repetition < 2 {
            return Err(Error::InvalidArgument(format!(
                "repetition must be at least 2, got {repetition}"
            )));
        }
        if info_length == 0 {
            return Err(Error::InvalidArgument(
                "info length must be at least 1".into(),
            ));
        }
        let permutation = make_interleaver(info_length * repetition, seed)?;
        Ok(Self {
            repetition,
            info_length,
            permutation,
        })
    }

    /// Same code with a caller-chosen repeat permutation.
    pub fn with_permutation(
        info_length: usize,
        repetition: usize,
        permutation: Interleaver,
    ) -> Result<Self> {
        let mut code = Self::new(info_length, repetition, 0)?;
        if permutation.len() != info_length * repetition {
            return Err(Error::LengthMismatch {
                expected: info_length * repetition,
                got: permutation.len(),
            });
        }
        code.permutation = permutation;
        Ok(code)
    }

    pub fn repetition(&self) -> usize {
        self.repetition
    }

    pub fn info_length(&self) -> usize {
        self.info_length
    }

    pub fn coded_length(&self) -> usize {
        self.info_length * self.repetition
    }

    pub fn rate(&self) -> f64 {
        1.0 / self.repetition as f64
    }

    fn permutation(&self) -> &Interleaver {
        &self.permutation
    }

    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.info_length {
            return Err(Error::LengthMismatch {
                expected: self.info_length,
                got: info.len(),
            });
        }
        let q = self.repetition;
        let perm = self.permutation().permutation();
        let mut acc = 0u8;
        Ok(perm
            .iter()
            .map(|&p| {
                acc ^= info[p / q] & 1;
                acc
            })
            .collect())
    }

    /// Sum-product decoding from bit metrics of the coded bits.
    pub fn decode(&self, metrics: &[BitMetricPair], iterations: usize) -> Result<Vec<u8>> {
        let llr: Vec<f64> = metrics.iter().map(|m| m.llr()).collect();
        self.decode_llr(&llr, iterations)
    }

    /// Sum-product decoding from coded-bit LLRs `ln p(0)/p(1)`. A zero
    /// posterior LLR decides 0.
    pub fn decode_llr(&self, channel: &[f64], iterations: usize) -> Result<Vec<u8>> {
        let n = self.coded_length();
        if channel.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: channel.len(),
            });
        }
        if iterations == 0 {
            return Err(Error::InvalidArgument(
                "iterations must be at least 1".into(),
            ));
        }
        let q = self.repetition;
        let perm = self.permutation().permutation();
        let lc: Vec<f64> = channel.iter().map(|l| clamp(*l)).collect();
        // prior LLR of each accumulator input w_i coming from its repetition node
        let mut prior = vec![0.0; n];
        let mut extrinsic = vec![0.0; n];
        let mut forward = vec![0.0; n];
        let mut backward = vec![0.0; n];
        let mut totals = vec![0.0; self.info_length];
        for _ in 0..iterations {
            let mut alpha = f64::INFINITY;
            for i in 0..n {
                alpha = clamp(boxplus(alpha, prior[i]) + lc[i]);
                forward[i] = alpha;
            }
            let mut beta = 0.0;
            for i in (0..n).rev() {
                backward[i] = beta;
                beta = boxplus(lc[i] + beta, prior[i]);
            }
            for i in 0..n {
                let left = if i == 0 {
                    f64::INFINITY
                } else {
                    forward[i - 1]
                };
                extrinsic[i] = clamp(boxplus(left, lc[i] + backward[i]));
            }
            totals.iter_mut().for_each(|t| *t = 0.0);
            for i in 0..n {
                totals[perm[i] / q] += extrinsic[i];
            }
            for i in 0..n {
                prior[i] = clamp(totals[perm[i] / q] - extrinsic[i]);
            }
        }
        Ok(totals.iter().map(|t| u8::from(*t < 0.0)).collect())
    }
}

fn clamp(l: f64) -> f64 {
    if l.is_nan() {
        0.0
    } else {
        l.clamp(-LLR_CAP, LLR_CAP)
    }
}

/// `2 atanh(tanh(a/2) tanh(b/2))`, exact in the log domain; `+inf` is a
/// known-zero bit.
pub fn boxplus(a: f64, b: f64) -> f64 {
    if a == f64::INFINITY {
        return b;
    }
    if b == f64::INFINITY {
        return a;
    }
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    sign * a.abs().min(b.abs()) + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

pub fn ra_encode(code: &RaCode, info: &[u8]) -> Result<Vec<u8>> {
    code.encode(info)
}

pub fn ra_decode(code: &RaCode, metrics: &[BitMetricPair], iterations: usize) -> Result<Vec<u8>> {
    code.decode(metrics, iterations)
}
