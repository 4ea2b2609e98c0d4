use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Log-domain detection metrics `ln λ(y, c = 0)` and `ln λ(y, c = 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BitMetricPair {
    pub log_metric0: f64,
    pub log_metric1: f64,
}

impl BitMetricPair {
    pub fn from_llr(llr: f64) -> Self {
        Self {
            log_metric0: 0.0,
            log_metric1: -llr,
        }
    }

    pub fn metric0(&self) -> f64 {
        self.log_metric0.exp()
    }

    pub fn metric1(&self) -> f64 {
        self.log_metric1.exp()
    }

    /// `ln(λ0 / λ1)`.
    pub fn llr(&self) -> f64 {
        self.log_metric0 - self.log_metric1
    }

    pub fn swapped(self) -> Self {
        Self {
            log_metric0: self.log_metric1,
            log_metric1: self.log_metric0,
        }
    }
}

/// A Gray-labeled square constellation with unit average energy. Labels are
/// read most significant bit first, so `points[label]` carries bit `j` of the
/// group at bit position `m - 1 - j` of `label`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    name: String,
    points: Vec<Complex64>,
    bits_per_symbol: usize,
    /// `subsets[j][b]`: labels whose `j`-th bit equals `b`.
    subsets: Vec<[Vec<usize>; 2]>,
}

impl Constellation {
    /// Per axis: bit 0 -> `+1/√2`, bit 1 -> `-1/√2`; first bit on I.
    pub fn qpsk() -> Self {
        let a = 1.0 / 2f64.sqrt();
        let axis = |bit: usize| if bit == 0 { a } else { -a };
        Self::from_axes("qpsk", 1, axis)
    }

    /// Per axis: `00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3`, over `√10`; first pair on I.
    pub fn qam16() -> Self {
        let s = 1.0 / 10f64.sqrt();
        let axis = |pair: usize| match pair {
            0b00 => -3.0 * s,
            0b01 => -s,
            0b11 => s,
            _ => 3.0 * s,
        };
        Self::from_axes("16qam", 2, axis)
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "qpsk" => Ok(Self::qpsk()),
            "16qam" | "qam16" => Ok(Self::qam16()),
            other => Err(Error::InvalidArgument(format!(
                "unknown constellation '{other}'"
            ))),
        }
    }

    fn from_axes(name: &str, bits_per_axis: usize, axis: impl Fn(usize) -> f64) -> Self {
        let m = 2 * bits_per_axis;
        let mask = (1 << bits_per_axis) - 1;
        let points = (0..1usize << m)
            .map(|label| Complex64::new(axis(label >> bits_per_axis), axis(label & mask)))
            .collect();
        let subsets = (0..m)
            .map(|j| {
                let shift = m - 1 - j;
                let with = |b: usize| (0..1usize << m).filter(|l| (l >> shift) & 1 == b).collect();
                [with(0), with(1)]
            })
            .collect();
        Self {
            name: name.into(),
            points,
            bits_per_symbol: m,
            subsets,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    /// Points indexed by label.
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn subset(&self, bit: usize, value: u8) -> &[usize] {
        &self.subsets[bit][usize::from(value & 1)]
    }

    pub fn average_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }

    pub fn label_of(bits: &[u8]) -> usize {
        bits.iter()
            .fold(0, |acc, b| (acc << 1) | usize::from(b & 1))
    }

    pub fn modulate(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        let m = self.bits_per_symbol;
        if bits.len() % m != 0 {
            return Err(Error::LengthNotMultiple {
                bits: bits.len(),
                bits_per_symbol: m,
            });
        }
        Ok(bits
            .chunks(m)
            .map(|g| self.points[Self::label_of(g)])
            .collect())
    }

    /// Per-bit metrics `(1/2^(m-1)) Σ_{x in X_j^(b)} p(y | x)` with the complex
    /// Gaussian `p(y|x) = exp(-|y - βx|²/σ²) / (πσ²)`.
    pub fn bit_metrics(&self, y: Complex64, beta: f64, noise_var: f64) -> Vec<BitMetricPair> {
        let log_norm = -(PI * noise_var).ln() - ((self.points.len() / 2) as f64).ln();
        let log_p: Vec<f64> = self
            .points
            .iter()
            .map(|x| -(y - x * beta).norm_sqr() / noise_var)
            .collect();
        (0..self.bits_per_symbol)
            .map(|j| {
                let sum =
                    |b: usize| log_sum_exp(self.subsets[j][b].iter().map(|&l| log_p[l])) + log_norm;
                BitMetricPair {
                    log_metric0: sum(0),
                    log_metric1: sum(1),
                }
            })
            .collect()
    }

    /// Metrics for a whole symbol stream, flattened in bit order.
    pub fn demodulate(
        &self,
        y: &[Complex64],
        beta: f64,
        noise_var: f64,
    ) -> Result<Vec<BitMetricPair>> {
        if !(noise_var > 0.0) {
            return Err(Error::NonPositiveInput("noise_var"));
        }
        Ok(y.iter()
            .flat_map(|s| self.bit_metrics(*s, beta, noise_var))
            .collect())
    }
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let peak = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return peak;
    }
    peak + values.map(|v| (v - peak).exp()).sum::<f64>().ln()
}

pub fn gray_modulate(constellation: &Constellation, bits: &[u8]) -> Result<Vec<Complex64>> {
    constellation.modulate(bits)
}

pub fn demod_bit_metrics(
    constellation: &Constellation,
    y: Complex64,
    beta: f64,
    noise_var: f64,
) -> Vec<BitMetricPair> {
    constellation.bit_metrics(y, beta, noise_var)
}

/// `λ(y, c_u = b) = λ(y, c_NC = b ⊕ c_other)`: swaps each pair whose side bit is 1.
pub fn apply_side_info(metrics: &[BitMetricPair], side_bits: &[u8]) -> Result<Vec<BitMetricPair>> {
    if metrics.len() != side_bits.len() {
        return Err(Error::LengthMismatch {
            expected: metrics.len(),
            got: side_bits.len(),
        });
    }
    Ok(metrics
        .iter()
        .zip(side_bits)
        .map(|(m, s)| if s & 1 == 1 { m.swapped() } else { *m })
        .collect())
}

/// Inter-point distance of the equivalent BPSK seen by the low-rate user of a
/// joint 8-PSK broadcast, against 2 for standard BPSK.
pub const JOINT_8PSK_DISTANCE: f64 = 1.85;

/// `10 log10(d1² / d2²)`: SNR advantage of minimum distance `d1` over `d2`.
pub fn distance_gain_db(d1: f64, d2: f64) -> f64 {
    10.0 * (d1 * d1 / (d2 * d2)).log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn declared_labels() {
        let s2 = 1.0 / 2f64.sqrt();
        let q = Constellation::qpsk();
        assert!(close(
            q.modulate(&[0, 0]).unwrap()[0],
            Complex64::new(s2, s2)
        ));
        assert!(close(
            q.modulate(&[1, 0]).unwrap()[0],
            Complex64::new(-s2, s2)
        ));
        let s = 1.0 / 10f64.sqrt();
        let x = Constellation::qam16()
            .modulate(&[0, 0, 0, 0, 1, 0, 0, 1])
            .unwrap();
        assert!(close(x[0], Complex64::new(-3.0 * s, -3.0 * s)));
        assert!(close(x[1], Complex64::new(3.0 * s, -s)));
        assert_eq!(
            q.modulate(&[0, 1, 1]).unwrap_err(),
            Error::LengthNotMultiple {
                bits: 3,
                bits_per_symbol: 2
            }
        );
    }

    #[test]
    fn energy_subsets_and_gray_adjacency() {
        for c in [Constellation::qpsk(), Constellation::qam16()] {
            assert!((c.average_energy() - 1.0).abs() < 1e-12);
            let m = c.bits_per_symbol();
            for j in 0..m {
                assert_eq!(c.subset(j, 0).len(), 1 << (m - 1));
                assert_eq!(c.subset(j, 1).len(), 1 << (m - 1));
            }
            let pts = c.points();
            let dmin = (0..pts.len())
                .flat_map(|a| (0..pts.len()).filter(move |b| *b != a).map(move |b| (a, b)))
                .map(|(a, b)| (pts[a] - pts[b]).norm())
                .fold(f64::INFINITY, f64::min);
            for a in 0..pts.len() {
                for b in 0..pts.len() {
                    if a != b && ((pts[a] - pts[b]).norm() - dmin).abs() < 1e-9 {
                        assert_eq!((a ^ b).count_ones(), 1, "{} {a} {b}", c.name());
                    }
                }
            }
        }
    }

    #[test]
    fn symmetric_observation_has_zero_llr() {
        let q = Constellation::qpsk();
        for m in q.bit_metrics(Complex64::new(0.0, 0.0), 1.0, 0.5) {
            assert!(m.llr().abs() < 1e-12);
        }
    }

    #[test]
    fn low_noise_llr_signs_follow_label() {
        let c = Constellation::qam16();
        for label in 0..16usize {
            let y = c.points()[label] * 1.3;
            let metrics = c.bit_metrics(y, 1.3, 1e-3);
            for (j, m) in metrics.iter().enumerate() {
                let bit = (label >> (3 - j)) & 1;
                assert_eq!(m.llr() < 0.0, bit == 1);
                assert!(m.log_metric0.is_finite() && m.log_metric1.is_finite());
            }
        }
    }

    #[test]
    fn matches_direct_summation() {
        let q = Constellation::qpsk();
        let beta = 1.0;
        let y = Complex64::new(1.0, 1.0) * (beta / 2f64.sqrt());
        let p = |x: Complex64| (-(y - x * beta).norm_sqr()).exp() / PI;
        let metrics = q.bit_metrics(y, beta, 1.0);
        for (j, m) in metrics.iter().enumerate() {
            for b in 0..2u8 {
                let direct: f64 = q
                    .subset(j, b)
                    .iter()
                    .map(|&l| p(q.points()[l]))
                    .sum::<f64>()
                    / 2.0;
                let got = if b == 0 { m.metric0() } else { m.metric1() };
                assert!((got - direct).abs() < 1e-12 * direct.max(1e-300));
            }
        }
    }

    #[test]
    fn side_info_swaps() {
        let m = vec![
            BitMetricPair {
                log_metric0: -1.0,
                log_metric1: -3.0,
            },
            BitMetricPair {
                log_metric0: -2.0,
                log_metric1: -0.5,
            },
        ];
        let s = apply_side_info(&m, &[0, 1]).unwrap();
        assert_eq!(s[0], m[0]);
        assert_eq!(s[1].llr(), -m[1].llr());
        assert_eq!(apply_side_info(&s, &[0, 1]).unwrap(), m);
        assert!(apply_side_info(&m, &[0]).is_err());
    }

    #[test]
    fn modulation_gain_constant() {
        let g = distance_gain_db(2.0, 1.85);
        assert!((g - 10.0 * (4.0f64 / 3.4225).log10()).abs() < 1e-12);
        assert!((g - 0.677).abs() < 5e-4);
    }
}
