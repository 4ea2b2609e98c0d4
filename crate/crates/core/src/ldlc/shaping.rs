use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::parity::{mat_vec, LdlcCode};
use crate::lattice::{GeneratorMatrix, Lattice};
use crate::{Error, Result, User};

const SINGULAR_DIAGONAL: f64 = 1e-12;

/// Default number of surviving paths in the shaping search.
pub const DEFAULT_M_WIDTH: usize = 64;

/// Default constellation expansion of the decoders, in multiples of `M_i`.
pub const DEFAULT_EPSILON: i64 = 2;

/// Per-index diagonals `M_i = lcm(2 L_A,i, 2 L_B,i)` and `M_u,i = M_i / (2 L_u,i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateDiverseMapping {
    m: Vec<i64>,
    m_a: Vec<i64>,
    m_b: Vec<i64>,
    l_a: Vec<i64>,
    l_b: Vec<i64>,
    epsilon: i64,
}

/// Allowed values of one decoded integer: `low, low + stride, .., high`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegerRange {
    pub low: i64,
    pub high: i64,
    pub stride: i64,
}

impl IntegerRange {
    /// The element nearest to `v`, ties to the smaller one.
    pub fn nearest(&self, v: f64) -> i64 {
        let q = ((v - self.low as f64) / self.stride as f64)
            .round()
            .max(0.0);
        let top = (self.high - self.low) / self.stride;
        let q = (q as i64).min(top);
        let mut best = self.low + q * self.stride;
        let below = best - self.stride;
        if below >= self.low && (v - below as f64).abs() <= (v - best as f64).abs() {
            best = below;
        }
        best
    }

    pub fn contains(&self, v: i64) -> bool {
        v >= self.low && v <= self.high && (v - self.low) % self.stride == 0
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Builds the rate-diverse nesting for per-index half-widths `L_A`, `L_B`.
pub fn build_mapping(l_a: &[i64], l_b: &[i64], epsilon: i64) -> Result<RateDiverseMapping> {
    if l_a.len() != l_b.len() {
        return Err(Error::DimensionMismatch {
            expected: l_a.len(),
            got: l_b.len(),
        });
    }
    if l_a.is_empty() || l_a.iter().chain(l_b).any(|l| *l < 1) {
        return Err(Error::InvalidArgument(
            "constellation half-widths must be at least 1".into(),
        ));
    }
    if epsilon < 0 {
        return Err(Error::InvalidArgument(
            "epsilon must be non-negative".into(),
        ));
    }
    let m: Vec<i64> = l_a
        .iter()
        .zip(l_b)
        .map(|(a, b)| 2 * a / gcd(2 * a, 2 * b) * 2 * b)
        .collect();
    let m_a = m.iter().zip(l_a).map(|(m, l)| m / (2 * l)).collect();
    let m_b = m.iter().zip(l_b).map(|(m, l)| m / (2 * l)).collect();
    Ok(RateDiverseMapping {
        m,
        m_a,
        m_b,
        l_a: l_a.to_vec(),
        l_b: l_b.to_vec(),
        epsilon,
    })
}

impl RateDiverseMapping {
    /// The same half-widths at every one of `n` indices.
    pub fn uniform(n: usize, l_a: i64, l_b: i64, epsilon: i64) -> Result<Self> {
        build_mapping(&vec![l_a; n], &vec![l_b; n], epsilon)
    }

    pub fn n(&self) -> usize {
        self.m.len()
    }

    pub fn m(&self) -> &[i64] {
        &self.m
    }

    pub fn m_user(&self, user: User) -> &[i64] {
        match user {
            User::A => &self.m_a,
            User::B => &self.m_b,
        }
    }

    pub fn half_widths(&self, user: User) -> &[i64] {
        match user {
            User::A => &self.l_a,
            User::B => &self.l_b,
        }
    }

    pub fn epsilon(&self) -> i64 {
        self.epsilon
    }

    /// Bits per channel use carried by `user`.
    pub fn rate(&self, user: User) -> f64 {
        let l = self.half_widths(user);
        l.iter().map(|l| ((2 * l) as f64).log2()).sum::<f64>() / l.len() as f64
    }

    /// `{-L_u,i .. L_u,i - 1}`.
    pub fn constellation(&self, user: User, index: usize) -> IntegerRange {
        let l = self.half_widths(user)[index];
        IntegerRange {
            low: -l,
            high: l - 1,
            stride: 1,
        }
    }

    /// Values `M_u,i b_u,i - M_i k_i` a decoder of `user` may output at `index`,
    /// for `|k_i| <= epsilon`.
    pub fn decoder_range(&self, user: User, index: usize) -> IntegerRange {
        let m = self.m[index];
        let mu = self.m_user(user)[index];
        IntegerRange {
            low: -m / 2 - self.epsilon * m,
            high: m / 2 - mu + self.epsilon * m,
            stride: mu,
        }
    }

    pub fn decoder_ranges(&self, user: User) -> Vec<IntegerRange> {
        (0..self.n()).map(|i| self.decoder_range(user, i)).collect()
    }

    /// `(Λs, Λ_A, Λ_B)` generated by `G M`, `G M_A`, `G M_B`.
    pub fn lattices(&self, code: &LdlcCode) -> Result<(Lattice, Lattice, Lattice)> {
        if code.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: code.n(),
                got: self.n(),
            });
        }
        let scaled = |diag: &[i64]| -> Result<Lattice> {
            let g = code.generator()
                * DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    diag.len(),
                    diag.iter().map(|v| *v as f64),
                ));
            Lattice::new(GeneratorMatrix::from_matrix(g)?)
        };
        Ok((scaled(&self.m)?, scaled(&self.m_a)?, scaled(&self.m_b)?))
    }

    fn check_message(&self, user: User, b: &[i64]) -> Result<()> {
        if b.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: b.len(),
            });
        }
        for (index, &value) in b.iter().enumerate() {
            if !self.constellation(user, index).contains(value) {
                return Err(Error::ConstellationViolation { index, value });
            }
        }
        Ok(())
    }
}

/// Output of the shaping search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapingResult {
    pub k: Vec<i64>,
    /// `b - M k`.
    pub b_prime: Vec<i64>,
    /// `G b_prime`.
    pub x: Vec<f64>,
    /// `|x|^2 / N`.
    pub power: f64,
}

/// `b_NC = M_A b_A + M_B b_B`.
pub fn network_combine(mapping: &RateDiverseMapping, b_a: &[i64], b_b: &[i64]) -> Result<Vec<i64>> {
    mapping.check_message(User::A, b_a)?;
    mapping.check_message(User::B, b_b)?;
    Ok((0..mapping.n())
        .map(|i| mapping.m_a[i] * b_a[i] + mapping.m_b[i] * b_b[i])
        .collect())
}

/// Combines both messages and shapes the result onto the coarse lattice.
pub fn network_encode_shape(
    code: &LdlcCode,
    mapping: &RateDiverseMapping,
    b_a: &[i64],
    b_b: &[i64],
    m_width: usize,
) -> Result<ShapingResult> {
    let b_nc = network_combine(mapping, b_a, b_b)?;
    m_algorithm(code, mapping, &b_nc, m_width)
}

/// Shapes `M_u b_u` alone, giving the point-to-point codeword `G(M_u b_u - M k_u)`.
pub fn single_user_shape(
    code: &LdlcCode,
    mapping: &RateDiverseMapping,
    user: User,
    b: &[i64],
    m_width: usize,
) -> Result<ShapingResult> {
    mapping.check_message(user, b)?;
    let scaled: Vec<i64> = b
        .iter()
        .zip(mapping.m_user(user))
        .map(|(b, m)| b * m)
        .collect();
    m_algorithm(code, mapping, &scaled, m_width)
}

/// Mean power `|G b|^2 / N` without shaping.
pub fn unshaped_power(code: &LdlcCode, b: &[i64]) -> Result<f64> {
    let x = code.encode(b)?;
    Ok(x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64)
}

/// Candidate offsets `k_i` in `{-ceil(M_i/2) .. floor(M_i/2) - 1}`.
pub fn k_range(m: i64) -> std::ops::Range<i64> {
    -((m + 1) / 2)..m / 2
}

/// Relative gap under which two complete metrics count as a tie.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// The lexicographically smallest `k` among candidates whose metric is within
/// [`TIE_TOLERANCE`] of the minimum. Rounding makes exact ties look unequal
/// depending on how the norm was summed.
fn pick_best(candidates: Vec<(f64, Vec<i64>)>) -> Option<Vec<i64>> {
    let min = candidates.iter().map(|c| c.0).min_by(f64::total_cmp)?;
    let limit = min + TIE_TOLERANCE * min.abs().max(1.0);
    candidates
        .into_iter()
        .filter(|c| c.0 <= limit)
        .map(|c| c.1)
        .min()
}

struct Path {
    metric: f64,
    k: Vec<i64>,
    rotated: Vec<f64>,
}

/// Breadth-limited tree search for `k` minimizing `|G(b - M k)|^2`.
///
/// Works on `T x~ = b - M k` with `T` lower triangular, keeping the `m_width`
/// best partial paths per level; `usize::MAX` keeps all of them. Among
/// complete paths tied within [`TIE_TOLERANCE`] the lexicographically smaller
/// `k` wins.
pub fn m_algorithm(
    code: &LdlcCode,
    mapping: &RateDiverseMapping,
    b: &[i64],
    m_width: usize,
) -> Result<ShapingResult> {
    let n = code.n();
    if mapping.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: mapping.n(),
        });
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    if m_width == 0 {
        return Err(Error::InvalidArgument("m_width must be at least 1".into()));
    }
    let t = code.triangle();
    if let Some(i) = (0..n).find(|&i| t[(i, i)].abs() < SINGULAR_DIAGONAL) {
        return Err(Error::SingularTriangle(i));
    }
    let mut paths = vec![Path {
        metric: 0.0,
        k: Vec::with_capacity(n),
        rotated: Vec::with_capacity(n),
    }];
    for i in 0..n {
        let tii = t[(i, i)];
        let mi = mapping.m[i];
        // (parent, k_i, x~_i, metric)
        let mut children: Vec<(usize, i64, f64, f64)> =
            Vec::with_capacity(paths.len() * mi as usize);
        for (p, path) in paths.iter().enumerate() {
            let interference: f64 = path
                .rotated
                .iter()
                .enumerate()
                .map(|(j, x)| t[(i, j)] * x)
                .sum();
            for ki in k_range(mi) {
                let xi = ((b[i] - mi * ki) as f64 - interference) / tii;
                children.push((p, ki, xi, path.metric + xi * xi));
            }
        }
        let order = |a: &(usize, i64, f64, f64), c: &(usize, i64, f64, f64)| {
            a.3.total_cmp(&c.3)
                .then_with(|| paths[a.0].k.cmp(&paths[c.0].k))
                .then_with(|| a.1.cmp(&c.1))
        };
        if children.len() > m_width {
            children.select_nth_unstable_by(m_width - 1, order);
            children.truncate(m_width);
        }
        children.sort_by(order);
        paths = children
            .into_iter()
            .map(|(p, ki, xi, metric)| {
                let parent = &paths[p];
                let mut k = Vec::with_capacity(n);
                k.extend_from_slice(&parent.k);
                k.push(ki);
                let mut rotated = Vec::with_capacity(n);
                rotated.extend_from_slice(&parent.rotated);
                rotated.push(xi);
                Path { metric, k, rotated }
            })
            .collect();
    }
    let best = pick_best(paths.into_iter().map(|p| (p.metric, p.k)).collect())
        .expect("at least one path survives");
    finish(code, mapping, b, best)
}

fn finish(
    code: &LdlcCode,
    mapping: &RateDiverseMapping,
    b: &[i64],
    k: Vec<i64>,
) -> Result<ShapingResult> {
    let b_prime: Vec<i64> = (0..b.len()).map(|i| b[i] - mapping.m[i] * k[i]).collect();
    let x = code.encode(&b_prime)?;
    let power = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
    Ok(ShapingResult {
        k,
        b_prime,
        x,
        power,
    })
}

/// Exhaustive minimization over the same `k` range as [`m_algorithm`], with
/// the same tie rule. Exponential in `N`; for small test codes only.
pub fn exhaustive_shaping(
    code: &LdlcCode,
    mapping: &RateDiverseMapping,
    b: &[i64],
) -> Result<ShapingResult> {
    let n = code.n();
    if b.len() != n || mapping.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len().min(mapping.n()),
        });
    }
    let g = code.generator();
    let mut k: Vec<i64> = mapping.m.iter().map(|m| k_range(*m).start).collect();
    let mut all = Vec::new();
    loop {
        let b_prime = (0..n).map(|i| (b[i] - mapping.m[i] * k[i]) as f64);
        let x = mat_vec(g, b_prime);
        all.push((x.iter().map(|v| v * v).sum::<f64>(), k.clone()));
        let mut pos = n;
        loop {
            if pos == 0 {
                let k = pick_best(all).expect("non-empty search");
                return finish(code, mapping, b, k);
            }
            pos -= 1;
            k[pos] += 1;
            if k[pos] < k_range(mapping.m[pos]).end {
                break;
            }
            k[pos] = k_range(mapping.m[pos]).start;
        }
    }
}

/// Removes the other user's contribution and the channel gain:
/// `y / β - G M_other b_other`.
pub fn cancel_side_info(
    y: &[f64],
    beta: f64,
    code: &LdlcCode,
    mapping: &RateDiverseMapping,
    user: User,
    b_other: &[i64],
) -> Result<Vec<f64>> {
    if !(beta > 0.0) {
        return Err(Error::NonPositiveInput("beta"));
    }
    if y.len() != code.n() {
        return Err(Error::DimensionMismatch {
            expected: code.n(),
            got: y.len(),
        });
    }
    let other = user.other();
    mapping.check_message(other, b_other)?;
    let scaled = b_other
        .iter()
        .zip(mapping.m_user(other))
        .map(|(b, m)| (b * m) as f64);
    let known = mat_vec(code.generator(), scaled);
    Ok(y.iter().zip(known).map(|(y, k)| y / beta - k).collect())
}

/// Centered residue of `v` modulo `m` in `[-m/2, m/2)`.
pub fn centered_mod(v: i64, m: i64) -> i64 {
    (v + m / 2).rem_euclid(m) - m / 2
}

/// Recovers `b_u,i = M_u,i^-1 (b'_i mod M_i)` element by element.
pub fn recover_message(
    b_prime: &[i64],
    mapping: &RateDiverseMapping,
    user: User,
) -> Result<Vec<i64>> {
    if b_prime.len() != mapping.n() {
        return Err(Error::DimensionMismatch {
            expected: mapping.n(),
            got: b_prime.len(),
        });
    }
    let scale = mapping.m_user(user);
    b_prime
        .iter()
        .enumerate()
        .map(|(index, &v)| {
            let residue = centered_mod(v, mapping.m[index]);
            if residue % scale[index] != 0 {
                Err(Error::NonDivisible {
                    index,
                    residue,
                    scale: scale[index],
                })
            } else {
                Ok(residue / scale[index])
            }
        })
        .collect()
}

/// Number of positions where the recovered message differs from `truth`;
/// non-divisible residues count as errors.
pub fn count_symbol_errors(
    b_prime: &[i64],
    mapping: &RateDiverseMapping,
    user: User,
    truth: &[i64],
) -> usize {
    let scale = mapping.m_user(user);
    b_prime
        .iter()
        .zip(truth)
        .enumerate()
        .filter(|(i, (v, t))| {
            let residue = centered_mod(**v, mapping.m[*i]);
            residue % scale[*i] != 0 || residue / scale[*i] != **t
        })
        .count()
}
