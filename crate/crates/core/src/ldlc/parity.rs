use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const INVERSE_TOLERANCE: f64 = 1e-9;
const MAGNITUDE_TOLERANCE: f64 = 1e-9;
const MAX_ATTEMPTS: usize = 200;
const PERMUTATION_RETRIES: usize = 10_000;

/// A Latin-square low-density lattice code: sparse parity matrix `H`, dense
/// generator `G = H^-1`, and the factors `H^T = Q R` used for shaping.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "LdlcRepr", into = "LdlcRepr")]
pub struct LdlcCode {
    sequence: Vec<f64>,
    n: usize,
    seed: Option<u64>,
    scale: f64,
    parity: DMatrix<f64>,
    rows: Vec<Vec<(usize, f64)>>,
    cols: Vec<Vec<(usize, f64)>>,
    generator: DMatrix<f64>,
    triangle: DMatrix<f64>,
    rotation: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct LdlcRepr {
    sequence: Vec<f64>,
    n: usize,
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parity: Option<Vec<Vec<f64>>>,
}

impl TryFrom<LdlcRepr> for LdlcCode {
    type Error = Error;

    fn try_from(repr: LdlcRepr) -> Result<Self> {
        match (repr.seed, repr.parity) {
            (Some(seed), _) => build_parity(&repr.sequence, repr.n, seed),
            (None, Some(rows)) => LdlcCode::from_parity(&rows),
            (None, None) => Err(Error::InvalidArgument(
                "LDLC needs a seed or a parity matrix".into(),
            )),
        }
    }
}

impl From<LdlcCode> for LdlcRepr {
    fn from(code: LdlcCode) -> Self {
        let parity = match code.seed {
            Some(_) => None,
            None => Some(code.parity_rows_dense()),
        };
        LdlcRepr {
            sequence: code.sequence,
            n: code.n,
            seed: code.seed,
            parity,
        }
    }
}

impl LdlcCode {
    /// Wraps an explicit parity matrix. The generating sequence is read off the
    /// first row and the matrix must satisfy the Latin-square invariants.
    pub fn from_parity(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument("parity matrix is empty".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("parity matrix"));
        }
        let mut sequence: Vec<f64> = rows[0]
            .iter()
            .filter(|v| **v != 0.0)
            .map(|v| v.abs())
            .collect();
        sequence.sort_by(|a, b| b.total_cmp(a));
        if !check_latin_square(rows, &sequence) {
            return Err(Error::ConstructionFailed(
                "matrix is not a Latin-square parity matrix".into(),
            ));
        }
        let parity = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::assemble(sequence, None, 1.0, parity)
            .ok_or_else(|| Error::ConstructionFailed("parity matrix is singular".into()))
    }

    fn assemble(
        sequence: Vec<f64>,
        seed: Option<u64>,
        scale: f64,
        parity: DMatrix<f64>,
    ) -> Option<Self> {
        let n = parity.nrows();
        let generator = parity.clone().try_inverse()?;
        let product = &parity * &generator;
        let identity = DMatrix::<f64>::identity(n, n);
        if (product - identity).amax() > INVERSE_TOLERANCE
            || generator.iter().any(|v| !v.is_finite())
        {
            return None;
        }
        let qr = parity.transpose().qr();
        let triangle = qr.r().transpose();
        let rotation = qr.q();
        let mut rows = vec![Vec::new(); n];
        let mut cols = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                let v = parity[(i, j)];
                if v != 0.0 {
                    rows[i].push((j, v));
                    cols[j].push((i, v));
                }
            }
        }
        Some(Self {
            sequence,
            n,
            seed,
            scale,
            parity,
            rows,
            cols,
            generator,
            triangle,
            rotation,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.sequence.len()
    }

    /// The generating sequence as given, before determinant normalization.
    pub fn generating_sequence(&self) -> &[f64] {
        &self.sequence
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Factor dividing the generating sequence so that `|det H| = 1`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn parity(&self) -> &DMatrix<f64> {
        &self.parity
    }

    pub fn parity_rows_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.parity.row(i).iter().copied().collect())
            .collect()
    }

    /// Non-zeros of each row as `(column, value)`.
    pub fn check_rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    /// Non-zeros of each column as `(row, value)`.
    pub fn variable_cols(&self) -> &[Vec<(usize, f64)>] {
        &self.cols
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    /// Lower-triangular `T` with `H = T Q^T`.
    pub fn triangle(&self) -> &DMatrix<f64> {
        &self.triangle
    }

    /// Orthogonal `Q`; `Q^T x` is the rotated codeword the shaping search works on.
    pub fn rotation(&self) -> &DMatrix<f64> {
        &self.rotation
    }

    /// `x = G b`.
    pub fn encode(&self, b: &[i64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: b.len(),
            });
        }
        Ok(mat_vec(&self.generator, b.iter().map(|v| *v as f64)))
    }

    /// `H x`.
    pub fn syndrome(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self
            .rows
            .iter()
            .map(|row| row.iter().map(|(j, h)| h * x[*j]).sum())
            .collect())
    }
}

pub(crate) fn mat_vec(m: &DMatrix<f64>, v: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out = vec![0.0; m.nrows()];
    for (j, vj) in v.enumerate() {
        if vj != 0.0 {
            for (o, mij) in out.iter_mut().zip(m.column(j).iter()) {
                *o += mij * vj;
            }
        }
    }
    out
}

/// `x = G b`.
pub fn ldlc_encode(code: &LdlcCode, b: &[i64]) -> Result<Vec<f64>> {
    code.encode(b)
}

/// True when every row and column has exactly `d` non-zeros whose magnitudes,
/// up to one common positive factor, are the generating sequence.
pub fn check_latin_square(rows: &[Vec<f64>], sequence: &[f64]) -> bool {
    let n = rows.len();
    let d = sequence.len();
    if n == 0 || d == 0 || d > n || rows.iter().any(|r| r.len() != n) {
        return false;
    }
    let mut target = sequence.to_vec();
    target.sort_by(|a, b| b.total_cmp(a));
    if target[d - 1] <= 0.0 {
        return false;
    }
    let largest = rows.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if largest == 0.0 {
        return false;
    }
    let factor = largest / target[0];
    let matches = |line: Vec<f64>| {
        let mut mags: Vec<f64> = line
            .into_iter()
            .filter(|v| *v != 0.0)
            .map(|v| v.abs() / factor)
            .collect();
        if mags.len() != d {
            return false;
        }
        mags.sort_by(|a, b| b.total_cmp(a));
        mags.iter()
            .zip(&target)
            .all(|(m, t)| (m - t).abs() <= MAGNITUDE_TOLERANCE * target[0])
    };
    (0..n).all(|i| matches(rows[i].clone()))
        && (0..n).all(|j| matches(rows.iter().map(|r| r[j]).collect()))
}

/// Seeded Latin-square construction: one random permutation per sequence
/// entry, pairwise disjoint, with random signs, then scaled to `|det H| = 1`.
pub fn build_parity(sequence: &[f64], n: usize, seed: u64) -> Result<LdlcCode> {
    let d = sequence.len();
    if d == 0 || sequence.iter().any(|h| !h.is_finite() || *h <= 0.0) {
        return Err(Error::InvalidArgument(
            "generating sequence must be non-empty and positive".into(),
        ));
    }
    if sequence.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument(
            "generating sequence must be sorted descending".into(),
        ));
    }
    if d > n {
        return Err(Error::ConstructionFailed(format!(
            "degree {d} exceeds dimension {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let Some(perms) = disjoint_permutations(n, d, &mut rng) else {
            continue;
        };
        let mut parity = DMatrix::<f64>::zeros(n, n);
        for (perm, h) in perms.iter().zip(sequence) {
            for (i, &j) in perm.iter().enumerate() {
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                parity[(i, j)] = sign * h;
            }
        }
        let lu = parity.clone().lu();
        let u = lu.u();
        let log_det: f64 = (0..n).map(|i| u[(i, i)].abs().ln()).sum();
        if !log_det.is_finite() {
            continue;
        }
        let scale = (log_det / n as f64).exp();
        parity /= scale;
        if let Some(code) = LdlcCode::assemble(sequence.to_vec(), Some(seed), scale, parity) {
            return Ok(code);
        }
    }
    Err(Error::ConstructionFailed(format!(
        "no non-singular assignment after {MAX_ATTEMPTS} attempts"
    )))
}

fn disjoint_permutations(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Option<Vec<Vec<usize>>> {
    let mut perms: Vec<Vec<usize>> = Vec::with_capacity(d);
    let mut taken = vec![vec![false; n]; n];
    for _ in 0..d {
        let perm = (0..PERMUTATION_RETRIES).find_map(|_| greedy_permutation(n, &taken, rng))?;
        for (i, &j) in perm.iter().enumerate() {
            taken[i][j] = true;
        }
        perms.push(perm);
    }
    Some(perms)
}

fn greedy_permutation(n: usize, taken: &[Vec<bool>], rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
    let mut free: Vec<usize> = (0..n).collect();
    free.shuffle(rng);
    let mut perm = Vec::with_capacity(n);
    for row in taken {
        let candidates: Vec<usize> = (0..free.len()).filter(|&p| !row[free[p]]).collect();
        let &pick = candidates.choose(rng)?;
        perm.push(free.swap_remove(pick));
    }
    Some(perm)
}
