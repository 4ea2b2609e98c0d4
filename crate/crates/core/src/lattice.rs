//! Real lattices: construction, nearest-point quantization, modulo reduction,
//! nesting checks and shaping diagnostics.
//!
//! Quantization enumerates candidate coefficient vectors in a box around the
//! rounded least-squares coefficients, so it is exact only for the small,
//! reasonably reduced lattices used in this crate (dimension up to about 4).

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use crate::{Error, Result};

/// Default per-coordinate search radius of [`Lattice::quantize_nearest`].
pub const DEFAULT_SEARCH_RADIUS: u32 = 2;

const RANK_TOLERANCE: f64 = 1e-10;
const INTEGRALITY_TOLERANCE: f64 = 1e-9;
const TIE_TOLERANCE: f64 = 1e-12;

/// An `N x K` real generator matrix with linearly independent columns.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    entries: DMatrix<f64>,
}

impl GeneratorMatrix {
    /// Builds a generator from row-major entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows[0].is_empty() {
            return Err(Error::InvalidArgument("generator matrix is empty".into()));
        }
        let k = rows[0].len();
        if let Some(bad) = rows.iter().find(|r| r.len() != k) {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: bad.len(),
            });
        }
        Self::from_matrix(DMatrix::from_fn(n, k, |i, j| rows[i][j]))
    }

    pub fn from_matrix(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::InvalidArgument("generator matrix is empty".into()));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("generator matrix"));
        }
        if entries.ncols() > entries.nrows() {
            return Err(Error::InvalidArgument(format!(
                "generator has more columns ({}) than rows ({})",
                entries.ncols(),
                entries.nrows()
            )));
        }
        let sv = entries.clone().svd(false, false).singular_values;
        let largest = sv.max();
        let smallest = sv.min();
        if largest <= 0.0 || smallest <= RANK_TOLERANCE * largest {
            let ratio = if largest > 0.0 {
                smallest / largest
            } else {
                0.0
            };
            return Err(Error::RankDeficient { ratio });
        }
        Ok(Self { entries })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: DMatrix::identity(n, n),
        }
    }

    /// Diagonal generator `diag(scales)`, e.g. `8Z` as `diagonal(&[8.0])`.
    pub fn diagonal(scales: &[f64]) -> Result<Self> {
        let n = scales.len();
        Self::from_matrix(DMatrix::from_fn(
            n,
            n,
            |i, j| if i == j { scales[i] } else { 0.0 },
        ))
    }

    /// Number of coordinates `N`.
    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    /// Number of basis vectors `K`.
    pub fn rank(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.entries.nrows())
            .map(|i| self.entries.row(i).iter().copied().collect())
            .collect()
    }

    /// Returns `scale * G`.
    pub fn scaled(&self, scale: f64) -> Result<Self> {
        Self::from_matrix(&self.entries * scale)
    }
}

/// A point `Gb` of a lattice together with its integer coefficients `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticePoint {
    pub coefficients: Vec<i64>,
    pub coordinates: Vec<f64>,
}

impl LatticePoint {
    pub fn norm_squared(&self) -> f64 {
        self.coordinates.iter().map(|v| v * v).sum()
    }
}

/// The lattice `{Gb : b integer}` of a generator matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "LatticeRepr", into = "LatticeRepr")]
pub struct Lattice {
    generator: GeneratorMatrix,
    pseudo_inverse: DMatrix<f64>,
    volume: f64,
}

#[derive(Serialize, Deserialize)]
struct LatticeRepr {
    generator: Vec<Vec<f64>>,
    dimension: usize,
}

impl TryFrom<LatticeRepr> for Lattice {
    type Error = Error;

    fn try_from(repr: LatticeRepr) -> Result<Self> {
        if repr.generator.len() != repr.dimension {
            return Err(Error::DimensionMismatch {
                expected: repr.dimension,
                got: repr.generator.len(),
            });
        }
        Lattice::new(GeneratorMatrix::from_rows(&repr.generator)?)
    }
}

impl From<Lattice> for LatticeRepr {
    fn from(lattice: Lattice) -> Self {
        LatticeRepr {
            dimension: lattice.dimension(),
            generator: lattice.generator.to_rows(),
        }
    }
}

impl Lattice {
    pub fn new(generator: GeneratorMatrix) -> Result<Self> {
        let g = generator.entries();
        let gram = g.transpose() * g;
        let volume = gram.determinant().abs().sqrt();
        let pseudo_inverse = gram
            .try_inverse()
            .ok_or(Error::RankDeficient { ratio: 0.0 })?
            * g.transpose();
        Ok(Self {
            generator,
            pseudo_inverse,
            volume,
        })
    }

    /// Convenience constructor from row-major entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(GeneratorMatrix::from_rows(rows)?)
    }

    /// The integer lattice `Z^n`.
    pub fn integer(n: usize) -> Self {
        Self::new(GeneratorMatrix::identity(n)).expect("identity generator is full rank")
    }

    /// The one-dimensional lattice `step * Z`.
    pub fn scaled_integers(step: f64) -> Result<Self> {
        Self::new(GeneratorMatrix::diagonal(&[step])?)
    }

    /// The two-dimensional hexagonal lattice with generator `[[1, -1/2], [0, sqrt(3)/2]]`.
    pub fn hexagonal() -> Self {
        Self::from_rows(&[vec![1.0, -0.5], vec![0.0, 3f64.sqrt() / 2.0]])
            .expect("hexagonal generator is full rank")
    }

    /// Returns the lattice generated by `scale * G`.
    pub fn scaled(&self, scale: f64) -> Result<Self> {
        Self::new(self.generator.scaled(scale)?)
    }

    pub fn generator(&self) -> &GeneratorMatrix {
        &self.generator
    }

    pub fn dimension(&self) -> usize {
        self.generator.dimension()
    }

    pub fn rank(&self) -> usize {
        self.generator.rank()
    }

    /// Volume of the fundamental Voronoi region, `sqrt(det(G^T G))`.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Lattice point with the given coefficients.
    pub fn point(&self, coefficients: &[i64]) -> Result<LatticePoint> {
        self.check_len(coefficients.len(), self.rank())?;
        let g = self.generator.entries();
        let coordinates = (0..self.dimension())
            .map(|i| {
                coefficients
                    .iter()
                    .enumerate()
                    .map(|(j, &b)| g[(i, j)] * b as f64)
                    .sum()
            })
            .collect();
        Ok(LatticePoint {
            coefficients: coefficients.to_vec(),
            coordinates,
        })
    }

    /// Least-squares real coefficients `G^+ x`.
    pub fn real_coefficients(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len(), self.dimension())?;
        Ok((0..self.rank())
            .map(|i| {
                x.iter()
                    .enumerate()
                    .map(|(j, v)| self.pseudo_inverse[(i, j)] * v)
                    .sum()
            })
            .collect())
    }

    /// True when `x` is (numerically) a point of this lattice.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        let b = self.real_coefficients(x)?;
        let rounded: Vec<i64> = b.iter().map(|v| v.round() as i64).collect();
        if b.iter()
            .zip(&rounded)
            .any(|(v, r)| (v - *r as f64).abs() > INTEGRALITY_TOLERANCE)
        {
            return Ok(false);
        }
        let p = self.point(&rounded)?;
        let scale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(p.coordinates
            .iter()
            .zip(x)
            .all(|(a, b)| (a - b).abs() <= INTEGRALITY_TOLERANCE * scale))
    }

    /// Nearest lattice point to `x` among the candidates `round(G^+ x) + t` with
    /// `|t_i| <= search_radius`.
    ///
    /// Ties are broken toward the point of smallest norm, then toward the
    /// lexicographically smallest coefficient vector.
    pub fn quantize_nearest(&self, x: &[f64], search_radius: u32) -> Result<LatticePoint> {
        if search_radius == 0 {
            return Err(Error::InvalidArgument(
                "search radius must be at least 1".into(),
            ));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("quantizer input"));
        }
        let center: Vec<i64> = self
            .real_coefficients(x)?
            .iter()
            .map(|v| v.round() as i64)
            .collect();
        let radius = search_radius as i64;
        let k = self.rank();
        let mut offset = vec![-radius; k];
        let mut candidate = vec![0i64; k];
        let mut best: Option<(f64, f64, Vec<i64>, Vec<f64>)> = None;
        loop {
            for i in 0..k {
                candidate[i] = center[i] + offset[i];
            }
            let point = self.point(&candidate)?;
            let dist: f64 = point
                .coordinates
                .iter()
                .zip(x)
                .map(|(p, v)| (p - v) * (p - v))
                .sum();
            let norm = point.norm_squared();
            let better = match &best {
                None => true,
                Some((bd, bn, bc, _)) => {
                    compare_candidates((dist, norm, &candidate), (*bd, *bn, bc)) == Ordering::Less
                }
            };
            if better {
                best = Some((dist, norm, candidate.clone(), point.coordinates));
            }
            // odometer over the search box
            let mut i = 0;
            loop {
                if i == k {
                    let (_, _, coefficients, coordinates) = best.expect("at least one candidate");
                    return Ok(LatticePoint {
                        coefficients,
                        coordinates,
                    });
                }
                offset[i] += 1;
                if offset[i] <= radius {
                    break;
                }
                offset[i] = -radius;
                i += 1;
            }
        }
    }

    /// `x mod Λ = x - Q(x)`, a point of the fundamental Voronoi region.
    pub fn lattice_mod(&self, x: &[f64], search_radius: u32) -> Result<Vec<f64>> {
        let q = self.quantize_nearest(x, search_radius)?;
        Ok(x.iter().zip(&q.coordinates).map(|(a, b)| a - b).collect())
    }

    fn check_len(&self, got: usize, expected: usize) -> Result<()> {
        if got != expected {
            return Err(Error::DimensionMismatch { expected, got });
        }
        Ok(())
    }
}

fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * (1.0 + a.abs().max(b.abs()))
}

/// Orders quantizer candidates by distance, then point norm, then coefficients.
fn compare_candidates(a: (f64, f64, &[i64]), b: (f64, f64, &[i64])) -> Ordering {
    if !approx_eq(a.0, b.0) {
        return a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal);
    }
    if !approx_eq(a.1, b.1) {
        return a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal);
    }
    a.2.cmp(b.2)
}

/// True iff every generator column of `coarse` has integer coordinates in the
/// basis of `fine` (within 1e-9), i.e. `coarse ⊂ fine`.
pub fn check_nested(coarse: &Lattice, fine: &Lattice) -> Result<bool> {
    if coarse.dimension() != fine.dimension() {
        return Err(Error::DimensionMismatch {
            expected: fine.dimension(),
            got: coarse.dimension(),
        });
    }
    let g = coarse.generator().entries();
    for j in 0..g.ncols() {
        let column: Vec<f64> = g.column(j).iter().copied().collect();
        if !fine.contains(&column)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A region that can be sampled uniformly.
pub trait RegionSampler {
    fn dimension(&self) -> usize;
    fn volume(&self) -> f64;
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64>;
}

/// The centred box `prod [-h_i, h_i]`.
#[derive(Debug, Clone)]
pub struct BoxRegion {
    pub half_widths: Vec<f64>,
}

impl BoxRegion {
    pub fn cube(n: usize, half_width: f64) -> Self {
        Self {
            half_widths: vec![half_width; n],
        }
    }
}

impl RegionSampler for BoxRegion {
    fn dimension(&self) -> usize {
        self.half_widths.len()
    }

    fn volume(&self) -> f64 {
        self.half_widths.iter().map(|h| 2.0 * h).product()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.half_widths
            .iter()
            .map(|&h| rng.gen_range(-h..h))
            .collect()
    }
}

/// Uniform samples of a lattice's fundamental Voronoi region, obtained by
/// reducing uniform points of the fundamental parallelepiped modulo the lattice.
#[derive(Debug, Clone)]
pub struct VoronoiRegion<'a> {
    lattice: &'a Lattice,
    search_radius: u32,
}

impl<'a> VoronoiRegion<'a> {
    pub fn new(lattice: &'a Lattice) -> Result<Self> {
        if lattice.rank() != lattice.dimension() {
            return Err(Error::InvalidArgument(
                "Voronoi sampling needs a full-rank lattice".into(),
            ));
        }
        Ok(Self {
            lattice,
            search_radius: DEFAULT_SEARCH_RADIUS,
        })
    }
}

impl RegionSampler for VoronoiRegion<'_> {
    fn dimension(&self) -> usize {
        self.lattice.dimension()
    }

    fn volume(&self) -> f64 {
        self.lattice.volume()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let g = self.lattice.generator().entries();
        let u: Vec<f64> = (0..g.ncols()).map(|_| rng.gen::<f64>()).collect();
        let x: Vec<f64> = (0..g.nrows())
            .map(|i| u.iter().enumerate().map(|(j, v)| g[(i, j)] * v).sum())
            .collect();
        self.lattice
            .lattice_mod(&x, self.search_radius)
            .expect("sample has lattice dimension")
    }
}

/// Monte Carlo second-moment statistics of a region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionStats {
    /// Per-dimension second moment `E||x||^2 / N`.
    pub second_moment: f64,
    /// `second_moment / Vol^(2/N)`.
    pub normalized_second_moment: f64,
    /// Standard error of `normalized_second_moment`.
    pub standard_error: f64,
    pub sample_count: usize,
}

/// Estimates the second moment and normalized second moment of a region.
pub fn shaping_stats<S: RegionSampler + ?Sized>(
    region: &S,
    samples: usize,
    seed: u64,
) -> Result<RegionStats> {
    if samples < 1000 {
        return Err(Error::InvalidArgument(format!(
            "need at least 1000 samples, got {samples}"
        )));
    }
    let n = region.dimension() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let x = region.sample(&mut rng);
        let e = x.iter().map(|v| v * v).sum::<f64>() / n;
        sum += e;
        sum_sq += e * e;
    }
    let count = samples as f64;
    let mean = sum / count;
    let var = ((sum_sq / count) - mean * mean).max(0.0) * count / (count - 1.0);
    let norm = region.volume().powf(2.0 / n);
    Ok(RegionStats {
        second_moment: mean,
        normalized_second_moment: mean / norm,
        standard_error: (var / count).sqrt() / norm,
        sample_count: samples,
    })
}

/// Shaping loss of a region relative to a sphere, `10 log10(2 pi e G)`, in dB.
pub fn shaping_loss_db(normalized_second_moment: f64) -> f64 {
    10.0 * (2.0 * std::f64::consts::PI * std::f64::consts::E * normalized_second_moment).log10()
}

/// Volume-to-noise ratio `Vol^(2/N) / noise_var`.
pub fn volume_to_noise_ratio(lattice: &Lattice, noise_var: f64) -> f64 {
    lattice.volume().powf(2.0 / lattice.dimension() as f64) / noise_var
}

/// Point-to-point AWGN capacity and MMSE scaling coefficient at one SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AwgnFigures {
    /// `log2(1 + SNR) / 2` bits per real channel use.
    pub capacity: f64,
    /// `SNR / (1 + SNR)`.
    pub mmse_alpha: f64,
}

pub fn awgn_figures(snr_linear: f64) -> Result<AwgnFigures> {
    if snr_linear.is_nan() {
        return Err(Error::NonFinite("snr"));
    }
    if snr_linear < 0.0 {
        return Err(Error::NegativeSnr(snr_linear));
    }
    Ok(AwgnFigures {
        capacity: 0.5 * (1.0 + snr_linear).log2(),
        mmse_alpha: snr_linear / (1.0 + snr_linear),
    })
}
