//! Rate-diverse network coding with nested lattice codes.
//!
//! Two fine coding lattices share one coarse shaping lattice. The base station
//! sends `[c_A + c_B - d] mod Λs`; a receiver that knows the other user's
//! codeword subtracts it and is left with exactly the single-user nested
//! lattice channel of its own code. Everything here is exact enumeration, so
//! it is meant for dimensions up to about 4.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::lattice::{check_nested, Lattice, LatticePoint, RegionSampler, VoronoiRegion};
use crate::{Error, Result, User};

const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

/// A coarse shaping lattice with two fine coding lattices nested over it, and
/// the two codebooks `Λ_u ∩ V_s`.
#[derive(Debug, Clone)]
pub struct NestedCodePair {
    coarse: Lattice,
    fine_a: Lattice,
    fine_b: Lattice,
    codebook_a: Vec<LatticePoint>,
    codebook_b: Vec<LatticePoint>,
    search_radius: u32,
}

impl NestedCodePair {
    pub fn new(coarse: Lattice, fine_a: Lattice, fine_b: Lattice) -> Result<Self> {
        Self::with_search_radius(
            coarse,
            fine_a,
            fine_b,
            crate::lattice::DEFAULT_SEARCH_RADIUS,
        )
    }

    pub fn with_search_radius(
        coarse: Lattice,
        fine_a: Lattice,
        fine_b: Lattice,
        search_radius: u32,
    ) -> Result<Self> {
        for fine in [&fine_a, &fine_b] {
            if fine.rank() != fine.dimension() || coarse.rank() != coarse.dimension() {
                return Err(Error::InvalidArgument(
                    "nested codes need full-rank lattices".into(),
                ));
            }
            if !check_nested(&coarse, fine)? {
                return Err(Error::InvalidArgument(
                    "shaping lattice is not a sublattice of a coding lattice".into(),
                ));
            }
        }
        let codebook_a = enumerate_codebook(&coarse, &fine_a, search_radius)?;
        let codebook_b = enumerate_codebook(&coarse, &fine_b, search_radius)?;
        Ok(Self {
            coarse,
            fine_a,
            fine_b,
            codebook_a,
            codebook_b,
            search_radius,
        })
    }

    /// `Λs = 8Z`, `Λ_A = Z`, `Λ_B = 2Z`.
    pub fn one_dimensional() -> Self {
        Self::new(
            Lattice::scaled_integers(8.0).expect("valid"),
            Lattice::integer(1),
            Lattice::scaled_integers(2.0).expect("valid"),
        )
        .expect("8Z is nested in Z and 2Z")
    }

    /// Hexagonal pair: `Λs = 4H`, `Λ_A = H`, `Λ_B = 2H`.
    pub fn hexagonal() -> Self {
        let h = Lattice::hexagonal();
        Self::new(
            h.scaled(4.0).expect("valid"),
            h.clone(),
            h.scaled(2.0).expect("valid"),
        )
        .expect("4H is nested in H and 2H")
    }

    pub fn coarse(&self) -> &Lattice {
        &self.coarse
    }

    pub fn fine(&self, user: User) -> &Lattice {
        match user {
            User::A => &self.fine_a,
            User::B => &self.fine_b,
        }
    }

    /// Codebook of a user, sorted lexicographically by coefficient vector.
    pub fn codebook(&self, user: User) -> &[LatticePoint] {
        match user {
            User::A => &self.codebook_a,
            User::B => &self.codebook_b,
        }
    }

    pub fn dimension(&self) -> usize {
        self.coarse.dimension()
    }

    /// `log2 |C_u| / N` bits per real dimension.
    pub fn rate(&self, user: User) -> f64 {
        (self.codebook(user).len() as f64).log2() / self.dimension() as f64
    }

    pub fn search_radius(&self) -> u32 {
        self.search_radius
    }

    /// Message-to-codeword map `φ_u`.
    pub fn map_message(&self, user: User, message_index: usize) -> Result<&LatticePoint> {
        let book = self.codebook(user);
        book.get(message_index).ok_or(Error::IndexOutOfRange {
            index: message_index,
            size: book.len(),
        })
    }

    /// Inverse of [`map_message`](Self::map_message).
    pub fn message_index(&self, user: User, codeword: &LatticePoint) -> Option<usize> {
        self.codebook(user)
            .iter()
            .position(|c| c.coefficients == codeword.coefficients)
    }

    /// Single-user encoder `x = [c - d] mod Λs`.
    pub fn encode_single(
        &self,
        user: User,
        c: &LatticePoint,
        d: &DitherVector,
    ) -> Result<Vec<f64>> {
        self.require_codeword(user, c)?;
        let diff: Vec<f64> = c
            .coordinates
            .iter()
            .zip(&d.values)
            .map(|(a, b)| a - b)
            .collect();
        self.coarse.lattice_mod(&diff, self.search_radius)
    }

    /// Single-user decoder `Q_Λu(α y/β + d) mod Λs`.
    pub fn decode_single(
        &self,
        user: User,
        y: &[f64],
        beta: f64,
        alpha: f64,
        d: &DitherVector,
    ) -> Result<LatticePoint> {
        self.check_scalars(beta, alpha)?;
        self.check_len(y.len())?;
        let z: Vec<f64> = y
            .iter()
            .zip(&d.values)
            .map(|(v, dv)| alpha * v / beta + dv)
            .collect();
        self.quantize_to_codebook(user, &z)
    }

    /// Network-coded encoder `x_NC = [c_A + c_B - d] mod Λs`.
    pub fn encode_network(
        &self,
        c_a: &LatticePoint,
        c_b: &LatticePoint,
        d: &DitherVector,
    ) -> Result<Vec<f64>> {
        self.require_codeword(User::A, c_a)?;
        self.require_codeword(User::B, c_b)?;
        let sum: Vec<f64> = (0..self.dimension())
            .map(|i| c_a.coordinates[i] + c_b.coordinates[i] - d.values[i])
            .collect();
        self.coarse.lattice_mod(&sum, self.search_radius)
    }

    /// The two-step form: network-code `[c_A + c_B] mod Λs`, then dither.
    pub fn encode_network_two_step(
        &self,
        c_a: &LatticePoint,
        c_b: &LatticePoint,
        d: &DitherVector,
    ) -> Result<Vec<f64>> {
        self.require_codeword(User::A, c_a)?;
        self.require_codeword(User::B, c_b)?;
        let sum: Vec<f64> = c_a
            .coordinates
            .iter()
            .zip(&c_b.coordinates)
            .map(|(a, b)| a + b)
            .collect();
        let c_nc = self.coarse.lattice_mod(&sum, self.search_radius)?;
        let dithered: Vec<f64> = c_nc.iter().zip(&d.values).map(|(a, b)| a - b).collect();
        self.coarse.lattice_mod(&dithered, self.search_radius)
    }

    /// Receiver with side information:
    /// `Q_Λu(α(y/β - c_other) + d) mod Λs`.
    #[allow(clippy::too_many_arguments)]
    pub fn decode_with_side_info(
        &self,
        user: User,
        y: &[f64],
        beta: f64,
        alpha: f64,
        d: &DitherVector,
        side_codeword: &LatticePoint,
    ) -> Result<LatticePoint> {
        self.check_scalars(beta, alpha)?;
        self.check_len(y.len())?;
        self.require_codeword(user.other(), side_codeword)?;
        let z: Vec<f64> = (0..self.dimension())
            .map(|i| alpha * (y[i] / beta - side_codeword.coordinates[i]) + d.values[i])
            .collect();
        self.quantize_to_codebook(user, &z)
    }

    /// Quantizes onto `Λ_u` and returns the codebook representative of the
    /// result's coset modulo `Λs`.
    fn quantize_to_codebook(&self, user: User, z: &[f64]) -> Result<LatticePoint> {
        let q = self.fine(user).quantize_nearest(z, self.search_radius)?;
        let reduced = self
            .coarse
            .lattice_mod(&q.coordinates, self.search_radius)?;
        self.codebook(user)
            .iter()
            .find(|c| {
                let diff: Vec<f64> = reduced
                    .iter()
                    .zip(&c.coordinates)
                    .map(|(a, b)| a - b)
                    .collect();
                self.coarse.contains(&diff).unwrap_or(false)
            })
            .cloned()
            .ok_or_else(|| Error::InvalidArgument("decoded point has no codebook coset".into()))
    }

    fn require_codeword(&self, user: User, c: &LatticePoint) -> Result<()> {
        let found = self.codebook(user).iter().any(|p| {
            p.coordinates.len() == c.coordinates.len()
                && p.coordinates
                    .iter()
                    .zip(&c.coordinates)
                    .all(|(a, b)| (a - b).abs() <= MEMBERSHIP_TOLERANCE)
        });
        if found {
            Ok(())
        } else {
            Err(Error::CodewordNotInCodebook(user))
        }
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got,
            });
        }
        Ok(())
    }

    fn check_scalars(&self, beta: f64, alpha: f64) -> Result<()> {
        if !(beta > 0.0) {
            return Err(Error::NonPositiveInput("beta"));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        Ok(())
    }
}

/// Enumerates one representative of every coset of `coarse` in `fine` inside the
/// closed Voronoi region of `coarse`. Where boundary points of the same coset
/// compete, the lexicographically smallest coefficient vector wins.
fn enumerate_codebook(coarse: &Lattice, fine: &Lattice, radius: u32) -> Result<Vec<LatticePoint>> {
    let n = coarse.dimension();
    // Voronoi region of the coarse lattice lies in a ball of radius half the
    // sum of its basis lengths.
    let g = coarse.generator().entries();
    let reach: f64 = (0..g.ncols()).map(|j| g.column(j).norm()).sum::<f64>() / 2.0 + 1e-9;
    let fine_g = fine.generator().entries();
    let pinv = fine_g
        .clone()
        .pseudo_inverse(1e-14)
        .map_err(|e| Error::InvalidArgument(e.into()))?;
    let bounds: Vec<i64> = (0..fine.rank())
        .map(|i| (pinv.row(i).norm() * reach).ceil() as i64 + 1)
        .collect();

    let mut book: Vec<LatticePoint> = Vec::new();
    let mut b: Vec<i64> = bounds.iter().map(|&m| -m).collect();
    'scan: loop {
        let p = fine.point(&b)?;
        let reduced = coarse.lattice_mod(&p.coordinates, radius)?;
        let inside = reduced
            .iter()
            .zip(&p.coordinates)
            .all(|(a, c)| (a - c).abs() <= MEMBERSHIP_TOLERANCE);
        if inside {
            let duplicate = book.iter().any(|q| {
                let diff: Vec<f64> = q
                    .coordinates
                    .iter()
                    .zip(&p.coordinates)
                    .map(|(a, c)| a - c)
                    .collect();
                coarse.contains(&diff).unwrap_or(false)
            });
            if !duplicate {
                book.push(p);
            }
        }
        // lexicographic odometer, first coordinate most significant
        let mut i = b.len();
        loop {
            if i == 0 {
                break 'scan;
            }
            i -= 1;
            b[i] += 1;
            if b[i] <= bounds[i] {
                break;
            }
            b[i] = -bounds[i];
        }
    }
    debug_assert!(book.iter().all(|p| p.coordinates.len() == n));
    book.sort_by(|a, b| a.coefficients.cmp(&b.coefficients));
    Ok(book)
}

/// A dither vector in the shaping region `V_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct DitherVector {
    pub values: Vec<f64>,
    pub seed: Option<u64>,
}

impl DitherVector {
    pub fn zero(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
            seed: None,
        }
    }

    /// Uses `values` as dither after checking that they lie in `V_s`.
    pub fn from_values(pair: &NestedCodePair, values: Vec<f64>) -> Result<Self> {
        pair.check_len(values.len())?;
        let reduced = pair.coarse.lattice_mod(&values, pair.search_radius)?;
        if reduced
            .iter()
            .zip(&values)
            .any(|(a, b)| (a - b).abs() > MEMBERSHIP_TOLERANCE)
        {
            return Err(Error::InvalidArgument(
                "dither must lie in the shaping region".into(),
            ));
        }
        Ok(Self { values, seed: None })
    }

    /// Uniform dither over `V_s`.
    pub fn uniform(pair: &NestedCodePair, seed: u64) -> Result<Self> {
        let region = VoronoiRegion::new(&pair.coarse)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Self {
            values: region.sample(&mut rng),
            seed: Some(seed),
        })
    }
}

/// Closed-form and enumerated powers of the one-dimensional rate-diverse example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapingGain1d {
    pub half_width: i64,
    /// `L(L+1)/3`.
    pub power_a: f64,
    /// `L(L+2)/3`.
    pub power_b: f64,
    /// Closed-form network-coded power, equal to `power_a`.
    pub power_nc: f64,
    /// `E[x_NC^2]` by enumeration of all codeword pairs.
    pub power_nc_enumerated: f64,
    /// `10 log10((L+2)/(L+1))`, the extra shaping gain of the low-rate user.
    pub gain_db: f64,
}

/// Extra shaping gain for `Λ_A = Z`, `Λ_B = 2Z` on the interval `[-L, L]`.
///
/// The enumeration runs over `c_A ∈ {-L..L}` and `c_B ∈ {-L, -L+2, .., L}` and
/// reduces `c_A + c_B` onto the `2L+1` integers of the interval.
pub fn shaping_gain_1d(half_width: i64) -> Result<ShapingGain1d> {
    let l = half_width;
    if l < 2 || l % 2 != 0 {
        return Err(Error::OddL(l));
    }
    let lf = l as f64;
    let period = 2 * l + 1;
    let mut sum_sq: i128 = 0;
    let mut count: i128 = 0;
    for c_a in -l..=l {
        for c_b in (-l..=l).step_by(2) {
            let x = (c_a + c_b + l).rem_euclid(period) - l;
            sum_sq += (x * x) as i128;
            count += 1;
        }
    }
    Ok(ShapingGain1d {
        half_width: l,
        power_a: lf * (lf + 1.0) / 3.0,
        power_b: lf * (lf + 2.0) / 3.0,
        power_nc: lf * (lf + 1.0) / 3.0,
        power_nc_enumerated: sum_sq as f64 / count as f64,
        gain_db: 10.0 * ((lf + 2.0) / (lf + 1.0)).log10(),
    })
}

/// Mean of `c^2` over a codebook, for cross-checking the closed forms.
pub fn enumerated_power(values: impl IntoIterator<Item = i64>) -> f64 {
    let (s, n) = values
        .into_iter()
        .fold((0i128, 0i128), |(s, n), v| (s + (v * v) as i128, n + 1));
    s as f64 / n as f64
}
