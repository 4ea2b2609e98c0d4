//! The two-user Gaussian broadcast channel `y_u = β_u x + n_u`, SNR bookkeeping
//! and a seeded Monte Carlo error-rate engine.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, User};

/// Whether `noise_var` is per real dimension or the total per complex symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalKind {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BroadcastChannel {
    pub beta_a: f64,
    pub beta_b: f64,
    pub noise_var: f64,
    pub signal_kind: SignalKind,
}

impl BroadcastChannel {
    /// `noise_var == 0` is accepted and gives a noiseless channel.
    pub fn new(beta_a: f64, beta_b: f64, noise_var: f64, signal_kind: SignalKind) -> Result<Self> {
        if !(beta_a > 0.0) || !beta_a.is_finite() {
            return Err(Error::NonPositiveInput("beta_a"));
        }
        if !(beta_b > 0.0) || !beta_b.is_finite() {
            return Err(Error::NonPositiveInput("beta_b"));
        }
        if !(noise_var >= 0.0) || !noise_var.is_finite() {
            return Err(Error::NonPositiveInput("noise_var"));
        }
        Ok(Self {
            beta_a,
            beta_b,
            noise_var,
            signal_kind,
        })
    }

    pub fn beta(&self, user: User) -> f64 {
        match user {
            User::A => self.beta_a,
            User::B => self.beta_b,
        }
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Noise stream index of a user; streams of different users are independent.
pub fn user_stream(user: User) -> u64 {
    match user {
        User::A => 1,
        User::B => 2,
    }
}

/// `len` i.i.d. real Gaussian samples of the given variance.
pub fn gaussian_noise(len: usize, variance: f64, seed: u64, stream: u64) -> Vec<f64> {
    let sd = variance.max(0.0).sqrt();
    let mut rng = stream_rng(seed, stream);
    (0..len)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            sd * z
        })
        .collect()
}

/// `len` circular complex Gaussian samples with total variance `variance`,
/// split evenly between the real and imaginary parts.
pub fn complex_gaussian_noise(len: usize, variance: f64, seed: u64, stream: u64) -> Vec<Complex64> {
    let sd = (variance.max(0.0) / 2.0).sqrt();
    let mut rng = stream_rng(seed, stream);
    (0..len)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(sd * re, sd * im)
        })
        .collect()
}

/// Real broadcast: returns `(y_A, y_B)`.
pub fn transmit_broadcast(
    channel: &BroadcastChannel,
    x: &[f64],
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("transmit signal"));
    }
    let receive = |user: User| -> Vec<f64> {
        let beta = channel.beta(user);
        if channel.noise_var == 0.0 {
            return x.iter().map(|v| beta * v).collect();
        }
        let noise = gaussian_noise(x.len(), channel.noise_var, seed, user_stream(user));
        x.iter().zip(noise).map(|(v, n)| beta * v + n).collect()
    };
    Ok((receive(User::A), receive(User::B)))
}

/// Complex broadcast: returns `(y_A, y_B)`.
pub fn transmit_broadcast_complex(
    channel: &BroadcastChannel,
    x: &[Complex64],
    seed: u64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite("transmit signal"));
    }
    let receive = |user: User| -> Vec<Complex64> {
        let beta = channel.beta(user);
        if channel.noise_var == 0.0 {
            return x.iter().map(|v| v * beta).collect();
        }
        let noise = complex_gaussian_noise(x.len(), channel.noise_var, seed, user_stream(user));
        x.iter().zip(noise).map(|(v, n)| v * beta + n).collect()
    };
    Ok((receive(User::A), receive(User::B)))
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrFigures {
    pub snr_linear: f64,
    pub snr_db: f64,
    /// `log2(1 + SNR) / 2` bits per real channel use.
    pub capacity: f64,
}

/// Receiver SNR `P β² / σ²` and the corresponding single-user capacity.
pub fn snr_accounting(power: f64, beta: f64, noise_var: f64) -> Result<SnrFigures> {
    for (v, name) in [(power, "power"), (beta, "beta"), (noise_var, "noise_var")] {
        if !(v > 0.0) {
            return Err(Error::NonPositiveInput(name));
        }
    }
    let snr_linear = power * beta * beta / noise_var;
    Ok(SnrFigures {
        snr_linear,
        snr_db: linear_to_db(snr_linear),
        capacity: 0.5 * (1.0 + snr_linear).log2(),
    })
}

/// Aggregated error counts of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub trials: u64,
    pub errors: u64,
    /// Number of symbols or bits the error count is taken over.
    pub denominator: u64,
    pub rate_estimate: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    /// Variance inflation from errors clustering within trials; the interval
    /// uses `denominator / design_effect` as its sample size.
    pub design_effect: f64,
    pub seed: u64,
}

impl ErrorStats {
    /// Stats for independent errors: the plain Wilson interval.
    pub fn from_counts(trials: u64, errors: u64, denominator: u64, seed: u64) -> Self {
        Self::with_design_effect(trials, errors, denominator, 1.0, seed)
    }

    /// Stats from per-trial counts, widening the interval when errors cluster.
    pub fn from_moments(m: &TrialMoments, seed: u64) -> Self {
        Self::with_design_effect(m.trials, m.errors, m.denominator, m.design_effect(), seed)
    }

    fn with_design_effect(
        trials: u64,
        errors: u64,
        denominator: u64,
        design_effect: f64,
        seed: u64,
    ) -> Self {
        let rate_estimate = if denominator == 0 {
            0.0
        } else {
            errors as f64 / denominator as f64
        };
        let (ci95_low, ci95_high) = if design_effect <= 1.0 {
            wilson_interval(errors, denominator)
        } else {
            wilson_bounds(errors, denominator, denominator as f64 / design_effect)
        };
        Self {
            trials,
            errors,
            denominator,
            rate_estimate,
            ci95_low,
            ci95_high,
            design_effect,
            seed,
        }
    }

    /// True when the two 95% intervals intersect.
    pub fn overlaps(&self, other: &ErrorStats) -> bool {
        self.ci95_low <= other.ci95_high && other.ci95_low <= self.ci95_high
    }
}

/// Running sums of per-trial `(errors, denominator)` pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TrialMoments {
    pub trials: u64,
    pub errors: u64,
    pub denominator: u64,
    sum_e2: f64,
    sum_ed: f64,
    sum_d2: f64,
}

impl TrialMoments {
    pub fn push(&mut self, errors: u64, denominator: u64) {
        let (e, d) = (errors as f64, denominator as f64);
        self.trials += 1;
        self.errors += errors;
        self.denominator += denominator;
        self.sum_e2 += e * e;
        self.sum_ed += e * d;
        self.sum_d2 += d * d;
    }

    /// Ratio-estimator variance over the binomial variance, at least 1.
    pub fn design_effect(&self) -> f64 {
        if self.trials < 2 || self.errors == 0 || self.errors == self.denominator {
            return 1.0;
        }
        let n = self.trials as f64;
        let total = self.denominator as f64;
        let p = self.errors as f64 / total;
        let mean_d = total / n;
        let residual = (self.sum_e2 - 2.0 * p * self.sum_ed + p * p * self.sum_d2).max(0.0);
        let clustered = residual / (n - 1.0) / (n * mean_d * mean_d);
        let binomial = p * (1.0 - p) / total;
        (clustered / binomial).max(1.0)
    }
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(errors: u64, n: u64) -> (f64, f64) {
    wilson_bounds(errors, n, n as f64)
}

/// Wilson interval for the rate `errors / n` with effective sample size `n_eff`.
fn wilson_bounds(errors: u64, n: u64, n_eff: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    const Z: f64 = 1.959_963_984_540_054;
    let nf = n_eff;
    let p = errors as f64 / n as f64;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let low = if errors == 0 {
        0.0
    } else {
        (center - half).clamp(0.0, p)
    };
    let high = if errors == n {
        1.0
    } else {
        (center + half).clamp(p, 1.0)
    };
    (low, high)
}

/// Seed of trial `index` in a run with `base_seed`.
pub fn trial_seed(base_seed: u64, index: u64) -> u64 {
    base_seed.wrapping_add(index)
}

/// Runs `trial_fn(seed)` for trials `0, 1, ..` until `min_errors` errors have
/// accumulated (0 disables the stop rule) or `max_trials` trials have run.
///
/// Each trial returns `(errors, denominator)`. The interval treats trials, not
/// single symbols or bits, as the independent units. Trials are evaluated in parallel
/// chunks, but the stop point and the aggregate are those of a sequential run.
pub fn run_monte_carlo<F, E>(
    trial_fn: F,
    max_trials: u64,
    min_errors: u64,
    base_seed: u64,
) -> Result<ErrorStats>
where
    F: Fn(u64) -> std::result::Result<(u64, u64), E> + Sync,
    E: std::fmt::Display + Send,
{
    if max_trials == 0 {
        return Err(Error::InvalidArgument(
            "max_trials must be at least 1".into(),
        ));
    }
    let chunk = (rayon::current_num_threads() as u64 * 4).max(1);
    let mut moments = TrialMoments::default();
    let mut start = 0u64;
    while start < max_trials {
        let end = (start + chunk).min(max_trials);
        let results: Vec<_> = (start..end)
            .into_par_iter()
            .map(|i| (i, trial_fn(trial_seed(base_seed, i))))
            .collect();
        for (index, outcome) in results {
            let (e, d) = outcome.map_err(|err| Error::TrialFailed {
                index,
                message: err.to_string(),
            })?;
            moments.push(e, d);
            if min_errors > 0 && moments.errors >= min_errors {
                return Ok(ErrorStats::from_moments(&moments, base_seed));
            }
        }
        start = end;
    }
    Ok(ErrorStats::from_moments(&moments, base_seed))
}
