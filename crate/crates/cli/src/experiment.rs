//! Runs a parsed experiment and aggregates the Monte Carlo counts into rows.

use std::time::Instant;

use latnc_core::bicm::{
    bicm_nc_trial, bicm_p2p_trial, bit_errors, distance_gain_db, BicmLink, JOINT_8PSK_DISTANCE,
};
use latnc_core::channel::{db_to_linear, gaussian_noise, run_monte_carlo, user_stream};
use latnc_core::ldlc::{
    build_parity, cancel_side_info, count_symbol_errors, network_encode_shape, single_user_shape,
    BpConfig, BpDecoder,
};
use latnc_core::nested::shaping_gain_1d;
use latnc_core::{
    BroadcastChannel, Constellation, DitherVector, ErrorStats, LdlcCode, NestedCodePair, RaCode,
    RateDiverseMapping, SignalKind, User,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentConfig, LatticeKind, Scheme, SnrAxis};
use crate::error::{CoreContext, Result};
use crate::output::ResultRow;

/// Stream used for message draws, apart from the per-user noise streams.
const MESSAGE_STREAM: u64 = 3;

fn message_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(MESSAGE_STREAM);
    rng
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    run_experiment_with(config, |_| {})
}

/// Like [`run_experiment`], calling `progress` after each finished row.
pub fn run_experiment_with(
    config: &ExperimentConfig,
    mut progress: impl FnMut(&ResultRow),
) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let mut rows = Vec::new();
    let mut push = |row: ResultRow, rows: &mut Vec<ResultRow>| {
        progress(&row);
        rows.push(row);
    };
    match config.scheme {
        Scheme::ShapingGain1d => push(shaping_row(config)?, &mut rows),
        Scheme::LatticeIdentity => {
            let pair = match config.lattice {
                LatticeKind::OneDimensional => NestedCodePair::one_dimensional(),
                LatticeKind::Hexagonal => NestedCodePair::hexagonal(),
            };
            for &user in &config.users {
                for &snr in &config.snr_sweep_db {
                    push(identity_row(config, &pair, user, snr)?, &mut rows);
                }
            }
        }
        Scheme::LdlcP2p | Scheme::LdlcRdwnc => {
            let ldlc = LdlcSetup::new(config)?;
            for &user in &config.users {
                for &snr in &config.snr_sweep_db {
                    push(ldlc.row(config, config.scheme, user, snr)?, &mut rows);
                    if config.baseline {
                        push(ldlc.row(config, Scheme::LdlcP2p, user, snr)?, &mut rows);
                    }
                }
            }
        }
        Scheme::BicmP2p | Scheme::BicmRdwnc => {
            let bicm = BicmSetup::new(config)?;
            for &user in &config.users {
                for &snr in &config.snr_sweep_db {
                    push(bicm.row(config, config.scheme, user, snr)?, &mut rows);
                    if config.baseline {
                        push(bicm.row(config, Scheme::BicmP2p, user, snr)?, &mut rows);
                    }
                }
            }
        }
    }
    Ok(rows)
}

fn row_from(
    scheme: Scheme,
    user: User,
    snr_db: f64,
    rate: f64,
    stats: &ErrorStats,
    start: Instant,
) -> ResultRow {
    ResultRow {
        scheme: scheme.name().into(),
        user,
        snr_db,
        rate_bits_per_use: rate,
        error_rate: stats.rate_estimate,
        ci95_low: stats.ci95_low,
        ci95_high: stats.ci95_high,
        trials: stats.trials,
        errors: stats.errors,
        wall_seconds: start.elapsed().as_secs_f64(),
        gain_db: None,
    }
}

fn shaping_row(config: &ExperimentConfig) -> Result<ResultRow> {
    let start = Instant::now();
    let l = config.half_width.unwrap_or_default();
    let gain = shaping_gain_1d(l).context(|| format!("shaping gain for L = {l}"))?;
    Ok(ResultRow {
        scheme: Scheme::ShapingGain1d.name().into(),
        user: User::B,
        snr_db: 0.0,
        rate_bits_per_use: ((l + 1) as f64).log2(),
        error_rate: 0.0,
        ci95_low: 0.0,
        ci95_high: 0.0,
        trials: 0,
        errors: 0,
        wall_seconds: start.elapsed().as_secs_f64(),
        gain_db: Some(gain.gain_db),
    })
}

/// Counts draws where the side-information decoder and the coupled
/// single-user decoder disagree.
fn identity_row(
    config: &ExperimentConfig,
    pair: &NestedCodePair,
    user: User,
    snr_db: f64,
) -> Result<ResultRow> {
    let start = Instant::now();
    let noise_var = 1.0 / db_to_linear(snr_db);
    let beta = config.beta(user);
    let n = pair.dimension();
    let trial = |seed: u64| -> latnc_core::Result<(u64, u64)> {
        let mut rng = message_rng(seed);
        let c_a = pair.map_message(User::A, rng.gen_range(0..pair.codebook(User::A).len()))?;
        let c_b = pair.map_message(User::B, rng.gen_range(0..pair.codebook(User::B).len()))?;
        let (own, side) = if user == User::A {
            (c_a, c_b)
        } else {
            (c_b, c_a)
        };
        let dither = DitherVector::uniform(pair, seed)?;
        let noise = gaussian_noise(n, noise_var, seed, user_stream(user));
        let received =
            |x: Vec<f64>| -> Vec<f64> { x.iter().zip(&noise).map(|(x, z)| beta * x + z).collect() };
        let y_nc = received(pair.encode_network(c_a, c_b, &dither)?);
        let y_su = received(pair.encode_single(user, own, &dither)?);
        let nc = pair.decode_with_side_info(user, &y_nc, beta, 1.0, &dither, side)?;
        let su = pair.decode_single(user, &y_su, beta, 1.0, &dither)?;
        Ok((u64::from(nc.coefficients != su.coefficients), 1))
    };
    let stats = run_monte_carlo(trial, config.trials, config.min_errors, config.seed)
        .context(|| format!("lattice-identity, user {user}, {snr_db} dB"))?;
    Ok(row_from(
        Scheme::LatticeIdentity,
        user,
        snr_db,
        pair.rate(user),
        &stats,
        start,
    ))
}

struct LdlcSetup {
    code: LdlcCode,
    mapping: RateDiverseMapping,
    bp: BpConfig,
}

impl LdlcSetup {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        let code = build_parity(&config.generating_sequence, config.n, config.code_seed)
            .context(|| "building the LDLC parity matrix".into())?;
        let mapping = RateDiverseMapping::uniform(config.n, config.l_a, config.l_b, config.epsilon)
            .context(|| "building the rate-diverse mapping".into())?;
        let bp = BpConfig {
            iterations: config.bp_iterations,
            step: config.step,
            span: config.span,
        };
        Ok(Self { code, mapping, bp })
    }

    fn message(&self, user: User, rng: &mut ChaCha8Rng) -> Vec<i64> {
        self.mapping
            .half_widths(user)
            .iter()
            .map(|l| rng.gen_range(-l..*l))
            .collect()
    }

    /// Symbol errors of one codeword. Both schemes draw the same messages and
    /// the same noise for a given seed.
    fn trial(
        &self,
        config: &ExperimentConfig,
        scheme: Scheme,
        user: User,
        noise_var: f64,
        seed: u64,
    ) -> latnc_core::Result<(u64, u64)> {
        let mut rng = message_rng(seed);
        let b_a = self.message(User::A, &mut rng);
        let b_b = self.message(User::B, &mut rng);
        let (own, other) = if user == User::A {
            (&b_a, &b_b)
        } else {
            (&b_b, &b_a)
        };
        let beta = config.beta(user);
        let noise = gaussian_noise(self.code.n(), noise_var, seed, user_stream(user));
        let shaped = match scheme {
            Scheme::LdlcRdwnc => {
                network_encode_shape(&self.code, &self.mapping, &b_a, &b_b, config.m_width)?
            }
            _ => single_user_shape(&self.code, &self.mapping, user, own, config.m_width)?,
        };
        let y: Vec<f64> = shaped
            .x
            .iter()
            .zip(&noise)
            .map(|(x, z)| beta * x + z)
            .collect();
        let y = match scheme {
            Scheme::LdlcRdwnc => {
                cancel_side_info(&y, beta, &self.code, &self.mapping, user, other)?
            }
            _ => y.iter().map(|v| v / beta).collect(),
        };
        let mut decoder = BpDecoder::new(&self.code, self.mapping.decoder_ranges(user), self.bp)?;
        let out = decoder.decode(&y, noise_var / (beta * beta))?;
        let errors = count_symbol_errors(&out.b_prime, &self.mapping, user, own);
        Ok((errors as u64, self.code.n() as u64))
    }

    fn row(
        &self,
        config: &ExperimentConfig,
        scheme: Scheme,
        user: User,
        snr_db: f64,
    ) -> Result<ResultRow> {
        let start = Instant::now();
        let noise_var = 1.0 / db_to_linear(snr_db);
        let stats = run_monte_carlo(
            |seed| self.trial(config, scheme, user, noise_var, seed),
            config.trials,
            config.min_errors,
            config.seed,
        )
        .context(|| format!("{scheme}, user {user}, {snr_db} dB"))?;
        Ok(row_from(
            scheme,
            user,
            snr_db,
            self.mapping.rate(user),
            &stats,
            start,
        ))
    }
}

struct BicmSetup {
    code_a: RaCode,
    code_b: RaCode,
    constellation: Constellation,
}

impl BicmSetup {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        let code = |user: User, seed: u64| {
            RaCode::new(config.info_bits_of(user), config.repetition(user), seed)
                .context(|| format!("building the RA code of user {user}"))
        };
        Ok(Self {
            code_a: code(User::A, config.ra_seed)?,
            code_b: code(User::B, config.ra_seed.wrapping_add(1))?,
            constellation: Constellation::by_name(&config.constellation)
                .context(|| "constellation".into())?,
        })
    }

    fn code(&self, user: User) -> &RaCode {
        match user {
            User::A => &self.code_a,
            User::B => &self.code_b,
        }
    }

    /// Information bits per complex channel use.
    fn rate(&self, user: User) -> f64 {
        self.constellation.bits_per_symbol() as f64 * self.code(user).rate()
    }

    fn row(
        &self,
        config: &ExperimentConfig,
        scheme: Scheme,
        user: User,
        snr_db: f64,
    ) -> Result<ResultRow> {
        let start = Instant::now();
        let es_n0_db = match config.snr_axis {
            SnrAxis::EsN0 => snr_db,
            SnrAxis::EbN0 => snr_db + 10.0 * self.rate(user).log10(),
        };
        let noise_var = 1.0 / db_to_linear(es_n0_db);
        let channel =
            BroadcastChannel::new(config.beta_a, config.beta_b, noise_var, SignalKind::Complex)
                .context(|| "broadcast channel".into())?;
        let link = BicmLink {
            code_a: &self.code_a,
            code_b: &self.code_b,
            constellation: &self.constellation,
            interleaver_seed: config.interleaver_seed,
            iterations: config.ra_iterations,
        };
        let trial = |seed: u64| -> latnc_core::Result<(u64, u64)> {
            let mut rng = message_rng(seed);
            let mut bits =
                |len: usize| -> Vec<u8> { (0..len).map(|_| rng.gen_range(0..2u8)).collect() };
            let bits_a = bits(self.code_a.info_length());
            let bits_b = bits(self.code_b.info_length());
            let own = if user == User::A { &bits_a } else { &bits_b };
            let decoded = match scheme {
                Scheme::BicmRdwnc => {
                    let both = bicm_nc_trial(&link, &bits_a, &bits_b, &channel, seed)?;
                    if user == User::A {
                        both.a
                    } else {
                        both.b
                    }
                }
                _ => bicm_p2p_trial(&link, user, own, &channel, seed)?,
            };
            Ok((bit_errors(&decoded, own), own.len() as u64))
        };
        let stats = run_monte_carlo(trial, config.trials, config.min_errors, config.seed)
            .context(|| format!("{scheme}, user {user}, {snr_db} dB"))?;
        let mut row = row_from(scheme, user, snr_db, self.rate(user), &stats, start);
        // modulation part of user B's advantage over joint 8-PSK
        if user == User::B {
            row.gain_db = Some(distance_gain_db(2.0, JOINT_8PSK_DISTANCE));
        }
        Ok(row)
    }
}
