//! Experiment description files.

use latnc_core::ldlc::degree_seven_sequence;
use latnc_core::{Constellation, User};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    LdlcP2p,
    LdlcRdwnc,
    BicmP2p,
    BicmRdwnc,
    LatticeIdentity,
    #[serde(rename = "shaping-gain-1d")]
    ShapingGain1d,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::LdlcP2p => "ldlc-p2p",
            Scheme::LdlcRdwnc => "ldlc-rdwnc",
            Scheme::BicmP2p => "bicm-p2p",
            Scheme::BicmRdwnc => "bicm-rdwnc",
            Scheme::LatticeIdentity => "lattice-identity",
            Scheme::ShapingGain1d => "shaping-gain-1d",
        }
    }

    /// Point-to-point counterpart of a broadcast scheme.
    pub fn baseline(self) -> Option<Scheme> {
        match self {
            Scheme::LdlcRdwnc => Some(Scheme::LdlcP2p),
            Scheme::BicmRdwnc => Some(Scheme::BicmP2p),
            _ => None,
        }
    }

    fn uses_sweep(self) -> bool {
        self != Scheme::ShapingGain1d
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Nested code used by `lattice-identity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    #[serde(rename = "1d")]
    OneDimensional,
    Hexagonal,
}

/// What `snr_sweep_db` measures for the BICM schemes. Lattice schemes always
/// use `10 log10(1 / σ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnrAxis {
    EsN0,
    EbN0,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scheme: Scheme,

    /// Half-width of the one-dimensional shaping example.
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<i64>,
    #[serde(default = "default_lattice")]
    pub lattice: LatticeKind,

    #[serde(default = "degree_seven_sequence")]
    pub generating_sequence: Vec<f64>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "one")]
    pub code_seed: u64,
    #[serde(rename = "L_A", default = "default_l_a")]
    pub l_a: i64,
    #[serde(rename = "L_B", default = "default_l_b")]
    pub l_b: i64,
    #[serde(default = "default_epsilon")]
    pub epsilon: i64,
    #[serde(default = "default_m_width")]
    pub m_width: usize,
    #[serde(default = "default_bp_iterations")]
    pub bp_iterations: usize,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_span")]
    pub span: f64,

    #[serde(default = "default_constellation")]
    pub constellation: String,
    #[serde(rename = "q_A", default = "default_q_a")]
    pub q_a: usize,
    #[serde(rename = "q_B", default = "default_q_b")]
    pub q_b: usize,
    /// Source bits per packet of user A; user B's length keeps the coded
    /// lengths equal.
    #[serde(default = "default_info_bits")]
    pub info_bits: usize,
    #[serde(default = "default_ra_iterations")]
    pub ra_iterations: usize,
    #[serde(default = "one")]
    pub ra_seed: u64,
    #[serde(default = "one")]
    pub interleaver_seed: u64,
    #[serde(default = "default_axis")]
    pub snr_axis: SnrAxis,

    #[serde(default)]
    pub snr_sweep_db: Vec<f64>,
    #[serde(default = "default_users")]
    pub users: Vec<User>,
    #[serde(rename = "beta_A", default = "unit")]
    pub beta_a: f64,
    #[serde(rename = "beta_B", default = "unit")]
    pub beta_b: f64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Stop a point once this many errors are seen; 0 runs all trials.
    #[serde(default = "default_min_errors")]
    pub min_errors: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub baseline: bool,
}

fn default_lattice() -> LatticeKind {
    LatticeKind::OneDimensional
}
fn default_n() -> usize {
    100
}
fn one() -> u64 {
    1
}
fn default_l_a() -> i64 {
    4
}
fn default_l_b() -> i64 {
    2
}
fn default_epsilon() -> i64 {
    latnc_core::ldlc::DEFAULT_EPSILON
}
fn default_m_width() -> usize {
    latnc_core::ldlc::DEFAULT_M_WIDTH
}
fn default_bp_iterations() -> usize {
    latnc_core::ldlc::DEFAULT_ITERATIONS
}
fn default_step() -> f64 {
    latnc_core::ldlc::DEFAULT_STEP
}
fn default_span() -> f64 {
    latnc_core::ldlc::DEFAULT_SPAN
}
fn default_constellation() -> String {
    "qpsk".into()
}
fn default_q_a() -> usize {
    2
}
fn default_q_b() -> usize {
    4
}
fn default_info_bits() -> usize {
    1000
}
fn default_ra_iterations() -> usize {
    latnc_core::bicm::DEFAULT_RA_ITERATIONS
}
fn default_axis() -> SnrAxis {
    SnrAxis::EsN0
}
fn default_users() -> Vec<User> {
    User::BOTH.to_vec()
}
fn unit() -> f64 {
    1.0
}
fn default_trials() -> u64 {
    100
}
fn default_min_errors() -> u64 {
    100
}

/// Parses and validates a JSON experiment description.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let object = value
        .as_object()
        .ok_or_else(|| CliError::validation("<root>", "expected a JSON object"))?;
    if !object.contains_key("scheme") {
        return Err(CliError::validation("scheme", "missing"));
    }
    let config: ExperimentConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner().to_string();
        let field = if path == "." {
            unknown_field(&inner).unwrap_or(path)
        } else {
            path
        };
        CliError::validation(field, inner)
    })?;
    config.validate()?;
    Ok(config)
}

fn unknown_field(message: &str) -> Option<String> {
    let rest = message.strip_prefix("unknown field `")?;
    Some(rest[..rest.find('`')?].to_string())
}

impl ExperimentConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |field: &str, message: String| Err(CliError::validation(field, message));
        if self.trials < 1 {
            return fail("trials", "must be at least 1".into());
        }
        if self.scheme.uses_sweep() && self.snr_sweep_db.is_empty() {
            return fail("snr_sweep_db", "must not be empty".into());
        }
        if self.snr_sweep_db.iter().any(|v| !v.is_finite()) {
            return fail("snr_sweep_db", "values must be finite".into());
        }
        if self.snr_sweep_db.windows(2).any(|w| w[1] <= w[0]) {
            return fail("snr_sweep_db", "must be strictly increasing".into());
        }
        if self.users.is_empty() {
            return fail("users", "must name at least one user".into());
        }
        if !(self.beta_a > 0.0 && self.beta_a.is_finite()) {
            return fail("beta_A", "must be positive".into());
        }
        if !(self.beta_b > 0.0 && self.beta_b.is_finite()) {
            return fail("beta_B", "must be positive".into());
        }
        if self.baseline && self.scheme.baseline().is_none() {
            return fail(
                "baseline",
                format!("scheme {} has no point-to-point baseline", self.scheme),
            );
        }
        match self.scheme {
            Scheme::ShapingGain1d => match self.half_width {
                None => return fail("L", "required by shaping-gain-1d".into()),
                Some(l) if l < 2 || l % 2 != 0 => {
                    return fail("L", format!("must be a positive even integer, got {l}"))
                }
                _ => {}
            },
            Scheme::LdlcP2p | Scheme::LdlcRdwnc => self.validate_ldlc()?,
            Scheme::BicmP2p | Scheme::BicmRdwnc => self.validate_bicm()?,
            Scheme::LatticeIdentity => {}
        }
        Ok(())
    }

    fn validate_ldlc(&self) -> Result<()> {
        let fail = |field: &str, message: &str| Err(CliError::validation(field, message));
        let seq = &self.generating_sequence;
        if seq.is_empty() || seq.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return fail("generating_sequence", "entries must be positive and finite");
        }
        if self.n < seq.len() {
            return fail(
                "n",
                "must be at least the length of the generating sequence",
            );
        }
        if self.l_a < 1 {
            return fail("L_A", "must be at least 1");
        }
        if self.l_b < 1 {
            return fail("L_B", "must be at least 1");
        }
        if self.epsilon < 0 {
            return fail("epsilon", "must be non-negative");
        }
        if self.m_width < 1 {
            return fail("m_width", "must be at least 1");
        }
        if self.bp_iterations < 1 {
            return fail("bp_iterations", "must be at least 1");
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return fail("step", "must be positive");
        }
        if !(self.span > 0.0 && self.span.is_finite()) {
            return fail("span", "must be positive");
        }
        Ok(())
    }

    fn validate_bicm(&self) -> Result<()> {
        let constellation = Constellation::by_name(&self.constellation)
            .map_err(|e| CliError::validation("constellation", e.to_string()))?;
        if self.q_a < 2 {
            return Err(CliError::validation("q_A", "must be at least 2"));
        }
        if self.q_b < 2 {
            return Err(CliError::validation("q_B", "must be at least 2"));
        }
        if self.info_bits < 1 {
            return Err(CliError::validation("info_bits", "must be at least 1"));
        }
        let coded = self.info_bits * self.q_a;
        if coded % self.q_b != 0 {
            return Err(CliError::validation("q_B", "must divide info_bits * q_A"));
        }
        if coded % constellation.bits_per_symbol() != 0 {
            return Err(CliError::validation(
                "info_bits",
                "coded length must fill whole symbols",
            ));
        }
        if self.ra_iterations < 1 {
            return Err(CliError::validation("ra_iterations", "must be at least 1"));
        }
        Ok(())
    }

    pub fn beta(&self, user: User) -> f64 {
        match user {
            User::A => self.beta_a,
            User::B => self.beta_b,
        }
    }

    /// Source bits per packet of `user`.
    pub fn info_bits_of(&self, user: User) -> usize {
        match user {
            User::A => self.info_bits,
            User::B => self.info_bits * self.q_a / self.q_b,
        }
    }

    pub fn repetition(&self, user: User) -> usize {
        match user {
            User::A => self.q_a,
            User::B => self.q_b,
        }
    }
}
