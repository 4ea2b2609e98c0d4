//! Result rows and their CSV / JSON forms.

use std::io::Write;
use std::path::Path;

use latnc_core::User;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// One (scheme, user, SNR point) measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scheme: String,
    pub user: User,
    pub snr_db: f64,
    pub rate_bits_per_use: f64,
    pub error_rate: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub trials: u64,
    pub errors: u64,
    pub wall_seconds: f64,
    /// Analytic gain carried by rows that report a closed form.
    pub gain_db: Option<f64>,
}

pub const COLUMNS: [&str; 11] = [
    "scheme",
    "user",
    "snr_db",
    "rate_bits_per_use",
    "error_rate",
    "ci95_low",
    "ci95_high",
    "trials",
    "errors",
    "wall_seconds",
    "gain_db",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn write_csv<W: Write>(rows: &[ResultRow], writer: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    out.write_record(COLUMNS)?;
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Vec<ResultRow>> {
    let mut input = csv::Reader::from_reader(reader);
    let header: Vec<String> = input.headers()?.iter().map(str::to_string).collect();
    if header != COLUMNS {
        return Err(CliError::validation(
            "header",
            format!("unexpected columns {header:?}"),
        ));
    }
    input
        .deserialize()
        .map(|r| r.map_err(CliError::from))
        .collect()
}

pub fn write_json<W: Write>(rows: &[ResultRow], mut writer: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, rows)?;
    writeln!(writer)?;
    Ok(())
}

pub fn render(rows: &[ResultRow], format: Format) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => write_csv(rows, &mut buf)?,
        Format::Json => write_json(rows, &mut buf)?,
    }
    Ok(buf)
}

/// Writes all rows to `path` in one go.
pub fn write_results(rows: &[ResultRow], path: &Path, format: Format) -> Result<()> {
    std::fs::write(path, render(rows, format)?)?;
    Ok(())
}
