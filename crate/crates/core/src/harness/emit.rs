use std::fmt::Write as _;
use std::io;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::ser::Formatter;

use super::ExperimentReport;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "experiment,n,m,statistic,value,mc_band,seed";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Fixed 17-significant-digit scientific notation; locale independent.
fn fixed_digits(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_csv(report: &ExperimentReport) -> Result<String> {
    if report.rows.is_empty() {
        return Err(Error::NoRows);
    }
    let mut out = String::with_capacity(64 * (report.rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            row.experiment,
            row.n,
            row.m,
            row.statistic,
            fixed_digits(row.value),
            fixed_digits(row.mc_band),
            row.seed
        )
        .expect("writing to a String cannot fail");
    }
    Ok(out)
}

/// JSON number formatting with the same 17 significant digits as the CSV.
struct FixedDigitsFormatter;

impl Formatter for FixedDigitsFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fixed_digits(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json(report: &ExperimentReport) -> Result<String> {
    if report.rows.is_empty() {
        return Err(Error::NoRows);
    }
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigitsFormatter);
    report.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn from_json(text: &str) -> Result<ExperimentReport> {
    Ok(serde_json::from_str(text)?)
}

/// Writes the report to `path` in the requested format.
pub fn emit(report: &ExperimentReport, format: OutputFormat, path: &Path) -> Result<()> {
    let text = match format {
        OutputFormat::Csv => to_csv(report)?,
        OutputFormat::Json => to_json(report)?,
    };
    std::fs::write(path, text)?;
    Ok(())
}

/// Non-finite values are written as `null` and read back as NaN.
pub(super) mod float_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(*value)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}
