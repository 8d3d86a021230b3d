//! Plain-text power trace files.
//!
//! One power value per row, optionally followed by a timestamp in
//! seconds; fields separated by whitespace or commas; `#` starts a
//! comment line and blank lines are skipped. Values are written with 17
//! significant digits, which reproduces every f64 exactly, so
//! `read(write(trace))` equals the original bitwise. Timestamps are
//! validated but not retained: every downstream operation is
//! order-based, and sample period, when relevant, is declared explicitly.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::power::{dbm_to_linear, PowerUnit};
use crate::trace::PowerTrace;

/// Reads a trace file, converting to linear power per `unit`.
pub fn read_trace(path: &Path, unit: PowerUnit) -> Result<PowerTrace> {
    let text = fs::read_to_string(path)?;
    parse_trace(&text, unit)
}

/// Parses trace text (see module docs for the format).
pub fn parse_trace(text: &str, unit: PowerUnit) -> Result<PowerTrace> {
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty());
        let first = fields.next().expect("non-blank line has a field");
        let value: f64 = first.parse().map_err(|_| Error::Parse {
            line,
            message: format!("expected a power value, got {first:?}"),
        })?;
        if let Some(stamp) = fields.next() {
            let _: f64 = stamp.parse().map_err(|_| Error::Parse {
                line,
                message: format!("expected a timestamp in seconds, got {stamp:?}"),
            })?;
        }
        if let Some(extra) = fields.next() {
            return Err(Error::Parse {
                line,
                message: format!("unexpected third field {extra:?}"),
            });
        }
        let linear = match unit {
            PowerUnit::Linear => value,
            PowerUnit::Dbm => dbm_to_linear(value),
        };
        if !(linear.is_finite() && linear > 0.0) {
            return Err(Error::Parse {
                line,
                message: format!("power must be positive and finite in linear units, got {value}"),
            });
        }
        values.push(linear);
    }
    PowerTrace::new(values)
}

/// Writes a trace as linear power, one sample per row, losslessly.
pub fn write_trace(path: &Path, trace: &PowerTrace) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    writeln!(out, "# linear power, one sample per row ({})", trace.len())?;
    for &x in trace.samples() {
        writeln!(out, "{x:.16e}")?;
    }
    out.flush()?;
    Ok(())
}

/// Writes declustered exceedances `y = u - x`, one per row, with the
/// threshold and run length recorded in the header comment.
pub fn write_exceedances(
    path: &Path,
    threshold: f64,
    run_length: usize,
    exceedances: &[f64],
) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    writeln!(
        out,
        "# declustered exceedances u - x (threshold {threshold:.16e}, run length {run_length})"
    )?;
    for y in exceedances {
        writeln!(out, "{y:.16e}")?;
    }
    out.flush()?;
    Ok(())
}
