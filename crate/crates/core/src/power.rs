//! Received-power units.
//!
//! All analysis runs on linear power (milliwatts under the dBm convention);
//! dBm values are converted at the system boundary via
//! `linear = 10^(dbm / 10)`. The conversion pair is exact to floating-point
//! round-off, so ingest -> emit round trips are lossless.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit tag for a power value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerUnit {
    /// Linear power (milliwatts under the dBm convention).
    Linear,
    /// Decibels relative to one milliwatt.
    Dbm,
}

/// Converts a dBm value to linear power.
pub fn dbm_to_linear(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Converts a linear power to dBm. Requires `linear > 0`.
pub fn linear_to_dbm(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// dBm conversion against a configurable reference offset in dB
/// (`offset = 0` reproduces the plain milliwatt convention).
pub fn dbm_to_linear_offset(dbm: f64, offset_db: f64) -> f64 {
    10f64.powf((dbm - offset_db) / 10.0)
}

/// Inverse of [`dbm_to_linear_offset`].
pub fn linear_to_dbm_offset(linear: f64, offset_db: f64) -> f64 {
    10.0 * linear.log10() + offset_db
}

/// A power value tagged with its unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerValue {
    value: f64,
    unit: PowerUnit,
}

impl PowerValue {
    /// Builds a tagged power value; linear values must be positive and
    /// every value must be finite.
    pub fn new(value: f64, unit: PowerUnit) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "power value must be finite, got {value}"
            )));
        }
        if unit == PowerUnit::Linear && value <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "linear power must be positive, got {value}"
            )));
        }
        Ok(PowerValue { value, unit })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn unit(&self) -> PowerUnit {
        self.unit
    }

    /// Converts to the requested unit (identity if already there).
    pub fn to_unit(&self, unit: PowerUnit) -> PowerValue {
        let value = match (self.unit, unit) {
            (PowerUnit::Linear, PowerUnit::Dbm) => linear_to_dbm(self.value),
            (PowerUnit::Dbm, PowerUnit::Linear) => dbm_to_linear(self.value),
            _ => self.value,
        };
        PowerValue { value, unit }
    }

    /// The value expressed as linear power.
    pub fn linear(&self) -> f64 {
        self.to_unit(PowerUnit::Linear).value
    }
}
