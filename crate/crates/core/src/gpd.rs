//! Generalized Pareto distribution over lower-tail exceedances.
//!
//! Deep fades of a received-power trace are modeled through the exceedance
//! `y = u - x` of each sample `x` that falls below a threshold `u`. Beyond
//! a well-chosen threshold the exceedances follow the generalized Pareto
//! law
//!
//! ```text
//! F(y) = 1 - (1 + xi * y / sigma)^(-1/xi),    sigma > 0,
//! ```
//!
//! which degenerates to the exponential CDF `1 - exp(-y/sigma)` as
//! `xi -> 0`. Negative shapes give a bounded tail: the exceedance can reach
//! at most `sigma/|xi|`, i.e. the power itself is bounded below by
//! `u - sigma/|xi|`. That bounded regime is the physically interesting one
//! for received power, which cannot fade below zero.
//!
//! All quantile/CDF routines route through the exponential limit when
//! `|xi| <= SHAPE_ZERO_EPS`, so the two branches agree to well below any
//! tolerance used elsewhere in the crate.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::unit_rng;

/// Shapes with `|xi| <= SHAPE_ZERO_EPS` are treated as exactly zero and
/// evaluated through the exponential limit of each formula.
pub const SHAPE_ZERO_EPS: f64 = 1e-6;

/// Parameters of a lower-tail GPD exceedance model.
///
/// `scale` and `shape` describe the exceedance distribution; `threshold`
/// is the linear power `u` the exceedances were measured from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpdParams {
    scale: f64,
    shape: f64,
    threshold: f64,
}

impl GpdParams {
    /// Validates and builds a parameter set.
    ///
    /// `scale` must be positive and finite, `shape` finite, and `threshold`
    /// non-negative and finite (it is a linear power).
    pub fn new(scale: f64, shape: f64, threshold: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "GPD scale must be positive and finite, got {scale}"
            )));
        }
        if !shape.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "GPD shape must be finite, got {shape}"
            )));
        }
        if !(threshold.is_finite() && threshold >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "threshold must be a non-negative linear power, got {threshold}"
            )));
        }
        Ok(GpdParams {
            scale,
            shape,
            threshold,
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Whether the shape is treated as zero (exponential branch).
    pub fn is_exponential(&self) -> bool {
        self.shape.abs() <= SHAPE_ZERO_EPS
    }

    /// Largest attainable exceedance, `sigma/|xi|`, for negative shapes.
    pub fn support_upper(&self) -> Option<f64> {
        if self.shape < -SHAPE_ZERO_EPS {
            Some(-self.scale / self.shape)
        } else {
            None
        }
    }

    /// Exceedance CDF `F(y)`; `y` beyond a bounded support clamps to 1.
    pub fn cdf(&self, y: f64) -> Result<f64> {
        Ok(1.0 - self.survival(y)?)
    }

    /// Exceedance survival `1 - F(y)`, computed directly so deep-tail
    /// probabilities keep full relative precision.
    pub fn survival(&self, y: f64) -> Result<f64> {
        if !y.is_finite() || y < 0.0 {
            return Err(Error::Domain(format!(
                "exceedance must be finite and non-negative, got {y}"
            )));
        }
        if self.is_exponential() {
            return Ok((-y / self.scale).exp());
        }
        let t = 1.0 + self.shape * y / self.scale;
        if t <= 0.0 {
            // Beyond the upper endpoint of a bounded (shape < 0) tail.
            return Ok(0.0);
        }
        Ok(t.powf(-1.0 / self.shape))
    }

    /// Quantile of the exceedance law itself: the `q`-quantile of `y`.
    ///
    /// Accepts `q` in `[0, 1)`, plus `q = 1` for bounded tails where the
    /// endpoint is finite.
    pub fn exceedance_quantile(&self, q: f64) -> Result<f64> {
        if !q.is_finite() || !(0.0..=1.0).contains(&q) {
            return Err(Error::Domain(format!(
                "quantile level must lie in [0, 1], got {q}"
            )));
        }
        if q == 1.0 {
            return self.support_upper().ok_or_else(|| {
                Error::Domain("quantile level 1 is infinite for shape >= 0".into())
            });
        }
        if self.is_exponential() {
            return Ok(-self.scale * (1.0 - q).ln());
        }
        Ok(self.scale / self.shape * ((1.0 - q).powf(-self.shape) - 1.0))
    }

    /// Power below which the conditional tail probability is `p`:
    /// `u + (sigma/xi) * (1 - p^(-xi))`, the deep-fade quantile used for
    /// rate selection. `p` must lie in `(0, 1]`; `p = 1` returns the
    /// threshold itself.
    pub fn power_quantile(&self, p: f64) -> Result<f64> {
        if !p.is_finite() || p <= 0.0 || p > 1.0 {
            return Err(Error::Domain(format!(
                "tail probability must lie in (0, 1], got {p}"
            )));
        }
        if self.is_exponential() {
            return Ok(self.threshold + self.scale * p.ln());
        }
        Ok(self.threshold + self.scale / self.shape * (1.0 - p.powf(-self.shape)))
    }

    /// Conditional tail probability of the power falling below `x <= u`:
    /// the inverse of [`GpdParams::power_quantile`].
    pub fn tail_probability(&self, x: f64) -> Result<f64> {
        let y = self.threshold - x;
        if y < 0.0 {
            return Err(Error::Domain(format!(
                "power {x} lies above the threshold {}",
                self.threshold
            )));
        }
        self.survival(y)
    }

    /// Draws `count` exceedances by inverse-CDF sampling; deterministic in
    /// `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = unit_rng(seed, 0);
        self.sample_with(count, &mut rng)
    }

    /// Draws `count` exceedances from the supplied generator.
    pub fn sample_with<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<f64> {
        (0..count).map(|_| self.draw(rng)).collect()
    }

    /// One inverse-CDF draw.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // v is uniform on (0, 1] and used as a survival probability, so the
        // power branch never sees v = 0.
        let v = 1.0 - rng.gen::<f64>();
        if self.is_exponential() {
            -self.scale * v.ln()
        } else {
            self.scale / self.shape * (v.powf(-self.shape) - 1.0)
        }
    }
}

/// GPD log-likelihood of a set of exceedances:
/// `sum_i [ -ln(sigma) - (1 + 1/xi) * ln(1 + (xi/sigma) * y_i) ]`,
/// with the exponential limit `-k ln(sigma) - sum(y)/sigma` for `xi ~ 0`.
///
/// Fails if any exceedance is negative or outside the support implied by a
/// negative shape.
pub fn gpd_loglik(exceedances: &[f64], scale: f64, shape: f64) -> Result<f64> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "GPD scale must be positive and finite, got {scale}"
        )));
    }
    if !shape.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "GPD shape must be finite, got {shape}"
        )));
    }
    let k = exceedances.len() as f64;
    if shape.abs() <= SHAPE_ZERO_EPS {
        let mut total = 0.0;
        for &y in exceedances {
            if y < 0.0 || !y.is_finite() {
                return Err(Error::Domain(format!("invalid exceedance {y}")));
            }
            total += y;
        }
        return Ok(-k * scale.ln() - total / scale);
    }
    let coeff = 1.0 + 1.0 / shape;
    let mut log_terms = 0.0;
    for &y in exceedances {
        if y < 0.0 || !y.is_finite() {
            return Err(Error::Domain(format!("invalid exceedance {y}")));
        }
        let t = 1.0 + shape * y / scale;
        if t <= 0.0 {
            return Err(Error::Domain(format!(
                "exceedance {y} outside the support for scale {scale}, shape {shape}"
            )));
        }
        log_terms += t.ln();
    }
    Ok(-k * scale.ln() - coeff * log_terms)
}
