//! Synthetic channel generators for validation.
//!
//! Real ultra-reliability measurements are rarely publishable, so the
//! validation harness draws from parametric stand-ins whose tails are
//! known exactly:
//!
//! * `exponential_power` — i.i.d. exponential received power (squared
//!   Rayleigh amplitude), the classic baseline.
//! * `gpd_spliced` — exponential body above a splice point, exact GPD
//!   lower tail below it, with a prescribed tail mass. The pipeline's
//!   target law: its deep quantiles are known in closed form.
//! * `ar_correlated` — Gaussian AR(1) pushed through a target marginal by
//!   probability integral transform; exercises declustering.
//! * `two_group` — blockwise alternation between two marginals; exercises
//!   segmentation.
//!
//! Generation is deterministic given the spec's seed. Independent kinds
//! are produced in fixed-size units ([`GEN_CHUNK`] samples) whose RNGs are
//! derived from (seed, unit index), so any thread count yields the same
//! trace. AR paths are a single sequential chain when generated as a
//! trace; chunked streaming restarts the chain per unit from its
//! stationary law, which preserves the marginal (what outage counting
//! needs) at the cost of breaking dependence at unit boundaries.

use rand::distributions::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::gpd::{GpdParams, SHAPE_ZERO_EPS};
use crate::rng::unit_rng;
use crate::trace::PowerTrace;

/// Samples per independently seeded generation unit.
pub const GEN_CHUNK: usize = 1 << 16;

/// An i.i.d. marginal law for received power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum Marginal {
    /// Exponential power with the given mean.
    Exponential { mean_power: f64 },
    /// Exponential body above `splice`, GPD lower tail below it.
    ///
    /// With probability `tail_mass` a sample is `splice - y` for a GPD
    /// exceedance `y`; otherwise it is `splice` plus an exponential of
    /// mean `body_mean`. The CDF is continuous at the splice by
    /// construction. The tail shape must be negative with its support
    /// endpoint above zero power.
    GpdSpliced {
        body_mean: f64,
        splice: f64,
        tail_scale: f64,
        tail_shape: f64,
        tail_mass: f64,
    },
}

impl Marginal {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Marginal::Exponential { mean_power } => {
                if !(mean_power.is_finite() && mean_power > 0.0) {
                    return Err(Error::ChannelSpec(format!(
                        "exponential mean power must be positive, got {mean_power}"
                    )));
                }
            }
            Marginal::GpdSpliced {
                body_mean,
                splice,
                tail_scale,
                tail_shape,
                tail_mass,
            } => {
                if !(body_mean.is_finite() && body_mean > 0.0) {
                    return Err(Error::ChannelSpec(format!(
                        "body mean must be positive, got {body_mean}"
                    )));
                }
                if !(splice.is_finite() && splice > 0.0) {
                    return Err(Error::ChannelSpec(format!(
                        "splice must be positive linear power, got {splice}"
                    )));
                }
                if !(tail_mass > 0.0 && tail_mass < 1.0) {
                    return Err(Error::ChannelSpec(format!(
                        "tail mass must lie in (0, 1), got {tail_mass}"
                    )));
                }
                if !(tail_shape.is_finite() && tail_shape < -SHAPE_ZERO_EPS) {
                    return Err(Error::ChannelSpec(format!(
                        "tail shape must be negative (bounded tail), got {tail_shape}"
                    )));
                }
                let params = GpdParams::new(tail_scale, tail_shape, splice)?;
                let endpoint = splice
                    - params
                        .support_upper()
                        .expect("negative shape has bounded support");
                if endpoint <= 0.0 {
                    return Err(Error::ChannelSpec(format!(
                        "tail support crosses zero power: splice {splice} minus \
                         {:.6} leaves endpoint {endpoint}",
                        params.support_upper().unwrap()
                    )));
                }
            }
        }
        Ok(())
    }

    /// The GPD exceedance law below the splice, if this marginal has one.
    pub fn tail_params(&self) -> Option<GpdParams> {
        match *self {
            Marginal::Exponential { .. } => None,
            Marginal::GpdSpliced {
                splice,
                tail_scale,
                tail_shape,
                ..
            } => Some(GpdParams::new(tail_scale, tail_shape, splice).expect("validated spec")),
        }
    }

    /// Fraction of samples below the splice, if this marginal has one.
    pub fn tail_mass(&self) -> Option<f64> {
        match *self {
            Marginal::Exponential { .. } => None,
            Marginal::GpdSpliced { tail_mass, .. } => Some(tail_mass),
        }
    }

    /// Quantile function, `p` in (0, 1). Used directly by the probability
    /// integral transform of the AR generator.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!(
                "marginal quantile level must lie in (0,1), got {p}"
            )));
        }
        match *self {
            Marginal::Exponential { mean_power } => Ok(-mean_power * (-p).ln_1p()),
            Marginal::GpdSpliced {
                body_mean,
                splice,
                tail_mass,
                ..
            } => {
                if p <= tail_mass {
                    let tail = self.tail_params().expect("spliced marginal");
                    tail.power_quantile(p / tail_mass)
                } else {
                    Ok(splice - body_mean * ((1.0 - p) / (1.0 - tail_mass)).ln())
                }
            }
        }
    }

    /// One draw. Positive by construction (exact zeros from the RNG edge
    /// are nudged to the smallest positive value).
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Marginal::Exponential { mean_power } => {
                let u = 1.0 - rng.gen::<f64>();
                (-mean_power * u.ln()).max(f64::MIN_POSITIVE)
            }
            Marginal::GpdSpliced {
                body_mean,
                splice,
                tail_mass,
                ..
            } => {
                if rng.gen::<f64>() < tail_mass {
                    let tail = self.tail_params().expect("spliced marginal");
                    splice - tail.draw(rng)
                } else {
                    let u = 1.0 - rng.gen::<f64>();
                    splice - body_mean * u.ln()
                }
            }
        }
    }
}

/// The generator family of a synthetic channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelKind {
    /// i.i.d. exponential received power.
    ExponentialPower { mean_power: f64 },
    /// i.i.d. spliced body/tail law (see [`Marginal::GpdSpliced`]).
    GpdSpliced {
        body_mean: f64,
        splice: f64,
        tail_scale: f64,
        tail_shape: f64,
        tail_mass: f64,
    },
    /// Gaussian AR(1) with coefficient `rho` in [0, 1), transformed to the
    /// given marginal.
    ArCorrelated { rho: f64, marginal: Marginal },
    /// Alternating blocks of `block_len` samples: even blocks from
    /// `group1`, odd blocks from `group2`.
    TwoGroup {
        group1: Marginal,
        group2: Marginal,
        block_len: usize,
    },
}

/// A fully specified, seeded synthetic channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub seed: u64,
}

impl ChannelSpec {
    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            ChannelKind::ExponentialPower { mean_power } => Marginal::Exponential {
                mean_power: *mean_power,
            }
            .validate(),
            ChannelKind::GpdSpliced { .. } => self.iid_marginal().expect("iid kind").validate(),
            ChannelKind::ArCorrelated { rho, marginal } => {
                if !(*rho >= 0.0 && *rho < 1.0) {
                    return Err(Error::ChannelSpec(format!(
                        "AR coefficient must lie in [0, 1), got {rho}"
                    )));
                }
                marginal.validate()
            }
            ChannelKind::TwoGroup {
                group1,
                group2,
                block_len,
            } => {
                if *block_len == 0 {
                    return Err(Error::ChannelSpec("block_len must be positive".into()));
                }
                group1.validate()?;
                group2.validate()
            }
        }
    }

    /// The marginal law of the i.i.d. kinds; `None` for AR and two-group.
    pub fn iid_marginal(&self) -> Option<Marginal> {
        match self.kind {
            ChannelKind::ExponentialPower { mean_power } => {
                Some(Marginal::Exponential { mean_power })
            }
            ChannelKind::GpdSpliced {
                body_mean,
                splice,
                tail_scale,
                tail_shape,
                tail_mass,
            } => Some(Marginal::GpdSpliced {
                body_mean,
                splice,
                tail_scale,
                tail_shape,
                tail_mass,
            }),
            _ => None,
        }
    }

    /// The exact GPD tail law of the channel, when it has one.
    pub fn truth_tail(&self) -> Option<(GpdParams, f64)> {
        let marginal = match self.kind {
            ChannelKind::ArCorrelated { marginal, .. } => Some(marginal),
            _ => self.iid_marginal(),
        }?;
        Some((marginal.tail_params()?, marginal.tail_mass()?))
    }

    /// Generates a trace with the spec's own seed and automatic backend.
    pub fn generate(&self, count: usize) -> Result<PowerTrace> {
        self.generate_with(count, Execution::auto())
    }

    /// Generates a trace with the spec's own seed.
    ///
    /// Two-group traces carry their true group labels. AR paths are one
    /// sequential chain regardless of `execution`.
    pub fn generate_with(&self, count: usize, execution: Execution) -> Result<PowerTrace> {
        let samples = self.samples_with(self.seed, count, execution)?;
        let trace = PowerTrace::new(samples)?;
        if let ChannelKind::TwoGroup { block_len, .. } = self.kind {
            let groups = (0..count)
                .map(|i| if (i / block_len) % 2 == 0 { 1 } else { 2 })
                .collect();
            return trace.with_groups(groups);
        }
        Ok(trace)
    }

    /// Raw samples under an explicit seed (e.g. a derived test-stream
    /// seed disjoint from the training trace).
    pub fn samples_with(&self, seed: u64, count: usize, execution: Execution) -> Result<Vec<f64>> {
        self.validate()?;
        if count == 0 {
            return Err(Error::InvalidInput("cannot generate an empty trace".into()));
        }
        if let ChannelKind::ArCorrelated { rho, marginal } = self.kind {
            return ar_path(rho, &marginal, count, &mut unit_rng(seed, 0));
        }
        let units = count.div_ceil(GEN_CHUNK);
        let chunks = exec::map_units(execution, units, |j| self.chunk_samples(seed, j, count));
        let mut samples = Vec::with_capacity(count);
        for chunk in chunks {
            samples.extend(chunk?);
        }
        Ok(samples)
    }

    /// Samples of generation unit `chunk_index` within a stream of `total`.
    ///
    /// Units are independent given (seed, index), which is what lets
    /// validation stream arbitrarily many test samples without holding
    /// them. For AR kinds each unit restarts the chain from its stationary
    /// law: marginally exact, independent across unit boundaries.
    pub fn chunk_samples(&self, seed: u64, chunk_index: usize, total: usize) -> Result<Vec<f64>> {
        let start = chunk_index * GEN_CHUNK;
        if start >= total {
            return Err(Error::InvalidInput(format!(
                "chunk {chunk_index} lies beyond a stream of {total} samples"
            )));
        }
        let len = GEN_CHUNK.min(total - start);
        let mut rng = unit_rng(seed, chunk_index as u64);
        match &self.kind {
            ChannelKind::ArCorrelated { rho, marginal } => ar_path(*rho, marginal, len, &mut rng),
            ChannelKind::TwoGroup {
                group1,
                group2,
                block_len,
            } => Ok((0..len)
                .map(|i| {
                    let marginal = if ((start + i) / block_len) % 2 == 0 {
                        group1
                    } else {
                        group2
                    };
                    marginal.draw(&mut rng)
                })
                .collect()),
            _ => {
                let marginal = self.iid_marginal().expect("iid kind");
                Ok((0..len).map(|_| marginal.draw(&mut rng)).collect())
            }
        }
    }
}

/// Stationary Gaussian AR(1) pushed through `marginal` by PIT.
fn ar_path<R: Rng + ?Sized>(
    rho: f64,
    marginal: &Marginal,
    count: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let innovation = (1.0 - rho * rho).sqrt();
    let mut samples = Vec::with_capacity(count);
    let mut g: f64 = normal.sample(rng);
    for t in 0..count {
        if t > 0 {
            g = rho * g + innovation * normal.sample(rng);
        }
        // CDF values at |g| ~ 8+ round to exactly 0 or 1; keep the PIT
        // argument strictly inside (0, 1).
        let p = normal.cdf(g).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
        samples.push(marginal.quantile(p)?);
    }
    Ok(samples)
}
