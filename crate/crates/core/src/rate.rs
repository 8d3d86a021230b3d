//! Rate selection against a reliability target, with baselines.
//!
//! Given a tail model of received power and a packet-error target, the
//! maximum rate that still meets the target is set by the deep quantile of
//! the power law,
//!
//! ```text
//! R = log2(1 + x(eps_n)),   x(p) = u + (scale/shape) * (1 - p^(-shape)),
//! ```
//!
//! where `x(p)` is the power below which a fraction `p` of the *tail law*
//! falls. Because the GPD models the conditional law below the threshold
//! `u`, an unconditional outage target `eps` must first be divided by the
//! tail mass `P(X < u)` (see [`conditional_target`]).
//!
//! Two distinct laws meet in validation: the estimated parameters that
//! picked the rate and the true parameters that generate outages. Both
//! directions of that mismatch are available: [`predicted_outage`] maps a
//! quantile level through the estimate and back through the truth, and
//! [`epsilon_n`] is its exact inverse — the level to feed the estimate so
//! the realized outage equals the target.
//!
//! The baselines reproduce the classic failure mode: [`rayleigh_rate`]
//! extrapolates an exponential (Rayleigh-power) body fit into the extreme
//! tail, and [`mismatch_rate`] tags the same rate for validation against a
//! GPD truth.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::fitting::{decluster, fit_gpd_mle_with_min_tail, GpdModel};
use crate::gpd::GpdParams;
use crate::stats::mean;
use crate::trace::PowerTrace;

/// Which law produced a rate plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateMethod {
    /// GPD tail fit of the trace itself.
    Gpd,
    /// Exponential power law fitted on bulk data, extrapolated into the
    /// tail.
    RayleighExtrapolated,
    /// Same rate as the extrapolated baseline, but validated against the
    /// GPD truth (the transmitter believes the wrong channel law).
    RayleighMismatch,
}

impl RateMethod {
    /// Stable lowercase tag used in artifact file names.
    pub fn slug(&self) -> &'static str {
        match self {
            RateMethod::Gpd => "gpd",
            RateMethod::RayleighExtrapolated => "rayleigh_extrapolated",
            RateMethod::RayleighMismatch => "rayleigh_mismatch",
        }
    }
}

/// The model behind a rate plan, kept for validation and reporting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PlanModel {
    /// GPD tail parameters plus the tail mass `P(X < u)` they apply to.
    Gpd { params: GpdParams, tail_mass: f64 },
    /// Exponential received power with the given mean.
    Rayleigh { mean_power: f64 },
    /// Rayleigh belief at the transmitter; the true tail law rides along
    /// so validation can score the mismatch.
    Mismatch {
        mean_power: f64,
        truth: GpdParams,
        truth_tail_mass: f64,
    },
}

/// A selected transmission rate with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePlan {
    /// bits/s/Hz.
    pub rate: f64,
    /// Unconditional outage target the plan is meant to satisfy.
    pub target_eps: f64,
    /// Quantile level actually fed to the model (conditional tail level
    /// for GPD plans, `target_eps` itself for Rayleigh plans).
    pub adjusted_eps: f64,
    pub method: RateMethod,
    pub model: PlanModel,
}

impl RatePlan {
    /// The SNR quantile the rate was cut at: `2^rate - 1`.
    pub fn snr_quantile(&self) -> f64 {
        self.rate.exp2() - 1.0
    }
}

/// Exponential-power (squared Rayleigh amplitude) model of received power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayleighModel {
    mean_power: f64,
}

impl RayleighModel {
    pub fn new(mean_power: f64) -> Result<Self> {
        if !(mean_power.is_finite() && mean_power > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mean power must be positive and finite, got {mean_power}"
            )));
        }
        Ok(RayleighModel { mean_power })
    }

    pub fn mean_power(&self) -> f64 {
        self.mean_power
    }
}

/// Exceedance `y` at which the tail law's survival equals `s`.
fn quantile_at_survival(params: &GpdParams, survival: f64) -> f64 {
    if params.is_exponential() {
        -params.scale() * survival.ln()
    } else {
        params.scale() / params.shape() * (survival.powf(-params.shape()) - 1.0)
    }
}

/// Survival probability at exceedance `y`, erroring (instead of clamping
/// to 0) when `y` lies beyond the law's support: in rate mapping that
/// means the requested quantile is unreachable under these parameters.
fn survival_strict(params: &GpdParams, y: f64) -> Result<f64> {
    if params.is_exponential() {
        return Ok((-y / params.scale()).exp());
    }
    let base = 1.0 + params.shape() * y / params.scale();
    if base <= 0.0 {
        return Err(Error::QuantileUnreachable(format!(
            "exceedance {y} lies beyond the support of scale {} shape {}",
            params.scale(),
            params.shape()
        )));
    }
    Ok(base.powf(-1.0 / params.shape()))
}

fn check_probability(value: f64, name: &str, allow_one: bool) -> Result<()> {
    let ok = value > 0.0 && (value < 1.0 || (allow_one && value == 1.0));
    if !ok {
        return Err(Error::Domain(format!(
            "{name} must lie in (0, 1{}], got {value}",
            if allow_one { "" } else { ")" }
        )));
    }
    Ok(())
}

/// Quantile level to feed the estimated tail law so that the outage
/// realized under the true law equals `eps`.
///
/// Writing `Q` for the exceedance quantile of the truth and `S` for the
/// survival of the estimate, this is `S(Q(eps))`; [`predicted_outage`] is
/// the same composition with the roles swapped, so the two are exact
/// inverses. With `est == truth` the composition collapses to `eps`.
pub fn epsilon_n(eps: f64, est: &GpdParams, truth: &GpdParams) -> Result<f64> {
    check_probability(eps, "target level", true)?;
    survival_strict(est, quantile_at_survival(truth, eps))
}

/// Outage realized under the true law when the rate is cut at the
/// estimated law's `eps_n` quantile (single-realization plug-in value;
/// the expectation over training draws is `bootstrap_outage` in the
/// simulate module).
pub fn predicted_outage(est: &GpdParams, truth: &GpdParams, eps_n: f64) -> Result<f64> {
    check_probability(eps_n, "quantile level", true)?;
    survival_strict(truth, quantile_at_survival(est, eps_n))
}

/// Converts an unconditional outage target into the conditional tail
/// level `eps / tail_mass` that quantile operations expect.
pub fn conditional_target(eps: f64, tail_mass: f64) -> Result<f64> {
    check_probability(eps, "outage target", false)?;
    check_probability(tail_mass, "tail mass", true)?;
    let conditional = eps / tail_mass;
    if conditional > 1.0 {
        return Err(Error::QuantileUnreachable(format!(
            "target {eps} exceeds the modeled tail mass {tail_mass}; \
             the threshold is too deep to express it"
        )));
    }
    Ok(conditional)
}

/// Maximum rate whose tail-law outage at level `eps_n` is tolerated.
///
/// `rate = log2(1 + x(eps_n))` for the power quantile `x`; the plan's
/// `target_eps` is initialized to `eps_n` and overwritten by pipeline
/// callers that applied a conditional conversion first.
pub fn select_rate(model: &GpdModel, eps_n: f64) -> Result<RatePlan> {
    let quantile = model.params().power_quantile(eps_n)?;
    let argument = 1.0 + quantile;
    if argument <= 0.0 {
        return Err(Error::RateUndefined(format!(
            "power quantile {quantile} at level {eps_n} leaves no positive SNR argument"
        )));
    }
    Ok(RatePlan {
        rate: argument.log2(),
        target_eps: eps_n,
        adjusted_eps: eps_n,
        method: RateMethod::Gpd,
        model: PlanModel::Gpd {
            params: model.params(),
            tail_mass: model.tail_fraction(),
        },
    })
}

/// Fits the exponential power law implied by a Rayleigh amplitude: the
/// mean of the samples is the MLE of its mean power.
pub fn fit_rayleigh(samples: &[f64]) -> Result<RayleighModel> {
    if samples.len() < 2 {
        return Err(Error::InvalidInput(
            "Rayleigh fit needs at least 2 samples".into(),
        ));
    }
    for &x in samples {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::InvalidInput(format!(
                "nonpositive power sample {x} in Rayleigh fit"
            )));
        }
    }
    RayleighModel::new(mean(samples))
}

/// Rate at the `eps`-quantile of exponential received power,
/// `log2(1 + mean * ln(1/(1-eps)))`. This is an unconditional quantile:
/// no threshold or tail conversion applies.
pub fn rayleigh_rate(model: &RayleighModel, eps: f64) -> Result<RatePlan> {
    check_probability(eps, "outage target", false)?;
    let quantile = -model.mean_power() * (-eps).ln_1p();
    Ok(RatePlan {
        rate: (1.0 + quantile).log2(),
        target_eps: eps,
        adjusted_eps: eps,
        method: RateMethod::RayleighExtrapolated,
        model: PlanModel::Rayleigh {
            mean_power: model.mean_power(),
        },
    })
}

/// The extrapolated-Rayleigh rate retagged for mismatch validation: the
/// transmitter believes the Rayleigh law, while the carried GPD truth is
/// what validation draws outages from.
pub fn mismatch_rate(
    model: &RayleighModel,
    eps: f64,
    truth: &GpdModel,
) -> Result<RatePlan> {
    let mut plan = rayleigh_rate(model, eps)?;
    plan.method = RateMethod::RayleighMismatch;
    plan.model = PlanModel::Mismatch {
        mean_power: model.mean_power(),
        truth: truth.params(),
        truth_tail_mass: truth.tail_fraction(),
    };
    Ok(plan)
}

/// Unconditional outage of `plan` under a fitted tail truth, or `None`
/// when the plan's SNR quantile is at or above the truth's threshold
/// (outside the modeled tail, where the GPD says nothing).
pub fn plan_outage_under(plan: &RatePlan, truth: &GpdParams, truth_tail_mass: f64) -> Option<f64> {
    let quantile = plan.snr_quantile();
    let conditional = truth.tail_probability(quantile).ok()?;
    Some(truth_tail_mass * conditional)
}

/// One training size of a normalized-rate sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// Training size (prefix of the trace).
    pub n: usize,
    /// Selected rate, `None` when the fit or the quantile failed at this
    /// size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    /// Rate normalized by the full-trace GPD rate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
}

/// Rate versus training size, normalized by the full-trace GPD rate.
///
/// For each `n` the first `n` samples are treated as the available
/// training data: the GPD method declusters below `threshold` and refits;
/// the Rayleigh methods refit the mean. The normalizer is always the GPD
/// rate of the whole trace — the best throughput the data supports — so
/// `w = 1` exactly at `n = len` for the GPD method, while a mismatched
/// method shows its bias as `w` bounded away from 1. Failed sizes yield
/// `rate = None` and the sweep continues.
#[allow(clippy::too_many_arguments)]
pub fn normalized_rate_sweep(
    trace: &PowerTrace,
    n_grid: &[usize],
    eps: f64,
    threshold: f64,
    run_length: usize,
    min_tail: usize,
    method: RateMethod,
    execution: Execution,
) -> Result<Vec<SweepPoint>> {
    check_probability(eps, "outage target", false)?;
    if n_grid.is_empty() {
        return Err(Error::InvalidInput("empty training-size grid".into()));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "training sizes must be strictly increasing".into(),
        ));
    }
    if *n_grid.last().unwrap() > trace.len() {
        return Err(Error::InvalidInput(format!(
            "largest training size {} exceeds the trace length {}",
            n_grid.last().unwrap(),
            trace.len()
        )));
    }
    let samples = trace.samples();
    let full_rate =
        gpd_prefix_rate(samples, samples.len(), eps, threshold, run_length, min_tail)?.rate;

    let points = exec::map_units(execution, n_grid.len(), |j| {
        let n = n_grid[j];
        let rate = match method {
            RateMethod::Gpd => {
                gpd_prefix_rate(samples, n, eps, threshold, run_length, min_tail)
                    .ok()
                    .map(|plan| plan.rate)
            }
            RateMethod::RayleighExtrapolated | RateMethod::RayleighMismatch => {
                fit_rayleigh(&samples[..n])
                    .and_then(|m| rayleigh_rate(&m, eps))
                    .ok()
                    .map(|plan| plan.rate)
            }
        };
        SweepPoint {
            n,
            rate,
            w: rate.map(|r| r / full_rate),
        }
    });
    Ok(points)
}

/// GPD plan from the first `n` samples: raw tail mass for the target
/// conversion, declustered exceedances for the fit.
pub fn gpd_prefix_rate(
    samples: &[f64],
    n: usize,
    eps: f64,
    threshold: f64,
    run_length: usize,
    min_tail: usize,
) -> Result<RatePlan> {
    if n == 0 || n > samples.len() {
        return Err(Error::InvalidInput(format!(
            "training size {n} out of range for {} samples",
            samples.len()
        )));
    }
    let prefix = &samples[..n];
    // Tail mass is the raw fraction below u. Declustering merges adjacent
    // deficits into clusters, so the cluster count underestimates
    // P(X < u) and would miscalibrate the conditional target.
    let below = prefix.iter().filter(|&&x| x < threshold).count();
    let tail_mass = below as f64 / n as f64;
    if tail_mass == 0.0 {
        return Err(Error::InvalidInput(format!(
            "no samples below threshold {threshold} in the first {n}"
        )));
    }
    let exceedances = decluster(prefix, threshold, run_length)?;
    let model = fit_gpd_mle_with_min_tail(&exceedances, threshold, n, min_tail)?;
    let eps_cond = conditional_target(eps, tail_mass)?;
    let mut plan = select_rate(&model, eps_cond)?;
    plan.target_eps = eps;
    plan.model = PlanModel::Gpd {
        params: model.params(),
        tail_mass,
    };
    Ok(plan)
}
