//! Maximum-likelihood GPD fitting via the score-ratio root equation.
//!
//! Reparameterize the GPD by `theta = shape / scale`. At a stationary point
//! of the likelihood the two score equations collapse into a single scalar
//! equation in `theta`,
//!
//! ```text
//! psi(theta) = [ (1/k) sum 1/(1 + theta y_i) ]
//!            * [ (1/k) sum ln(1 + theta y_i) + 1 ] - 1 = 0,
//! ```
//!
//! after which the parameters are recovered as
//! `shape = (1/k) sum ln(1 + theta y_i)` and `scale = shape / theta`.
//! `theta = 0` is always a root (it carries no information); the useful
//! candidates are the nonzero roots on `(-1/max(y), 0)` and `(0, inf)`,
//! plus the exponential model `shape = 0, scale = mean(y)` as the limit
//! candidate. `psi` may cross zero several times, so every root is turned
//! into a candidate and the one with the highest log-likelihood wins.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gpd::{gpd_loglik, GpdParams};
use crate::solve::bracketed_root;
use crate::stats::mean;

/// Fits reject tails with fewer than this many exceedances by default.
pub const DEFAULT_MIN_TAIL: usize = 50;

/// Roots of `psi` are polished until `|psi| <= PSI_TOL`.
pub const PSI_TOL: f64 = 1e-10;

/// Grid points per search interval when bracketing sign changes of `psi`.
const GRID_POINTS: usize = 200;

/// A fitted GPD tail model.
///
/// Besides the parameters it records how much data backed the fit
/// (`tail_count` exceedances out of `total_count` samples), the achieved
/// log-likelihood, and the root `theta = shape / scale` the optimizer
/// settled on (`0` when the exponential candidate won).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpdModel {
    params: GpdParams,
    tail_count: usize,
    total_count: usize,
    loglik: f64,
    theta: f64,
}

impl GpdModel {
    /// Reassembles a model from stored fields (used by persistence).
    pub fn from_parts(
        params: GpdParams,
        tail_count: usize,
        total_count: usize,
        loglik: f64,
        theta: f64,
    ) -> Result<Self> {
        if tail_count == 0 || total_count < tail_count {
            return Err(Error::InvalidParameter(format!(
                "tail_count {tail_count} must be positive and at most total_count {total_count}"
            )));
        }
        Ok(GpdModel {
            params,
            tail_count,
            total_count,
            loglik,
            theta,
        })
    }

    pub fn params(&self) -> GpdParams {
        self.params
    }

    /// Number of exceedances the fit used.
    pub fn tail_count(&self) -> usize {
        self.tail_count
    }

    /// Number of samples the exceedances were extracted from.
    pub fn total_count(&self) -> usize {
        self.total_count
    }

    pub fn loglik(&self) -> f64 {
        self.loglik
    }

    /// The fitted root of `psi` (`shape / scale`; `0` for the exponential
    /// solution).
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Whether the exponential (`shape = 0`) candidate won.
    pub fn is_exponential(&self) -> bool {
        self.theta == 0.0
    }

    /// Empirical fraction of samples in the modeled tail, `k / n`.
    pub fn tail_fraction(&self) -> f64 {
        self.tail_count as f64 / self.total_count as f64
    }
}

/// The scalar root function `psi` described in the module docs.
///
/// `psi(0) = 0` holds identically; nonzero roots are MLE candidates.
pub fn psi(theta: f64, exceedances: &[f64]) -> Result<f64> {
    if exceedances.is_empty() {
        return Err(Error::InvalidInput("psi needs at least one exceedance".into()));
    }
    if !theta.is_finite() {
        return Err(Error::Domain(format!("theta must be finite, got {theta}")));
    }
    let k = exceedances.len() as f64;
    let mut inv_sum = 0.0;
    let mut log_sum = 0.0;
    for &y in exceedances {
        if y < 0.0 || !y.is_finite() {
            return Err(Error::InvalidInput(format!("invalid exceedance {y}")));
        }
        let t = 1.0 + theta * y;
        if t <= 0.0 {
            return Err(Error::Domain(format!(
                "theta {theta} leaves 1 + theta*y non-positive at y = {y}"
            )));
        }
        inv_sum += 1.0 / t;
        log_sum += t.ln();
    }
    Ok(inv_sum / k * (log_sum / k + 1.0) - 1.0)
}

/// Fits a GPD to lower-tail exceedances with the default tail minimum.
///
/// `exceedances` are the declustered values `y = u - x`; `threshold` is the
/// linear power `u` they were measured from; `total_count` is the number of
/// samples the tail was extracted from (kept so the model knows its
/// empirical tail fraction).
pub fn fit_gpd_mle(exceedances: &[f64], threshold: f64, total_count: usize) -> Result<GpdModel> {
    fit_gpd_mle_with_min_tail(exceedances, threshold, total_count, DEFAULT_MIN_TAIL)
}

/// [`fit_gpd_mle`] with an explicit minimum tail size.
pub fn fit_gpd_mle_with_min_tail(
    exceedances: &[f64],
    threshold: f64,
    total_count: usize,
    min_tail: usize,
) -> Result<GpdModel> {
    let k = exceedances.len();
    if k < min_tail.max(1) {
        return Err(Error::InvalidInput(format!(
            "tail has {k} exceedances; at least {} required",
            min_tail.max(1)
        )));
    }
    if total_count < k {
        return Err(Error::InvalidInput(format!(
            "total_count {total_count} is smaller than the tail size {k}"
        )));
    }
    let mut y_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    for &y in exceedances {
        if y < 0.0 || !y.is_finite() {
            return Err(Error::InvalidInput(format!("invalid exceedance {y}")));
        }
        y_max = y_max.max(y);
        y_min = y_min.min(y);
    }
    if y_max == y_min {
        return Err(Error::Degenerate(
            "all exceedances are identical; the likelihood has no finite maximizer".into(),
        ));
    }
    let y_bar = mean(exceedances);

    // Exponential candidate: shape = 0, scale = mean. Its log-likelihood
    // has the closed form -k (ln(mean) + 1).
    let mut best_theta = 0.0;
    let mut best_scale = y_bar;
    let mut best_shape = 0.0;
    let mut best_loglik = -(k as f64) * (y_bar.ln() + 1.0);

    for theta in nonzero_psi_roots(exceedances, y_max, y_bar) {
        let shape = mean_log1p_theta(theta, exceedances);
        let scale = shape / theta;
        if !(scale.is_finite() && scale > 0.0) {
            continue;
        }
        let Ok(loglik) = gpd_loglik(exceedances, scale, shape) else {
            continue;
        };
        if loglik > best_loglik {
            best_theta = theta;
            best_scale = scale;
            best_shape = shape;
            best_loglik = loglik;
        }
    }

    Ok(GpdModel {
        params: GpdParams::new(best_scale, best_shape, threshold)?,
        tail_count: k,
        total_count,
        loglik: best_loglik,
        theta: best_theta,
    })
}

fn mean_log1p_theta(theta: f64, exceedances: &[f64]) -> f64 {
    exceedances.iter().map(|&y| (1.0 + theta * y).ln()).sum::<f64>()
        / exceedances.len() as f64
}

/// Brackets and polishes every nonzero root of `psi`.
///
/// The negative interval is `(-1/y_max, 0)`; its interesting structure sits
/// at both ends (roots near the boundary for strongly bounded tails, near
/// zero for weak shapes), so the 200-point grid spends half its points
/// log-spaced from each end. The positive interval `(0, 20 k / mean(y))`
/// comfortably covers heavy-tail roots and is plainly log-spaced.
fn nonzero_psi_roots(exceedances: &[f64], y_max: f64, y_bar: f64) -> Vec<f64> {
    let eval = |theta: f64| psi(theta, exceedances);
    let mut grid: Vec<f64> = Vec::with_capacity(2 * GRID_POINTS);

    // Negative side, parameterized by t = |theta| * y_max in (0, 1).
    let half = GRID_POINTS / 2;
    let t_lo = 1e-8_f64;
    for i in 0..half {
        let frac = i as f64 / (half - 1) as f64;
        grid.push(-(t_lo * (0.5 / t_lo).powf(frac)) / y_max);
    }
    let gap_lo = 1e-9_f64;
    for i in 0..half {
        let frac = i as f64 / (half - 1) as f64;
        // 1 - t log-spaced from 0.5 down to 1e-9.
        grid.push(-(1.0 - 0.5 * (gap_lo / 0.5).powf(frac)) / y_max);
    }
    // Positive side.
    let pos_lo = 1e-8 / y_bar;
    let pos_hi = 20.0 * exceedances.len() as f64 / y_bar;
    for i in 0..GRID_POINTS {
        let frac = i as f64 / (GRID_POINTS - 1) as f64;
        grid.push(pos_lo * (pos_hi / pos_lo).powf(frac));
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &theta in &grid {
        let Ok(value) = eval(theta) else {
            prev = None;
            continue;
        };
        if let Some((theta_prev, value_prev)) = prev {
            // Skip the grid cell that straddles theta = 0: psi(0) = 0 always
            // and contributes no candidate.
            let straddles_zero = theta_prev < 0.0 && theta > 0.0;
            if !straddles_zero && value_prev.is_sign_positive() != value.is_sign_positive() {
                if let Some(root) = bracketed_root(
                    |t| psi(t, exceedances).unwrap_or(f64::NAN),
                    theta_prev,
                    theta,
                    value_prev,
                    value,
                    PSI_TOL,
                    200,
                ) {
                    if root != 0.0 {
                        roots.push(root);
                    }
                }
            } else if value.abs() <= PSI_TOL && theta != 0.0 {
                roots.push(theta);
            }
        }
        prev = Some((theta, value));
    }
    roots
}

/// Probability-probability and quantile-quantile diagnostics for a fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofData {
    /// `(i/(k+1), F(y_(i)))` pairs: model probability against plotting
    /// position for each order statistic.
    pub pp: Vec<(f64, f64)>,
    /// `(F^-1(i/(k+1)), y_(i))` pairs: model quantile against observed
    /// order statistic.
    pub qq: Vec<(f64, f64)>,
}

/// Computes PP/QQ diagnostics of `exceedances` under a fitted model.
///
/// Plotting positions `i/(k+1)` stay strictly inside `(0, 1)`, so every
/// ordinate is finite even for bounded tails evaluated at the sample
/// maximum.
pub fn gof_data(model: &GpdModel, exceedances: &[f64]) -> Result<GofData> {
    if exceedances.is_empty() {
        return Err(Error::InvalidInput("no exceedances for diagnostics".into()));
    }
    let mut sorted = exceedances.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("NaN exceedance"));
    let k = sorted.len();
    let params = model.params();
    let mut pp = Vec::with_capacity(k);
    let mut qq = Vec::with_capacity(k);
    for (i, &y) in sorted.iter().enumerate() {
        let position = (i + 1) as f64 / (k + 1) as f64;
        pp.push((position, params.cdf(y)?));
        qq.push((params.exceedance_quantile(position)?, y));
    }
    Ok(GofData { pp, qq })
}
