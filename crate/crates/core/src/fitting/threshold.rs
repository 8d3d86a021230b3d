//! Threshold diagnostics and selection for lower-tail peaks-over-threshold.
//!
//! Choosing the threshold `u` trades bias (too shallow: the GPD limit does
//! not hold yet) against variance (too deep: few exceedances). Two classic
//! diagnostics guide the choice:
//!
//! * **Mean residual life**: `E[u - X | X < u]` is linear in `u` wherever
//!   a GPD describes the tail, with slope `-shape / (1 - shape)`.
//! * **Parameter stability**: refitting at deeper thresholds must leave the
//!   shape unchanged (within confidence bands) and the combination
//!   `scale + shape * u` invariant.
//!
//! [`scan_thresholds`] computes both diagnostics over a candidate grid;
//! [`select_threshold`] either applies an automatic policy built from the
//! two criteria or passes a manual choice through.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::fitting::mle::fit_gpd_mle_with_min_tail;
use crate::gpd::gpd_loglik;
use crate::stats::{linear_fit, mean, quantile_sorted};

/// Automatic selection accepts the MRL curve as linear when the RMS
/// residual of its least-squares line stays below this fraction of the
/// mean-excess range.
pub const MRL_RMS_TOLERANCE: f64 = 0.05;

/// Normal quantile for the 95% confidence bands in the stability scan.
const Z95: f64 = 1.96;

/// Refit results at one candidate threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefitDiagnostics {
    /// Fitted GPD scale at this threshold.
    pub scale: f64,
    /// Fitted GPD shape at this threshold.
    pub shape: f64,
    /// `scale + shape * threshold`: constant across thresholds when the
    /// tail is genuinely GPD, which makes fits comparable between rows.
    pub adjusted_scale: f64,
    /// Half-width of the 95% confidence interval on the shape, from the
    /// inverse observed information; `None` when the Hessian estimate is
    /// not positive definite or the likelihood cannot be perturbed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape_ci_halfwidth: Option<f64>,
}

/// One row of a threshold scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEntry {
    /// Candidate threshold (linear power).
    pub threshold: f64,
    /// Number of samples strictly below the threshold.
    pub tail_count: usize,
    /// Mean of `threshold - x` over those samples; `None` with fewer than
    /// two of them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_excess: Option<f64>,
    /// Refit diagnostics; `None` when the row was scanned without fitting,
    /// the tail is smaller than the minimum, or the MLE failed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<RefitDiagnostics>,
}

/// Diagnostics over a strictly increasing grid of candidate thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdScan {
    pub entries: Vec<ThresholdEntry>,
}

impl ThresholdScan {
    /// Number of rows carrying a successful refit.
    pub fn valid_fit_count(&self) -> usize {
        self.entries.iter().filter(|e| e.fit.is_some()).count()
    }
}

/// How [`select_threshold`] picks the working threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum ThresholdPolicy {
    /// Shallowest threshold that is shape-stable against, and MRL-linear
    /// across, every deeper candidate.
    Auto,
    /// Use the given threshold verbatim.
    Manual { threshold: f64 },
}

/// Scans candidate thresholds, filling only the mean-excess column.
pub fn mrl_scan(samples: &[f64], thresholds: &[f64]) -> Result<ThresholdScan> {
    scan_impl(samples, thresholds, None, Execution::Sequential)
}

/// Scans candidate thresholds, refitting the GPD at each.
///
/// Rows whose tail holds fewer than `min_tail` samples, or where the MLE
/// fails (degenerate data), keep `fit = None` and the scan continues.
pub fn stability_scan(
    samples: &[f64],
    thresholds: &[f64],
    min_tail: usize,
    execution: Execution,
) -> Result<ThresholdScan> {
    scan_impl(samples, thresholds, Some(min_tail), execution)
}

/// Full scan: mean residual life plus refit diagnostics per threshold.
///
/// Rows are independent, so they are distributed across threads according
/// to `execution`; the result is identical either way.
pub fn scan_thresholds(
    samples: &[f64],
    thresholds: &[f64],
    min_tail: usize,
    execution: Execution,
) -> Result<ThresholdScan> {
    scan_impl(samples, thresholds, Some(min_tail), execution)
}

fn scan_impl(
    samples: &[f64],
    thresholds: &[f64],
    fit_min_tail: Option<usize>,
    execution: Execution,
) -> Result<ThresholdScan> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("cannot scan an empty sample".into()));
    }
    if thresholds.is_empty() {
        return Err(Error::InvalidInput("no candidate thresholds".into()));
    }
    let mut grid = thresholds.to_vec();
    for &u in &grid {
        if !u.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "candidate threshold {u} is not finite"
            )));
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if grid.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParameter(
            "candidate thresholds must be distinct".into(),
        ));
    }

    let entries = exec::map_units(execution, grid.len(), |j| {
        let u = grid[j];
        let exceedances: Vec<f64> = samples
            .iter()
            .filter(|&&x| x < u)
            .map(|&x| u - x)
            .collect();
        let tail_count = exceedances.len();
        let mean_excess = (tail_count >= 2).then(|| mean(&exceedances));
        let fit = fit_min_tail.and_then(|min_tail| {
            fit_gpd_mle_with_min_tail(&exceedances, u, samples.len(), min_tail)
                .ok()
                .map(|model| {
                    let scale = model.params().scale();
                    let shape = model.params().shape();
                    RefitDiagnostics {
                        scale,
                        shape,
                        adjusted_scale: scale + shape * u,
                        shape_ci_halfwidth: shape_ci_halfwidth(&exceedances, scale, shape),
                    }
                })
        });
        ThresholdEntry {
            threshold: u,
            tail_count,
            mean_excess,
            fit,
        }
    });
    Ok(ThresholdScan { entries })
}

/// 95% CI half-width on the shape via the inverse observed information.
///
/// The Hessian of the log-likelihood at `(scale, shape)` is approximated
/// by central finite differences with step `1e-4 * max(|v|, 1)` per
/// coordinate; the shape variance is the `(shape, shape)` element of the
/// inverse of its negation.
fn shape_ci_halfwidth(exceedances: &[f64], scale: f64, shape: f64) -> Option<f64> {
    let hs = 1e-4 * scale.abs().max(1.0);
    let hx = 1e-4 * shape.abs().max(1.0);
    let ll = |s: f64, x: f64| gpd_loglik(exceedances, s, x).ok();
    let center = ll(scale, shape)?;
    let d2s = (ll(scale + hs, shape)? - 2.0 * center + ll(scale - hs, shape)?) / (hs * hs);
    let d2x = (ll(scale, shape + hx)? - 2.0 * center + ll(scale, shape - hx)?) / (hx * hx);
    let dsx = (ll(scale + hs, shape + hx)? - ll(scale + hs, shape - hx)?
        - ll(scale - hs, shape + hx)?
        + ll(scale - hs, shape - hx)?)
        / (4.0 * hs * hx);
    let (i_ss, i_xx, i_sx) = (-d2s, -d2x, -dsx);
    let det = i_ss * i_xx - i_sx * i_sx;
    if !(det > 0.0 && i_ss > 0.0) {
        return None;
    }
    let var_shape = i_ss / det;
    (var_shape.is_finite() && var_shape > 0.0).then(|| Z95 * var_shape.sqrt())
}

/// Builds a candidate grid at evenly spaced empirical quantile levels.
///
/// Levels run from `lo_fraction` to `hi_fraction` of the sample (fractions
/// of data below the threshold); coincident quantiles collapse, so the
/// result may be shorter than `count` on discrete data.
pub fn threshold_grid(
    samples: &[f64],
    count: usize,
    lo_fraction: f64,
    hi_fraction: f64,
) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::InvalidParameter(
            "threshold grid needs at least 2 points".into(),
        ));
    }
    if !(0.0 < lo_fraction && lo_fraction < hi_fraction && hi_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "fractions must satisfy 0 < lo < hi < 1, got {lo_fraction} and {hi_fraction}"
        )));
    }
    if samples.len() < 2 {
        return Err(Error::InvalidInput("threshold grid needs at least 2 samples".into()));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite sample in threshold grid input".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut grid: Vec<f64> = (0..count)
        .map(|i| {
            let f = lo_fraction
                + (hi_fraction - lo_fraction) * i as f64 / (count - 1) as f64;
            quantile_sorted(&sorted, f)
        })
        .collect();
    grid.dedup();
    Ok(grid)
}

/// Picks the working threshold from a scan according to `policy`.
///
/// The automatic policy walks candidates from shallowest (largest `u`,
/// most data) to deepest and accepts the first whose fit is compatible
/// with every deeper fit — each deeper shape estimate differs from the
/// candidate's by at most that deeper row's own CI half-width (rows
/// without a half-width are uninformative and skipped) — and whose
/// mean-excess points at and below it are linear within
/// [`MRL_RMS_TOLERANCE`]. A candidate needs at least three valid fits at
/// or below it, so the scan grid should extend well past the depth of
/// interest. The manual policy returns its threshold verbatim.
pub fn select_threshold(scan: &ThresholdScan, policy: ThresholdPolicy) -> Result<f64> {
    match policy {
        ThresholdPolicy::Manual { threshold } => {
            if !threshold.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "manual threshold {threshold} is not finite"
                )));
            }
            Ok(threshold)
        }
        ThresholdPolicy::Auto => auto_select(scan),
    }
}

fn auto_select(scan: &ThresholdScan) -> Result<f64> {
    let entries = &scan.entries;
    let valid: Vec<usize> = entries
        .iter()
        .enumerate()
        .filter(|(_, e)| e.fit.is_some())
        .map(|(i, _)| i)
        .collect();
    if valid.len() < 3 {
        return Err(Error::ThresholdSelection(format!(
            "{} of {} candidate thresholds produced a valid fit; at least 3 \
             are required — widen the scan or select a threshold manually",
            valid.len(),
            entries.len()
        )));
    }
    for (pos, &j) in valid.iter().enumerate().rev() {
        if pos < 2 {
            break;
        }
        let candidate = &entries[j];
        let cand_shape = candidate.fit.expect("filtered on fit").shape;
        let stable = valid[..pos].iter().all(|&i| {
            let fit = entries[i].fit.expect("filtered on fit");
            match fit.shape_ci_halfwidth {
                Some(halfwidth) => (fit.shape - cand_shape).abs() <= halfwidth,
                None => true,
            }
        });
        if !stable {
            continue;
        }
        let points: Vec<(f64, f64)> = entries[..=j]
            .iter()
            .filter_map(|e| e.mean_excess.map(|m| (e.threshold, m)))
            .collect();
        if points.len() >= 3 && mrl_is_linear(&points) {
            return Ok(candidate.threshold);
        }
    }
    Err(Error::ThresholdSelection(
        "no candidate threshold passed the shape-stability and MRL-linearity \
         checks; select a threshold manually"
            .into(),
    ))
}

fn mrl_is_linear(points: &[(f64, f64)]) -> bool {
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let Some((slope, intercept)) = linear_fit(&xs, &ys) else {
        return false;
    };
    let rms = (points
        .iter()
        .map(|&(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum::<f64>()
        / points.len() as f64)
        .sqrt();
    let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    rms <= MRL_RMS_TOLERANCE * (hi - lo)
}
