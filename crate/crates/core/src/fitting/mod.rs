//! Turns a raw power trace into a validated tail model.
//!
//! The pipeline is: [`segment_groups`] splits a non-stationary recording
//! into regimes, [`decluster`] reduces the lower tail below a threshold to
//! approximately independent exceedances, the threshold itself is chosen
//! from [`scan_thresholds`] diagnostics via [`select_threshold`], and
//! [`fit_gpd_mle`] estimates the GPD parameters whose quality is then
//! inspected through [`gof_data`].

mod decluster;
mod mle;
mod threshold;

pub use decluster::{decluster, segment_groups};
pub use mle::{
    fit_gpd_mle, fit_gpd_mle_with_min_tail, gof_data, psi, GofData, GpdModel, DEFAULT_MIN_TAIL,
    PSI_TOL,
};
pub use threshold::{
    mrl_scan, scan_thresholds, select_threshold, stability_scan, threshold_grid,
    RefitDiagnostics, ThresholdEntry, ThresholdPolicy, ThresholdScan, MRL_RMS_TOLERANCE,
};
