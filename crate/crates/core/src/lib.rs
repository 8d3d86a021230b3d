//! Lower-tail extreme-value modeling of received-power traces and
//! outage-constrained rate selection.
//!
//! The crate covers the full workflow for picking a transmission rate that
//! meets an ultra-reliability target from a finite power trace:
//!
//! 1. **Tail modeling** ([`gpd`]) — generalized Pareto distribution over
//!    exceedances `y = u - x` of samples below a threshold `u`.
//! 2. **Fitting** ([`fitting`]) — stationary-group segmentation, run
//!    declustering, mean-residual-life and parameter-stability threshold
//!    diagnostics, and a root-based maximum-likelihood fit.
//! 3. **Rate selection** ([`rate`]) — maps a packet-error-rate target to a
//!    transmission rate through the fitted tail quantile, with
//!    extrapolated-Rayleigh and channel-mismatch baselines.
//! 4. **Validation** ([`simulate`]) — synthetic channels, Monte Carlo
//!    outage estimation with Wilson intervals, and bootstrap outage means.
//! 5. **Orchestration** ([`experiment`], [`io`]) — reproducible end-to-end
//!    runs that write every intermediate artifact plus a digest manifest.
//!
//! Everything randomized takes an explicit seed and derives per-work-unit
//! child seeds, so results are bit-identical across thread counts and
//! reruns. The `parallel` feature (default) backs the heavy loops with
//! rayon; disabling it leaves a sequential fallback with identical output.

pub mod error;
pub mod exec;
pub mod experiment;
pub mod fitting;
pub mod gpd;
pub mod io;
pub mod power;
pub mod rate;
pub mod rng;
pub mod simulate;
pub mod solve;
pub mod stats;
pub mod trace;

pub use error::{Error, Result};
pub use exec::Execution;
pub use experiment::{emit_plot_data, load_config, run_experiment, ExperimentBundle, ExperimentConfig};
pub use fitting::{fit_gpd_mle, GpdModel, ThresholdPolicy, DEFAULT_MIN_TAIL};
pub use gpd::{gpd_loglik, GpdParams, SHAPE_ZERO_EPS};
pub use power::{dbm_to_linear, linear_to_dbm, PowerUnit, PowerValue};
pub use rate::{epsilon_n, predicted_outage, select_rate, RateMethod, RatePlan, RayleighModel};
pub use simulate::{validate_plan, ChannelKind, ChannelSpec, Marginal, ValidationReport};
pub use trace::PowerTrace;
