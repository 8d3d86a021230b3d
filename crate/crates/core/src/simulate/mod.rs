//! Synthetic channels and Monte-Carlo validation.
//!
//! [`channel`] draws deterministic, seeded power traces from generator
//! families whose lower tails are known exactly; [`validate`] streams
//! fresh draws against a selected rate and reports outage counts with
//! Wilson intervals, plus a bootstrap view of how the selection would
//! scatter across alternative training sets.

pub mod channel;
pub mod validate;

pub use channel::{ChannelKind, ChannelSpec, Marginal, GEN_CHUNK};
pub use validate::{
    bootstrap_outage, count_outages, default_trials, empirical_outage, validate_plan, wilson_ci,
    BootstrapOutage, BootstrapSettings, ValidationReport, WilsonCi,
};
