//! End-to-end experiment orchestration.
//!
//! [`run_experiment`] drives the whole pipeline from one declarative
//! config: obtain a trace (file or synthetic channel), optionally segment
//! it and keep the stationary group, scan candidate thresholds, select
//! one, decluster, fit the tail, select rates for every requested
//! (method, target) pair, validate against fresh draws when the input is
//! a generator, and sweep rate against training size. Every intermediate
//! product is written under the output directory, and a digest manifest
//! closes the run so a rerun can be checked for bit-identical output.
//!
//! Stage order: ingestion and segmentation precede the threshold scan,
//! and declustering runs *after* threshold selection — a run-declustered
//! exceedance set is only defined once `u` is fixed, so the scan
//! diagnostics use raw exceedances per candidate.
//!
//! Errors abort the run tagged with the stage that raised them (see
//! [`Error::at_stage`]); the machine-readable code of the underlying
//! failure is preserved for exit-code mapping.
//!
//! Determinism: the config seed derives one child seed per validation
//! stream and per bootstrap run, disjoint from the generator's own seed,
//! so reports never re-read training samples and reruns are bit-identical
//! regardless of thread count.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fitting::{
    decluster, fit_gpd_mle_with_min_tail, gof_data, scan_thresholds, segment_groups,
    select_threshold, threshold_grid, GpdModel, ThresholdPolicy, ThresholdScan, DEFAULT_MIN_TAIL,
};
use crate::io::{
    digest_file, save_model, write_exceedances, write_manifest, write_mrl, write_pp, write_qq,
    write_rate_sweep, write_reliability, write_stability, write_trace, PlotKind, StoredModel,
};
use crate::power::PowerUnit;
use crate::rate::{
    conditional_target, fit_rayleigh, gpd_prefix_rate, mismatch_rate, normalized_rate_sweep,
    plan_outage_under, rayleigh_rate, select_rate, RateMethod, RatePlan, RayleighModel,
    SweepPoint,
};
use crate::rng::derive_seed;
use crate::simulate::{
    bootstrap_outage, default_trials, validate_plan, BootstrapSettings, ChannelSpec,
    ValidationReport,
};
use crate::trace::PowerTrace;

/// Seed-stream offset for validation draws (disjoint from training).
const VALIDATE_STREAM: u64 = 10_000;
/// Seed-stream offset for bootstrap resampling.
const BOOTSTRAP_STREAM: u64 = 20_000;

fn default_run_length() -> usize {
    1
}

fn default_min_tail() -> usize {
    DEFAULT_MIN_TAIL
}

fn default_methods() -> Vec<RateMethod> {
    vec![
        RateMethod::Gpd,
        RateMethod::RayleighExtrapolated,
        RateMethod::RayleighMismatch,
    ]
}

fn default_grid_count() -> usize {
    20
}

fn default_lo_fraction() -> f64 {
    0.01
}

fn default_hi_fraction() -> f64 {
    0.25
}

/// Where the training trace comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum InputSource {
    /// Read a trace file (see the trace format docs).
    TraceFile { path: PathBuf, unit: PowerUnit },
    /// Draw `count` samples from a synthetic channel.
    Channel { spec: ChannelSpec, count: usize },
}

/// Stationarity segmentation settings (block mean-power grouping).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentationConfig {
    pub block_len: usize,
    /// Linear power floor a full block must stay above to count as
    /// stationary (group 1).
    pub floor: f64,
}

/// How the threshold is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum ThresholdConfig {
    /// Build a candidate grid between two empirical tail fractions and
    /// select by the stability criterion.
    Auto {
        #[serde(default = "default_grid_count")]
        grid_count: usize,
        #[serde(default = "default_lo_fraction")]
        lo_fraction: f64,
        #[serde(default = "default_hi_fraction")]
        hi_fraction: f64,
    },
    /// Scan an explicit candidate list and select by the stability
    /// criterion.
    Grid { thresholds: Vec<f64> },
    /// Fix the threshold; a diagnostic scan is still produced.
    Manual {
        threshold: f64,
        #[serde(default = "default_grid_count")]
        grid_count: usize,
        #[serde(default = "default_lo_fraction")]
        lo_fraction: f64,
        #[serde(default = "default_hi_fraction")]
        hi_fraction: f64,
    },
}

/// Bootstrap controls inside an experiment config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub training_size: usize,
    #[serde(default)]
    pub with_replacement: bool,
}

/// One declarative experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub input: InputSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segmentation: Option<SegmentationConfig>,
    /// Decluster run length (samples above `u` that end a cluster).
    #[serde(default = "default_run_length")]
    pub run_length: usize,
    pub threshold: ThresholdConfig,
    /// Unconditional outage targets.
    pub eps: Vec<f64>,
    #[serde(default = "default_methods")]
    pub methods: Vec<RateMethod>,
    /// Monte-Carlo trials per validation; default is 100/eps per target.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Training sizes for rate sweeps and reliability curves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_grid: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<BootstrapConfig>,
    #[serde(default = "default_min_tail")]
    pub min_tail: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    /// Parses and validates a TOML config.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text)
            .map_err(|e| Error::Config(format!("invalid experiment config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Schema-level checks beyond what parsing enforces.
    pub fn validate(&self) -> Result<()> {
        match &self.input {
            InputSource::TraceFile { .. } => {}
            InputSource::Channel { spec, count } => {
                spec.validate()?;
                if *count == 0 {
                    return Err(Error::Config("channel input needs count >= 1".into()));
                }
            }
        }
        if let Some(seg) = &self.segmentation {
            if seg.block_len == 0 {
                return Err(Error::Config("segmentation block_len must be >= 1".into()));
            }
            if !(seg.floor.is_finite() && seg.floor > 0.0) {
                return Err(Error::Config(format!(
                    "segmentation floor must be positive linear power, got {}",
                    seg.floor
                )));
            }
        }
        if self.run_length == 0 {
            return Err(Error::Config("run_length must be >= 1".into()));
        }
        if self.min_tail == 0 {
            return Err(Error::Config("min_tail must be >= 1".into()));
        }
        if self.eps.is_empty() {
            return Err(Error::Config("at least one eps target is required".into()));
        }
        for &eps in &self.eps {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::Config(format!("eps must lie in (0,1), got {eps}")));
            }
        }
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method is required".into()));
        }
        match &self.threshold {
            ThresholdConfig::Auto {
                grid_count,
                lo_fraction,
                hi_fraction,
            }
            | ThresholdConfig::Manual {
                grid_count,
                lo_fraction,
                hi_fraction,
                ..
            } => {
                if *grid_count < 2 {
                    return Err(Error::Config("threshold grid_count must be >= 2".into()));
                }
                if !(0.0 < *lo_fraction && lo_fraction < hi_fraction && *hi_fraction < 1.0) {
                    return Err(Error::Config(format!(
                        "threshold fractions must satisfy 0 < lo < hi < 1, \
                         got lo {lo_fraction} hi {hi_fraction}"
                    )));
                }
            }
            ThresholdConfig::Grid { thresholds } => {
                if thresholds.len() < 2 {
                    return Err(Error::Config(
                        "explicit threshold grid needs at least two candidates".into(),
                    ));
                }
            }
        }
        if let ThresholdConfig::Manual { threshold, .. } = &self.threshold {
            if !threshold.is_finite() {
                return Err(Error::Config(format!(
                    "manual threshold must be finite, got {threshold}"
                )));
            }
        }
        if let Some(grid) = &self.sweep_grid {
            if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) || grid[0] == 0 {
                return Err(Error::Config(
                    "sweep_grid must be nonempty, positive, and strictly increasing".into(),
                ));
            }
        }
        if let Some(boot) = &self.bootstrap {
            if boot.replicates == 0 || boot.training_size == 0 {
                return Err(Error::Config(
                    "bootstrap replicates and training_size must be >= 1".into(),
                ));
            }
        }
        if let Some(trials) = self.trials {
            if trials == 0 {
                return Err(Error::Config("trials must be >= 1 when set".into()));
            }
        }
        Ok(())
    }
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)?;
    ExperimentConfig::from_toml_str(&text)
}

/// One selected plan inside a bundle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub method: RateMethod,
    pub eps: f64,
    pub plan: RatePlan,
}

/// One validation outcome inside a bundle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub method: RateMethod,
    pub eps: f64,
    pub report: ValidationReport,
}

/// One rate sweep inside a bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub method: RateMethod,
    pub eps: f64,
    pub points: Vec<SweepPoint>,
}

/// Realized outage (under the full-trace fit) of the rate the GPD method
/// would select with only `n` training samples, per sweep size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityCurve {
    pub eps: f64,
    pub points: Vec<(usize, f64)>,
}

/// Everything a finished experiment produced.
#[derive(Debug, Clone)]
pub struct ExperimentBundle {
    pub config: ExperimentConfig,
    /// Samples in the working (post-segmentation) trace.
    pub working_len: usize,
    pub threshold: f64,
    /// Raw below-threshold fraction of the working trace.
    pub tail_fraction: f64,
    pub scan: ThresholdScan,
    pub gpd: GpdModel,
    pub rayleigh: Option<RayleighModel>,
    /// Declustered exceedances the tail was fitted on.
    pub exceedances: Vec<f64>,
    pub plans: Vec<PlanEntry>,
    pub reports: Vec<ReportEntry>,
    pub sweeps: Vec<SweepEntry>,
    pub reliability: Vec<ReliabilityCurve>,
    /// Artifact paths relative to the output directory, manifest excluded.
    pub artifacts: Vec<PathBuf>,
    /// Absolute path of the written manifest.
    pub manifest: PathBuf,
}

fn stage<T>(name: &'static str, result: Result<T>) -> Result<T> {
    result.map_err(|e| e.at_stage(name))
}

fn eps_label(eps: f64) -> String {
    format!("{eps:e}")
}

fn sweep_file_name(method: RateMethod, eps: f64) -> String {
    format!("rate_sweep_{}_{}.tsv", method.slug(), eps_label(eps))
}

fn reliability_file_name(eps: f64) -> String {
    format!("reliability_{}.tsv", eps_label(eps))
}

#[derive(Serialize)]
struct SegmentationDoc {
    block_len: usize,
    floor: f64,
    group1_count: usize,
    group2_count: usize,
    kept_group: u32,
}

#[derive(Serialize)]
struct SelectionDoc {
    threshold: f64,
    tail_fraction: f64,
    raw_below_count: usize,
    declustered_count: usize,
    working_len: usize,
    run_length: usize,
}

#[derive(Serialize)]
struct PlansDoc<'a> {
    plans: &'a [PlanEntry],
}

#[derive(Serialize)]
struct ReportsDoc<'a> {
    reports: &'a [ReportEntry],
}

fn write_toml<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = toml::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("cannot serialize artifact: {e}")))?;
    fs::write(path, text)?;
    Ok(())
}

/// Runs the full pipeline described by `config`, writing artifacts and a
/// digest manifest under `config.out_dir`.
///
/// Validation runs only for channel inputs (a trace file has no generator
/// to draw fresh test samples from); the test stream uses a child seed of
/// the config seed, so it never replays the training draws. For two-group
/// channels the test stream is the full alternating mixture — reports
/// then describe deployment on the mixed channel, not on the kept group.
pub fn run_experiment(config: &ExperimentConfig, execution: Execution) -> Result<ExperimentBundle> {
    config.validate()?;
    let out_dir = &config.out_dir;
    stage("setup", fs::create_dir_all(out_dir).map_err(Error::from))?;
    let mut artifacts: Vec<PathBuf> = Vec::new();

    // Canonical config echo.
    let config_rel = PathBuf::from("config.toml");
    stage("setup", write_toml(&out_dir.join(&config_rel), config))?;
    artifacts.push(config_rel);

    // Ingest or generate the training trace.
    let trace = match &config.input {
        InputSource::TraceFile { path, unit } => {
            stage("ingest", crate::io::read_trace(path, *unit))?
        }
        InputSource::Channel { spec, count } => {
            stage("generate", spec.generate_with(*count, execution))?
        }
    };
    let trace_rel = PathBuf::from("trace.tsv");
    stage("ingest", write_trace(&out_dir.join(&trace_rel), &trace))?;
    let trace_digest = stage("ingest", digest_file(&out_dir.join(&trace_rel)))?;
    artifacts.push(trace_rel);

    // Segmentation: keep the stationary group when configured.
    let working: Vec<f64> = if let Some(seg) = &config.segmentation {
        let groups = stage(
            "segment",
            segment_groups(trace.samples(), seg.block_len, seg.floor),
        )?;
        let kept: Vec<f64> = trace
            .samples()
            .iter()
            .zip(&groups)
            .filter(|(_, &g)| g == 1)
            .map(|(&x, _)| x)
            .collect();
        let doc = SegmentationDoc {
            block_len: seg.block_len,
            floor: seg.floor,
            group1_count: kept.len(),
            group2_count: trace.len() - kept.len(),
            kept_group: 1,
        };
        let rel = PathBuf::from("segmentation.toml");
        stage("segment", write_toml(&out_dir.join(&rel), &doc))?;
        artifacts.push(rel);
        if kept.is_empty() {
            return Err(Error::Degenerate(
                "segmentation left no stationary samples".into(),
            )
            .at_stage("segment"));
        }
        kept
    } else {
        trace.samples().to_vec()
    };
    let working_len = working.len();

    // Threshold scan and selection (raw exceedances per candidate).
    let (grid, policy) = match &config.threshold {
        ThresholdConfig::Auto {
            grid_count,
            lo_fraction,
            hi_fraction,
        } => (
            stage(
                "scan",
                threshold_grid(&working, *grid_count, *lo_fraction, *hi_fraction),
            )?,
            ThresholdPolicy::Auto,
        ),
        ThresholdConfig::Grid { thresholds } => (thresholds.clone(), ThresholdPolicy::Auto),
        ThresholdConfig::Manual {
            threshold,
            grid_count,
            lo_fraction,
            hi_fraction,
        } => (
            stage(
                "scan",
                threshold_grid(&working, *grid_count, *lo_fraction, *hi_fraction),
            )?,
            ThresholdPolicy::Manual {
                threshold: *threshold,
            },
        ),
    };
    let scan = stage(
        "scan",
        scan_thresholds(&working, &grid, config.min_tail, execution),
    )?;
    let scan_rel = PathBuf::from("scan.toml");
    stage("scan", write_toml(&out_dir.join(&scan_rel), &scan))?;
    artifacts.push(scan_rel);
    for (rel, write) in [
        ("mrl.tsv", write_mrl as fn(&Path, &ThresholdScan) -> Result<()>),
        ("stability.tsv", write_stability),
    ] {
        stage("scan", write(&out_dir.join(rel), &scan))?;
        artifacts.push(PathBuf::from(rel));
    }
    let threshold = stage("threshold", select_threshold(&scan, policy))?;

    // Decluster at the chosen threshold and fit.
    let exceedances = stage(
        "decluster",
        decluster(&working, threshold, config.run_length),
    )?;
    let raw_below = working.iter().filter(|&&x| x < threshold).count();
    let tail_fraction = raw_below as f64 / working_len as f64;
    let selection = SelectionDoc {
        threshold,
        tail_fraction,
        raw_below_count: raw_below,
        declustered_count: exceedances.len(),
        working_len,
        run_length: config.run_length,
    };
    let sel_rel = PathBuf::from("selection.toml");
    stage("decluster", write_toml(&out_dir.join(&sel_rel), &selection))?;
    artifacts.push(sel_rel);
    let exc_rel = PathBuf::from("exceedances.tsv");
    stage(
        "decluster",
        write_exceedances(
            &out_dir.join(&exc_rel),
            threshold,
            config.run_length,
            &exceedances,
        ),
    )?;
    artifacts.push(exc_rel);

    let gpd = stage(
        "fit",
        fit_gpd_mle_with_min_tail(&exceedances, threshold, working_len, config.min_tail),
    )?;
    let gpd_rel = PathBuf::from("model_gpd.toml");
    stage(
        "fit",
        save_model(
            &out_dir.join(&gpd_rel),
            &StoredModel::Gpd(gpd),
            Some(&trace_digest),
        )
        .map(|_| ()),
    )?;
    artifacts.push(gpd_rel);

    let gof = stage("fit", gof_data(&gpd, &exceedances))?;
    stage("fit", write_pp(&out_dir.join("pp.tsv"), &gof))?;
    artifacts.push(PathBuf::from("pp.tsv"));
    stage("fit", write_qq(&out_dir.join("qq.tsv"), &gof))?;
    artifacts.push(PathBuf::from("qq.tsv"));

    let needs_rayleigh = config
        .methods
        .iter()
        .any(|m| *m != RateMethod::Gpd);
    let rayleigh = if needs_rayleigh {
        let model = stage("fit", fit_rayleigh(&working))?;
        let rel = PathBuf::from("model_rayleigh.toml");
        stage(
            "fit",
            save_model(
                &out_dir.join(&rel),
                &StoredModel::Rayleigh(model),
                Some(&trace_digest),
            )
            .map(|_| ()),
        )?;
        artifacts.push(rel);
        Some(model)
    } else {
        None
    };

    // Rate selection for every (eps, method) pair.
    let mut plans = Vec::new();
    for &eps in &config.eps {
        for &method in &config.methods {
            let plan = match method {
                RateMethod::Gpd => {
                    let eps_cond = stage("rate", conditional_target(eps, tail_fraction))?;
                    let mut plan = stage("rate", select_rate(&gpd, eps_cond))?;
                    plan.target_eps = eps;
                    plan
                }
                RateMethod::RayleighExtrapolated => {
                    let model = rayleigh.as_ref().expect("fitted above");
                    stage("rate", rayleigh_rate(model, eps))?
                }
                RateMethod::RayleighMismatch => {
                    let model = rayleigh.as_ref().expect("fitted above");
                    stage("rate", mismatch_rate(model, eps, &gpd))?
                }
            };
            plans.push(PlanEntry { method, eps, plan });
        }
    }
    let plans_rel = PathBuf::from("plans.toml");
    stage(
        "rate",
        write_toml(&out_dir.join(&plans_rel), &PlansDoc { plans: &plans }),
    )?;
    artifacts.push(plans_rel);

    // Monte-Carlo validation (channel inputs only) plus bootstrap for the
    // GPD method when configured.
    let mut reports = Vec::new();
    if let InputSource::Channel { spec, .. } = &config.input {
        for (i, entry) in plans.iter().enumerate() {
            let trials = match config.trials {
                Some(t) => t,
                None => stage("validate", default_trials(entry.eps))?,
            };
            let test_seed = derive_seed(config.seed, VALIDATE_STREAM + i as u64);
            let mut report = stage(
                "validate",
                validate_plan(&entry.plan, spec, trials, test_seed, execution),
            )?;
            if entry.method == RateMethod::Gpd {
                if let Some(boot) = &config.bootstrap {
                    let settings = BootstrapSettings {
                        replicates: boot.replicates,
                        training_size: boot.training_size,
                        min_tail: config.min_tail,
                        with_replacement: boot.with_replacement,
                        seed: derive_seed(config.seed, BOOTSTRAP_STREAM + i as u64),
                    };
                    let outage = stage(
                        "bootstrap",
                        bootstrap_outage(&working, threshold, entry.eps, &settings, execution),
                    )?;
                    report.bootstrap_outage = Some(outage);
                }
            }
            reports.push(ReportEntry {
                method: entry.method,
                eps: entry.eps,
                report,
            });
        }
        let reports_rel = PathBuf::from("reports.toml");
        stage(
            "validate",
            write_toml(
                &out_dir.join(&reports_rel),
                &ReportsDoc { reports: &reports },
            ),
        )?;
        artifacts.push(reports_rel);
    }

    // Rate sweeps and reliability curves over the training-size grid.
    let mut sweeps = Vec::new();
    let mut reliability = Vec::new();
    if let Some(grid) = &config.sweep_grid {
        if *grid.last().expect("validated nonempty") > working_len {
            return Err(Error::Config(format!(
                "sweep_grid reaches {} but the working trace has {working_len} samples",
                grid.last().unwrap()
            ))
            .at_stage("sweep"));
        }
        let working_trace = stage("sweep", PowerTrace::new(working.clone()))?;
        for &eps in &config.eps {
            for &method in &config.methods {
                let points = stage(
                    "sweep",
                    normalized_rate_sweep(
                        &working_trace,
                        grid,
                        eps,
                        threshold,
                        config.run_length,
                        config.min_tail,
                        method,
                        execution,
                    ),
                )?;
                let rel = PathBuf::from(sweep_file_name(method, eps));
                stage("sweep", write_rate_sweep(&out_dir.join(&rel), &points))?;
                artifacts.push(rel);
                sweeps.push(SweepEntry { method, eps, points });
            }
            // Reliability: realized outage (under the full fit) of the
            // rate the GPD method would pick with n training samples.
            let mut points = Vec::new();
            for &n in grid {
                let Ok(plan) = gpd_prefix_rate(
                    &working,
                    n,
                    eps,
                    threshold,
                    config.run_length,
                    config.min_tail,
                ) else {
                    continue;
                };
                if let Some(outage) = plan_outage_under(&plan, &gpd.params(), tail_fraction) {
                    points.push((n, outage));
                }
            }
            let rel = PathBuf::from(reliability_file_name(eps));
            stage("sweep", write_reliability(&out_dir.join(&rel), &points))?;
            artifacts.push(rel);
            reliability.push(ReliabilityCurve { eps, points });
        }
    }

    let manifest = stage("manifest", write_manifest(out_dir, &artifacts))?;

    Ok(ExperimentBundle {
        config: config.clone(),
        working_len,
        threshold,
        tail_fraction,
        scan,
        gpd,
        rayleigh,
        exceedances,
        plans,
        reports,
        sweeps,
        reliability,
        artifacts,
        manifest,
    })
}

/// Writes the plot files of one kind from a finished bundle into `dir`,
/// returning the paths written.
pub fn emit_plot_data(
    bundle: &ExperimentBundle,
    kind: PlotKind,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    match kind {
        PlotKind::RateSweep => {
            if bundle.sweeps.is_empty() {
                return Err(Error::InvalidInput(
                    "bundle holds no rate sweeps; set sweep_grid in the config".into(),
                ));
            }
            for s in &bundle.sweeps {
                let path = dir.join(sweep_file_name(s.method, s.eps));
                write_rate_sweep(&path, &s.points)?;
                written.push(path);
            }
        }
        PlotKind::Reliability => {
            if bundle.reliability.is_empty() {
                return Err(Error::InvalidInput(
                    "bundle holds no reliability curves; set sweep_grid in the config".into(),
                ));
            }
            for c in &bundle.reliability {
                let path = dir.join(reliability_file_name(c.eps));
                write_reliability(&path, &c.points)?;
                written.push(path);
            }
        }
        PlotKind::Pp | PlotKind::Qq => {
            let gof = gof_data(&bundle.gpd, &bundle.exceedances)?;
            let path = dir.join(format!("{}.tsv", kind.slug()));
            if kind == PlotKind::Pp {
                write_pp(&path, &gof)?;
            } else {
                write_qq(&path, &gof)?;
            }
            written.push(path);
        }
        PlotKind::Mrl => {
            let path = dir.join("mrl.tsv");
            write_mrl(&path, &bundle.scan)?;
            written.push(path);
        }
        PlotKind::Stability => {
            let path = dir.join("stability.tsv");
            write_stability(&path, &bundle.scan)?;
            written.push(path);
        }
    }
    Ok(written)
}
