//! `tailrate` — fit lower-tail power models and select ultra-reliable
//! transmission rates from the command line.
//!
//! Subcommands mirror the pipeline stages: `generate`, `ingest`,
//! `segment`, `decluster`, `scan`, `fit`, `rate`, `validate`, `sweep`,
//! `compare` (the full three-method experiment), and `emit` (plot data
//! from a finished experiment config). Informational logs go to stderr;
//! key results are printed to stdout and full artifacts are written to
//! files, so every command composes in shell pipelines.
//!
//! Exit codes:
//! - 0: success
//! - 2: configuration error (bad flags, malformed config, invalid
//!   channel spec)
//! - 3: data error (unreadable or malformed trace/model files,
//!   insufficient input data, unknown format version)
//! - 4: numeric failure (degenerate fits, unreachable quantiles,
//!   undefined rates)
//! - 5: reliability-constraint failure (`validate` only: the plan's
//!   Wilson upper bound exceeds its target)

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use tailrate_core::error::{Error, Result};
use tailrate_core::exec::Execution;
use tailrate_core::experiment::{emit_plot_data, load_config, run_experiment, ExperimentBundle};
use tailrate_core::fitting::{
    decluster, fit_gpd_mle_with_min_tail, scan_thresholds, segment_groups, select_threshold,
    threshold_grid, ThresholdPolicy, DEFAULT_MIN_TAIL,
};
use tailrate_core::io::{
    digest_file, load_model, read_trace, save_model, write_exceedances, write_manifest, write_mrl,
    write_rate_sweep, write_stability, write_trace, PlotKind, StoredModel,
};
use tailrate_core::power::PowerUnit;
use tailrate_core::rate::{
    conditional_target, fit_rayleigh, mismatch_rate, normalized_rate_sweep, rayleigh_rate,
    select_rate, RateMethod, RatePlan,
};
use tailrate_core::simulate::{default_trials, validate_plan, ChannelSpec};
use tailrate_core::trace::PowerTrace;

#[derive(Parser)]
#[command(
    name = "tailrate",
    version,
    about = "Tail-model fitting and ultra-reliable rate selection for power traces"
)]
struct Cli {
    /// Force single-threaded execution (default uses all cores when
    /// compiled with the parallel feature).
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UnitArg {
    Linear,
    Dbm,
}

impl From<UnitArg> for PowerUnit {
    fn from(unit: UnitArg) -> Self {
        match unit {
            UnitArg::Linear => PowerUnit::Linear,
            UnitArg::Dbm => PowerUnit::Dbm,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Gpd,
    #[value(name = "rayleigh_extrapolated")]
    RayleighExtrapolated,
    #[value(name = "rayleigh_mismatch")]
    RayleighMismatch,
}

impl From<MethodArg> for RateMethod {
    fn from(method: MethodArg) -> Self {
        match method {
            MethodArg::Gpd => RateMethod::Gpd,
            MethodArg::RayleighExtrapolated => RateMethod::RayleighExtrapolated,
            MethodArg::RayleighMismatch => RateMethod::RayleighMismatch,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKindArg {
    Gpd,
    Rayleigh,
}

fn parse_plot_kind(s: &str) -> std::result::Result<PlotKind, String> {
    PlotKind::from_str(s).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Draw a synthetic trace from a channel spec and write it as a
    /// linear-power trace file.
    Generate {
        /// Channel spec TOML (kind table + seed).
        #[arg(long)]
        spec: PathBuf,
        /// Number of samples to draw.
        #[arg(long)]
        count: usize,
        /// Output trace file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Read a trace file, convert to linear power, and write it back in
    /// canonical form.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        /// Unit the input values are expressed in.
        #[arg(long, value_enum, default_value_t = UnitArg::Linear)]
        unit: UnitArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Split a trace into stationary/nonstationary groups by block mean
    /// power and keep the stationary group.
    Segment {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = UnitArg::Linear)]
        unit: UnitArg,
        /// Samples per block.
        #[arg(long)]
        block_len: usize,
        /// Linear power floor a block mean must exceed to be stationary.
        #[arg(long)]
        floor: f64,
        /// Output trace file holding the kept group.
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract run-declustered exceedances u - x below a threshold.
    Decluster {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = UnitArg::Linear)]
        unit: UnitArg,
        /// Threshold u in linear power.
        #[arg(long)]
        threshold: f64,
        /// Consecutive above-threshold samples that end a cluster.
        #[arg(long, default_value_t = 1)]
        run_length: usize,
        /// Output exceedance file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Scan candidate thresholds, write diagnostics, and print the
    /// stability-selected threshold.
    Scan {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = UnitArg::Linear)]
        unit: UnitArg,
        /// Number of grid candidates between the tail fractions.
        #[arg(long, default_value_t = 20)]
        grid_count: usize,
        /// Smallest empirical tail fraction to scan.
        #[arg(long, default_value_t = 0.01)]
        lo_fraction: f64,
        /// Largest empirical tail fraction to scan.
        #[arg(long, default_value_t = 0.25)]
        hi_fraction: f64,
        /// Explicit candidate thresholds (overrides the grid flags).
        #[arg(long, value_delimiter = ',')]
        thresholds: Option<Vec<f64>>,
        /// Minimum exceedances a candidate needs to be fitted.
        #[arg(long, default_value_t = DEFAULT_MIN_TAIL)]
        min_tail: usize,
        /// Output directory for scan.toml, mrl.tsv, stability.tsv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a tail (or Rayleigh) model to a trace and save it.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = UnitArg::Linear)]
        unit: UnitArg,
        /// Model family to fit.
        #[arg(long, value_enum, default_value_t = ModelKindArg::Gpd)]
        kind: ModelKindArg,
        /// Threshold u in linear power (required for gpd).
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long, default_value_t = 1)]
        run_length: usize,
        #[arg(long, default_value_t = DEFAULT_MIN_TAIL)]
        min_tail: usize,
        /// Output model file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Select a transmission rate from a saved model for a target
    /// outage probability.
    Rate {
        /// Saved model file (gpd or rayleigh).
        #[arg(long)]
        model: PathBuf,
        /// Unconditional outage target in (0,1).
        #[arg(long)]
        eps: f64,
        /// For a rayleigh model: saved gpd model describing the true
        /// tail, turning the plan into a scored mismatch plan.
        #[arg(long)]
        mismatch_truth: Option<PathBuf>,
        /// Output plan file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte-Carlo validate a rate plan against a channel spec; exits 5
    /// if the reliability constraint fails.
    Validate {
        /// Plan file written by `rate`.
        #[arg(long)]
        plan: PathBuf,
        /// Channel spec TOML to draw test samples from.
        #[arg(long)]
        channel: PathBuf,
        /// Trials to run; defaults to 100 expected outages (100/eps).
        #[arg(long)]
        trials: Option<usize>,
        /// Seed for the validation draws.
        #[arg(long)]
        seed: u64,
        /// Output report file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep normalized rate w(n) against training-prefix size.
    Sweep {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = UnitArg::Linear)]
        unit: UnitArg,
        /// Unconditional outage target in (0,1).
        #[arg(long)]
        eps: f64,
        /// Threshold u in linear power.
        #[arg(long)]
        threshold: f64,
        /// Comma-separated training sizes, strictly increasing.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        run_length: usize,
        #[arg(long, default_value_t = DEFAULT_MIN_TAIL)]
        min_tail: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Gpd)]
        method: MethodArg,
        /// Output TSV file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full experiment with all three rate methods side by side
    /// and print a comparison table.
    Compare {
        /// Experiment config TOML; artifacts land in its out_dir.
        #[arg(long)]
        config: PathBuf,
    },
    /// Re-run an experiment config deterministically and write one kind
    /// of plot data.
    Emit {
        /// Experiment config TOML.
        #[arg(long)]
        config: PathBuf,
        /// rate_sweep, reliability, pp, qq, mrl, or stability.
        #[arg(long, value_parser = parse_plot_kind)]
        kind: PlotKind,
        /// Output directory for the plot files.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Maps a library error to the documented exit code families.
fn exit_for(err: &Error) -> u8 {
    match err.code() {
        "config" | "channel_spec" => 2,
        "parse" | "io" | "invalid_input" | "version" => 3,
        _ => 4,
    }
}

fn read_toml<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let text = fs::read_to_string(path)?;
    toml::from_str(&text)
        .map_err(|e| Error::Config(format!("invalid {what} {}: {e}", path.display())))
}

fn write_toml<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = toml::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("cannot serialize output: {e}")))?;
    fs::write(path, text)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let execution = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::auto()
    };
    match run(cli.command, execution) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_for(&err))
        }
    }
}

fn run(command: Command, execution: Execution) -> Result<ExitCode> {
    match command {
        Command::Generate { spec, count, out } => {
            let spec: ChannelSpec = read_toml(&spec, "channel spec")?;
            spec.validate()?;
            let trace = spec.generate_with(count, execution)?;
            write_trace(&out, &trace)?;
            eprintln!(
                "generated {} samples (seed {}) -> {}",
                trace.len(),
                spec.seed,
                out.display()
            );
        }
        Command::Ingest { input, unit, out } => {
            let trace = read_trace(&input, unit.into())?;
            let min = trace.samples().iter().copied().fold(f64::INFINITY, f64::min);
            let max = trace
                .samples()
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            eprintln!(
                "ingested {} samples (min {min:.6e}, max {max:.6e} linear) -> {}",
                trace.len(),
                out.display()
            );
            write_trace(&out, &trace)?;
        }
        Command::Segment {
            input,
            unit,
            block_len,
            floor,
            out,
        } => {
            let trace = read_trace(&input, unit.into())?;
            let groups = segment_groups(trace.samples(), block_len, floor)?;
            let kept: Vec<f64> = trace
                .samples()
                .iter()
                .zip(&groups)
                .filter(|(_, &g)| g == 1)
                .map(|(&x, _)| x)
                .collect();
            eprintln!(
                "kept {} of {} samples in group 1 (block_len {block_len}, floor {floor:e})",
                kept.len(),
                trace.len()
            );
            let kept = PowerTrace::new(kept)?;
            write_trace(&out, &kept)?;
        }
        Command::Decluster {
            input,
            unit,
            threshold,
            run_length,
            out,
        } => {
            let trace = read_trace(&input, unit.into())?;
            let raw = trace.samples().iter().filter(|&&x| x < threshold).count();
            let exceedances = decluster(trace.samples(), threshold, run_length)?;
            eprintln!(
                "{} below threshold, {} declustered clusters -> {}",
                raw,
                exceedances.len(),
                out.display()
            );
            write_exceedances(&out, threshold, run_length, &exceedances)?;
        }
        Command::Scan {
            input,
            unit,
            grid_count,
            lo_fraction,
            hi_fraction,
            thresholds,
            min_tail,
            out,
        } => {
            let trace = read_trace(&input, unit.into())?;
            let grid = match thresholds {
                Some(list) => list,
                None => threshold_grid(trace.samples(), grid_count, lo_fraction, hi_fraction)?,
            };
            let scan = scan_thresholds(trace.samples(), &grid, min_tail, execution)?;
            fs::create_dir_all(&out)?;
            write_toml(&out.join("scan.toml"), &scan)?;
            write_mrl(&out.join("mrl.tsv"), &scan)?;
            write_stability(&out.join("stability.tsv"), &scan)?;
            write_manifest(
                &out,
                &[
                    PathBuf::from("scan.toml"),
                    PathBuf::from("mrl.tsv"),
                    PathBuf::from("stability.tsv"),
                ],
            )?;
            let selected = select_threshold(&scan, ThresholdPolicy::Auto)?;
            eprintln!(
                "scanned {} candidates -> {}",
                grid.len(),
                out.display()
            );
            println!("selected_threshold\t{selected:.16e}");
        }
        Command::Fit {
            input,
            unit,
            kind,
            threshold,
            run_length,
            min_tail,
            out,
        } => {
            let trace = read_trace(&input, unit.into())?;
            let source_digest = digest_file(&input)?;
            match kind {
                ModelKindArg::Gpd => {
                    let threshold = threshold.ok_or_else(|| {
                        Error::Config("--threshold is required for a gpd fit".into())
                    })?;
                    let exceedances = decluster(trace.samples(), threshold, run_length)?;
                    let model = fit_gpd_mle_with_min_tail(
                        &exceedances,
                        threshold,
                        trace.len(),
                        min_tail,
                    )?;
                    save_model(&out, &StoredModel::Gpd(model), Some(&source_digest))?;
                    let p = model.params();
                    eprintln!(
                        "fitted gpd on {} exceedances -> {}",
                        model.tail_count(),
                        out.display()
                    );
                    println!(
                        "gpd\tscale\t{:.6e}\tshape\t{:.6e}\ttail\t{}/{}",
                        p.scale(),
                        p.shape(),
                        model.tail_count(),
                        model.total_count()
                    );
                }
                ModelKindArg::Rayleigh => {
                    let model = fit_rayleigh(trace.samples())?;
                    save_model(&out, &StoredModel::Rayleigh(model), Some(&source_digest))?;
                    eprintln!("fitted rayleigh -> {}", out.display());
                    println!("rayleigh\tmean_power\t{:.6e}", model.mean_power());
                }
            }
        }
        Command::Rate {
            model,
            eps,
            mismatch_truth,
            out,
        } => {
            let loaded = load_model(&model)?;
            for warning in &loaded.warnings {
                eprintln!("warning: {warning}");
            }
            let plan = match (loaded.file.model, mismatch_truth) {
                (StoredModel::Gpd(gpd), None) => {
                    let eps_cond = conditional_target(eps, gpd.tail_fraction())?;
                    let mut plan = select_rate(&gpd, eps_cond)?;
                    plan.target_eps = eps;
                    plan
                }
                (StoredModel::Gpd(_), Some(_)) => {
                    return Err(Error::Config(
                        "--mismatch-truth applies to a rayleigh model, not a gpd model".into(),
                    ));
                }
                (StoredModel::Rayleigh(ray), None) => rayleigh_rate(&ray, eps)?,
                (StoredModel::Rayleigh(ray), Some(truth_path)) => {
                    let truth = load_model(&truth_path)?;
                    for warning in &truth.warnings {
                        eprintln!("warning: {warning}");
                    }
                    let StoredModel::Gpd(gpd) = truth.file.model else {
                        return Err(Error::Config(
                            "--mismatch-truth must point at a gpd model".into(),
                        ));
                    };
                    mismatch_rate(&ray, eps, &gpd)?
                }
            };
            write_toml(&out, &plan)?;
            eprintln!(
                "selected {} rate for eps {eps:e} -> {}",
                plan.method.slug(),
                out.display()
            );
            println!("rate\t{:.16e}", plan.rate);
        }
        Command::Validate {
            plan,
            channel,
            trials,
            seed,
            out,
        } => {
            let plan: RatePlan = read_toml(&plan, "rate plan")?;
            let spec: ChannelSpec = read_toml(&channel, "channel spec")?;
            spec.validate()?;
            let trials = match trials {
                Some(t) => t,
                None => default_trials(plan.target_eps)?,
            };
            let report = validate_plan(&plan, &spec, trials, seed, execution)?;
            write_toml(&out, &report)?;
            println!(
                "outage\t{:.6e}\twilson_high\t{:.6e}\ttarget\t{:.6e}\tpass\t{}",
                report.empirical_outage, report.wilson_high, report.target_eps, report.pass
            );
            if !report.pass {
                eprintln!(
                    "reliability constraint failed: wilson upper {:.6e} > target {:.6e}",
                    report.wilson_high, report.target_eps
                );
                return Ok(ExitCode::from(5));
            }
        }
        Command::Sweep {
            input,
            unit,
            eps,
            threshold,
            grid,
            run_length,
            min_tail,
            method,
            out,
        } => {
            let trace = read_trace(&input, unit.into())?;
            let points = normalized_rate_sweep(
                &trace,
                &grid,
                eps,
                threshold,
                run_length,
                min_tail,
                method.into(),
                execution,
            )?;
            write_rate_sweep(&out, &points)?;
            eprintln!("swept {} training sizes -> {}", points.len(), out.display());
        }
        Command::Compare { config } => {
            let mut config = load_config(&config)?;
            config.methods = vec![
                RateMethod::Gpd,
                RateMethod::RayleighExtrapolated,
                RateMethod::RayleighMismatch,
            ];
            let bundle = run_experiment(&config, execution)?;
            print_comparison(&bundle);
            eprintln!(
                "experiment artifacts -> {}",
                config.out_dir.display()
            );
        }
        Command::Emit { config, kind, out } => {
            let config = load_config(&config)?;
            eprintln!("re-running experiment config for deterministic emission");
            let bundle = run_experiment(&config, execution)?;
            let written = emit_plot_data(&bundle, kind, &out)?;
            for path in &written {
                println!("{}", path.display());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn print_comparison(bundle: &ExperimentBundle) {
    println!(
        "{:<24} {:>10} {:>14} {:>12} {:>12} {:>6}",
        "method", "eps", "rate", "outage", "wilson_high", "pass"
    );
    for entry in &bundle.plans {
        let report = bundle
            .reports
            .iter()
            .find(|r| r.method == entry.method && r.eps == entry.eps);
        let (outage, wilson, pass) = match report {
            Some(r) => (
                format!("{:.3e}", r.report.empirical_outage),
                format!("{:.3e}", r.report.wilson_high),
                if r.report.pass { "yes" } else { "no" }.to_string(),
            ),
            None => ("-".into(), "-".into(), "-".into()),
        };
        println!(
            "{:<24} {:>10.1e} {:>14.6} {:>12} {:>12} {:>6}",
            entry.method.slug(),
            entry.eps,
            entry.plan.rate,
            outage,
            wilson,
            pass
        );
    }
}
