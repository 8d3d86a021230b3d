//! Acceptance suite: eight end-to-end criteria, one test each, printing
//! one summary line per criterion (run with `--nocapture` to see them).
//!
//! 1. MLE recovery against a brute-force likelihood grid.
//! 2. The root function psi vanishes at zero and at returned roots.
//! 3. The epsilon_n / predicted_outage conversions are exact inverses.
//! 4. The full pipeline never violates its reliability targets.
//! 5. Normalized rate converges, later for deeper thresholds.
//! 6. A Rayleigh-mismatch transmitter badly misses both rate and outage.
//! 7. Hand-traced declustering/segmentation; declustering decorrelates.
//! 8. Reruns of an experiment are bit-identical.
//!
//! Every test is deterministic: stochastic assertions were calibrated
//! once against their Monte Carlo error and frozen with fixed seeds.

use std::time::{Duration, Instant};

use rand::Rng;

use tailrate_core::exec::Execution;
use tailrate_core::experiment::{
    run_experiment, BootstrapConfig, ExperimentConfig, InputSource, ThresholdConfig,
};
use tailrate_core::fitting::{decluster, fit_gpd_mle, psi, segment_groups, DEFAULT_MIN_TAIL};
use tailrate_core::gpd::{gpd_loglik, GpdParams};
use tailrate_core::rate::{
    fit_rayleigh, mismatch_rate, normalized_rate_sweep, RateMethod, SweepPoint,
};
use tailrate_core::rng::unit_rng;
use tailrate_core::simulate::{validate_plan, ChannelKind, ChannelSpec, Marginal};
use tailrate_core::{epsilon_n, predicted_outage};

/// The synthetic channel the Fig. 3/4-style criteria run on: exponential
/// body spliced to a bounded GPD tail below u = 2.0 holding 5% mass.
fn spliced_kind() -> ChannelKind {
    ChannelKind::GpdSpliced {
        body_mean: 4.0,
        splice: 2.0,
        tail_scale: 0.5,
        tail_shape: -0.3,
        tail_mass: 0.05,
    }
}

fn spliced_spec(seed: u64) -> ChannelSpec {
    ChannelSpec {
        kind: spliced_kind(),
        seed,
    }
}

#[test]
fn c1_mle_recovers_parameters_and_beats_a_grid_oracle() {
    let start = Instant::now();
    let truth = GpdParams::new(1.0, -0.3, 1.0).unwrap();
    let ys = truth.sample(10_000, 42);
    let model = fit_gpd_mle(&ys, 1.0, 10_000).unwrap();
    let fitted = model.params();
    assert!(
        (fitted.scale() - 1.0).abs() <= 0.05,
        "scale off: {}",
        fitted.scale()
    );
    assert!(
        (fitted.shape() + 0.3).abs() <= 0.05,
        "shape off: {}",
        fitted.shape()
    );

    // Brute-force oracle: best log-likelihood on a (scale, shape) grid of
    // step 0.01 bracketing the truth.
    let mut best = f64::NEG_INFINITY;
    for i in 0..=100u32 {
        let scale = 0.5 + f64::from(i) * 0.01;
        for j in 0..=70u32 {
            let shape = -0.6 + f64::from(j) * 0.01;
            if let Ok(ll) = gpd_loglik(&ys, scale, shape) {
                best = best.max(ll);
            }
        }
    }
    assert!(
        model.loglik() >= best - 1e-6,
        "MLE loglik {} below grid best {}",
        model.loglik(),
        best
    );
    let elapsed = start.elapsed();
    assert!(elapsed <= Duration::from_secs(5), "took {elapsed:?}");
    println!(
        "C1 PASS: scale {:.4}, shape {:.4}, loglik {:.3} >= grid {:.3}, {:?}",
        fitted.scale(),
        fitted.shape(),
        model.loglik(),
        best,
        elapsed
    );
}

#[test]
fn c2_psi_vanishes_at_zero_and_at_returned_roots() {
    let mut rng = unit_rng(2, 0);
    let mut nonzero_roots = 0usize;
    for i in 0..100u64 {
        let scale = rng.gen_range(0.1..3.0);
        let shape = if rng.gen_bool(0.5) {
            rng.gen_range(-0.8..-0.05)
        } else {
            rng.gen_range(0.05..0.8)
        };
        let params = GpdParams::new(scale, shape, 1.0).unwrap();
        let k = rng.gen_range(100..1500);
        let ys = params.sample(k, 1000 + i);

        let at_zero = psi(0.0, &ys).unwrap();
        assert_eq!(at_zero, 0.0, "psi(0) != 0 on set {i}");

        let model = fit_gpd_mle(&ys, 1.0, k * 20).unwrap();
        if model.theta() != 0.0 {
            nonzero_roots += 1;
            let residual = psi(model.theta(), &ys).unwrap().abs();
            assert!(
                residual <= 1e-10,
                "psi at root {} is {residual} on set {i}",
                model.theta()
            );
        }
    }
    assert!(
        nonzero_roots >= 50,
        "only {nonzero_roots} nonzero roots; the root check is near-vacuous"
    );
    println!("C2 PASS: psi(0) = 0 on 100 sets; {nonzero_roots} roots within 1e-10");
}

#[test]
fn c3_conversion_identities_hold_at_urllc_targets() {
    let mut rng = unit_rng(3, 0);
    let targets = [1e-3, 1e-4, 1e-5];
    let mut round_trips = 0usize;
    for _ in 0..1000 {
        let sample_params = |rng: &mut rand_chacha::ChaCha8Rng| {
            let scale = rng.gen_range(0.05..5.0);
            let shape = match rng.gen_range(0..3) {
                0 => rng.gen_range(-0.95..-0.01),
                1 => rng.gen_range(0.01..0.95),
                _ => 0.0,
            };
            let threshold = rng.gen_range(0.1..50.0);
            GpdParams::new(scale, shape, threshold).unwrap()
        };
        let params = sample_params(&mut rng);
        let other = sample_params(&mut rng);
        for &eps in &targets {
            let forward = epsilon_n(eps, &params, &params).unwrap();
            assert!(
                (forward - eps).abs() <= 1e-9 && (forward - eps).abs() <= 1e-9 * eps,
                "epsilon_n({eps}, p, p) = {forward} for {params:?}"
            );
            let backward = predicted_outage(&params, &params, eps).unwrap();
            assert!(
                (backward - eps).abs() <= 1e-9 && (backward - eps).abs() <= 1e-9 * eps,
                "predicted_outage(p, p, {eps}) = {backward} for {params:?}"
            );
            // Round trip through a distinct estimate when defined.
            if let Ok(eps_n) = epsilon_n(eps, &other, &params) {
                if eps_n > 0.0 {
                    let back = predicted_outage(&other, &params, eps_n).unwrap();
                    assert!(
                        (back - eps).abs() <= 1e-9,
                        "round trip {eps} -> {eps_n} -> {back}"
                    );
                    round_trips += 1;
                }
            }
        }
    }
    println!(
        "C3 PASS: identities within 1e-9 on 1000 pairs x {:?}; {round_trips} cross round trips",
        targets
    );
}

#[test]
fn c4_pipeline_reliability_is_never_violated() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig {
        input: InputSource::Channel {
            spec: spliced_spec(41),
            count: 1_000_000,
        },
        segmentation: None,
        run_length: 1,
        threshold: ThresholdConfig::Auto {
            grid_count: 20,
            lo_fraction: 0.01,
            hi_fraction: 0.25,
        },
        eps: vec![1e-3, 1e-4],
        methods: vec![RateMethod::Gpd],
        trials: Some(10_000_000),
        sweep_grid: None,
        bootstrap: None,
        min_tail: DEFAULT_MIN_TAIL,
        seed: 4004,
        out_dir: dir.path().to_path_buf(),
    };
    let bundle = run_experiment(&config, Execution::auto()).unwrap();
    assert_eq!(bundle.reports.len(), 2);
    let mut summary = String::new();
    for entry in &bundle.reports {
        let r = &entry.report;
        assert!(
            r.wilson_high <= 1.2 * entry.eps,
            "eps {}: wilson upper {} exceeds {}",
            entry.eps,
            r.wilson_high,
            1.2 * entry.eps
        );
        summary.push_str(&format!(
            " eps {:.0e}: outage {:.3e}, upper {:.3e} <= {:.3e};",
            entry.eps,
            r.empirical_outage,
            r.wilson_high,
            1.2 * entry.eps
        ));
    }
    let elapsed = start.elapsed();
    assert!(elapsed <= Duration::from_secs(120), "took {elapsed:?}");
    println!(
        "C4 PASS: u {:.4},{summary} {elapsed:?}",
        bundle.threshold
    );
}

/// The 10^-5 variant needs 10^8 fresh draws; run with `--ignored`.
#[test]
#[ignore = "10^8-trial deep-target variant; slow"]
fn c4_slow_deep_target_at_1e8_trials() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig {
        input: InputSource::Channel {
            spec: spliced_spec(41),
            count: 1_000_000,
        },
        segmentation: None,
        run_length: 1,
        threshold: ThresholdConfig::Auto {
            grid_count: 20,
            lo_fraction: 0.01,
            hi_fraction: 0.25,
        },
        eps: vec![1e-5],
        methods: vec![RateMethod::Gpd],
        trials: Some(100_000_000),
        sweep_grid: None,
        bootstrap: None,
        min_tail: DEFAULT_MIN_TAIL,
        seed: 4004,
        out_dir: dir.path().to_path_buf(),
    };
    let bundle = run_experiment(&config, Execution::auto()).unwrap();
    let r = &bundle.reports[0].report;
    assert!(
        r.wilson_high <= 1.2e-5,
        "wilson upper {} exceeds 1.2e-5",
        r.wilson_high
    );
    println!(
        "C4(slow) PASS: outage {:.3e}, upper {:.3e} <= 1.2e-5",
        r.empirical_outage, r.wilson_high
    );
}

/// Smallest grid size from which every later sweep point stays within
/// `band` of 1; `None` if the sweep never settles.
fn converged_from(points: &[SweepPoint], band: f64) -> Option<usize> {
    let mut from = None;
    for p in points {
        let inside = p.w.is_some_and(|w| (w - 1.0).abs() <= band);
        if inside {
            from.get_or_insert(p.n);
        } else {
            from = None;
        }
    }
    from
}

#[test]
fn c5_normalized_rate_converges_later_at_deeper_thresholds() {
    let trace = spliced_spec(53).generate(1_000_000).unwrap();
    let grid = [
        5_000, 10_000, 20_000, 50_000, 100_000, 200_000, 300_000, 500_000, 700_000, 1_000_000,
    ];
    let eps = 1e-3;

    let shallow_u = 2.0; // tail mass 0.05
    let shallow = normalized_rate_sweep(
        &trace,
        &grid,
        eps,
        shallow_u,
        1,
        DEFAULT_MIN_TAIL,
        RateMethod::Gpd,
        Execution::auto(),
    )
    .unwrap();
    for p in shallow.iter().filter(|p| p.n >= 100_000) {
        let w = p.w.expect("fit defined at n >= 1e5");
        assert!(
            (0.9..=1.1).contains(&w),
            "shallow w({}) = {w} outside [0.9, 1.1]",
            p.n
        );
    }

    // The exact power holding 1% of mass: a deeper threshold, five times
    // fewer exceedances at every n.
    let deep_u = Marginal::GpdSpliced {
        body_mean: 4.0,
        splice: 2.0,
        tail_scale: 0.5,
        tail_shape: -0.3,
        tail_mass: 0.05,
    }
    .quantile(0.01)
    .unwrap();
    assert!((deep_u - 1.362).abs() < 0.01, "deep threshold {deep_u}");
    let deep = normalized_rate_sweep(
        &trace,
        &grid,
        eps,
        deep_u,
        1,
        DEFAULT_MIN_TAIL,
        RateMethod::Gpd,
        Execution::auto(),
    )
    .unwrap();

    // The deep threshold sees five times fewer exceedances at every n,
    // so its sweep settles strictly later: at n = 5000 it cannot even
    // sustain a fit (about 50 raw exceedances against a 50-sample tail
    // minimum) while the shallow sweep is already within the band.
    let band = 0.1;
    let shallow_from = converged_from(&shallow, band).expect("shallow sweep converges");
    let deep_from = converged_from(&deep, band).expect("deep sweep converges");
    assert!(
        deep_from > shallow_from,
        "deep threshold converged at {deep_from}, not after shallow {shallow_from}"
    );
    println!(
        "C5 PASS: shallow (u = 2.000) within band from n = {shallow_from}, \
         deep (u = {deep_u:.3}) from n = {deep_from}"
    );
}

#[test]
fn c6_rayleigh_mismatch_misses_rate_and_outage() {
    // Bounded tail with endpoint 2.0 - 0.6/0.4 = 0.5 linear: far above
    // any quantile an extrapolated exponential law would act on.
    let spec = ChannelSpec {
        kind: ChannelKind::GpdSpliced {
            body_mean: 4.0,
            splice: 2.0,
            tail_scale: 0.6,
            tail_shape: -0.4,
            tail_mass: 0.05,
        },
        seed: 61,
    };
    let eps = 1e-4_f64;
    let trace = spec.generate(100_000).unwrap();

    let rayleigh = fit_rayleigh(trace.samples()).unwrap();
    let rayleigh_quantile = -rayleigh.mean_power() * (-eps).ln_1p();
    assert!(
        rayleigh_quantile < 0.5,
        "premise broken: Rayleigh quantile {rayleigh_quantile} reaches the endpoint"
    );

    let sweep = normalized_rate_sweep(
        &trace,
        &[100_000],
        eps,
        2.0,
        1,
        DEFAULT_MIN_TAIL,
        RateMethod::RayleighMismatch,
        Execution::auto(),
    )
    .unwrap();
    let w = sweep[0].w.expect("mismatch rate defined");
    assert!(
        (w - 1.0).abs() > 0.2,
        "mismatch w = {w} is within 20% of the informed rate"
    );

    let exceedances = decluster(trace.samples(), 2.0, 1).unwrap();
    let gpd = tailrate_core::fitting::fit_gpd_mle(&exceedances, 2.0, trace.len()).unwrap();
    let plan = mismatch_rate(&rayleigh, eps, &gpd).unwrap();
    let report = validate_plan(&plan, &spec, 1_000_000, 636, Execution::auto()).unwrap();
    let ratio = report.empirical_outage / eps;
    assert!(
        !(0.2..=5.0).contains(&ratio),
        "mismatch outage {:.3e} is within 5x of eps {eps:.0e}",
        report.empirical_outage
    );
    println!(
        "C6 PASS: |w - 1| = {:.3} > 0.2; outage/eps = {ratio:.3e} (outage {:.3e})",
        (w - 1.0).abs(),
        report.empirical_outage
    );
}

fn lag1_autocorrelation(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    let cov: f64 = xs.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
    cov / var
}

#[test]
fn c7_hand_traces_pass_and_declustering_decorrelates() {
    // Hand-traced runs declustering, u = 1, r = 1: cluster {0.5, 0.4}
    // yields 0.6 from its minimum, cluster {0.8} yields 0.2.
    let ys = decluster(&[2.0, 0.5, 0.4, 2.0, 2.0, 0.8], 1.0, 1).unwrap();
    assert_eq!(ys.len(), 2);
    assert!((ys[0] - 0.6).abs() < 1e-12 && (ys[1] - 0.2).abs() < 1e-12);
    assert!(decluster(&[2.0, 3.0], 1.0, 1).unwrap().is_empty());
    let single = decluster(&[2.0, 0.7, 2.0], 1.0, 1).unwrap();
    assert_eq!(single.len(), 1);
    assert!((single[0] - 0.3).abs() < 1e-12);

    // Hand-traced segmentation: 2500 samples, block_len 1000. One dip in
    // the second block sends it to group 2; the partial block is 2.
    let mut xs = vec![1.0; 2500];
    xs[1500] = 0.005;
    let groups = segment_groups(&xs, 1000, 0.01).unwrap();
    assert!(groups[..1000].iter().all(|&g| g == 1));
    assert!(groups[1000..2000].iter().all(|&g| g == 2));
    assert!(groups[2000..].iter().all(|&g| g == 2));
    let clean = segment_groups(&vec![1.0; 2000], 1000, 10f64.powf(-1.2)).unwrap();
    assert!(clean.iter().all(|&g| g == 1));

    // AR(1) with rho = 0.9: deficits below u arrive in bursts (the
    // dependence declustering exists to remove). The burstiness shows in
    // the below-threshold indicator and in multi-sample clusters; the
    // exceedance values drawn one per cluster must be decorrelated.
    let spec = ChannelSpec {
        kind: ChannelKind::ArCorrelated {
            rho: 0.9,
            marginal: Marginal::Exponential { mean_power: 1.0 },
        },
        seed: 72,
    };
    let trace = spec.generate(200_000).unwrap();
    let u = -(0.95f64.ln()); // 5% quantile of Exp(1)
    let below = trace.samples().iter().filter(|&&x| x < u).count();
    let indicator: Vec<f64> = trace
        .samples()
        .iter()
        .map(|&x| if x < u { 1.0 } else { 0.0 })
        .collect();
    let burstiness = lag1_autocorrelation(&indicator);
    assert!(
        burstiness > 0.3,
        "deficits are not clustered (indicator lag-1 {burstiness}); the check is vacuous"
    );
    let excursions = decluster(trace.samples(), u, 1).unwrap();
    let mean_cluster = below as f64 / excursions.len() as f64;
    assert!(mean_cluster > 1.5, "excursions are single samples");
    let declustered = decluster(trace.samples(), u, 10).unwrap();
    let post_lag1 = lag1_autocorrelation(&declustered);
    assert!(
        post_lag1.abs() <= 0.1,
        "declustered lag-1 autocorrelation {post_lag1} > 0.1"
    );
    println!(
        "C7 PASS: hand traces exact; AR(0.9) indicator lag-1 {burstiness:.3}, \
         mean cluster size {mean_cluster:.2}, declustered value lag-1 {post_lag1:.3} \
         over {} clusters",
        declustered.len()
    );
}

#[test]
fn c8_experiment_reruns_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig {
        input: InputSource::Channel {
            spec: spliced_spec(81),
            count: 200_000,
        },
        segmentation: None,
        run_length: 1,
        threshold: ThresholdConfig::Manual {
            threshold: 2.0,
            grid_count: 12,
            lo_fraction: 0.01,
            hi_fraction: 0.25,
        },
        eps: vec![1e-2],
        methods: vec![
            RateMethod::Gpd,
            RateMethod::RayleighExtrapolated,
            RateMethod::RayleighMismatch,
        ],
        trials: Some(200_000),
        sweep_grid: Some(vec![50_000, 200_000]),
        bootstrap: Some(BootstrapConfig {
            replicates: 8,
            training_size: 100_000,
            with_replacement: false,
        }),
        min_tail: DEFAULT_MIN_TAIL,
        seed: 808,
        out_dir: dir.path().to_path_buf(),
    };
    let first = run_experiment(&config, Execution::auto()).unwrap();
    let manifest_a = std::fs::read(&first.manifest).unwrap();
    let second = run_experiment(&config, Execution::auto()).unwrap();
    let manifest_b = std::fs::read(&second.manifest).unwrap();
    assert_eq!(manifest_a, manifest_b, "manifests differ between reruns");
    assert!(!manifest_a.is_empty());
    println!(
        "C8 PASS: {} artifacts, manifest {} bytes, bit-identical rerun",
        first.artifacts.len(),
        manifest_a.len()
    );
}
