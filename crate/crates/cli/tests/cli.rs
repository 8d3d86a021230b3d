//! End-to-end subcommand tests against the compiled binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tailrate"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

const CHANNEL_TOML: &str = r#"
seed = 11

[kind]
kind = "gpd_spliced"
body_mean = 4.0
splice = 2.0
tail_scale = 0.5
tail_shape = -0.3
tail_mass = 0.05
"#;

fn write_channel(dir: &Path) -> String {
    let path = dir.join("channel.toml");
    fs::write(&path, CHANNEL_TOML).unwrap();
    path.to_string_lossy().into_owned()
}

/// generate -> scan -> fit -> rate -> validate, sharing one tempdir.
#[test]
fn pipeline_composes_across_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let channel = write_channel(dir.path());
    let trace = dir.path().join("trace.tsv");
    let trace = trace.to_str().unwrap();

    let out = run(&[
        "generate", "--spec", &channel, "--count", "60000", "--out", trace,
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("60000 samples"));

    let scan_dir = dir.path().join("scan");
    let out = run(&[
        "scan",
        "--input",
        trace,
        "--min-tail",
        "50",
        "--out",
        scan_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).starts_with("selected_threshold\t"));
    for name in ["scan.toml", "mrl.tsv", "stability.tsv", "manifest.txt"] {
        assert!(scan_dir.join(name).is_file(), "missing {name}");
    }

    let model = dir.path().join("model.toml");
    let model = model.to_str().unwrap();
    let out = run(&[
        "fit", "--input", trace, "--threshold", "2.0", "--min-tail", "50", "--out", model,
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).starts_with("gpd\tscale\t"));
    assert!(fs::read_to_string(model).unwrap().contains("kind = \"gpd\""));

    let plan = dir.path().join("plan.toml");
    let plan = plan.to_str().unwrap();
    let out = run(&["rate", "--model", model, "--eps", "1e-2", "--out", plan]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).starts_with("rate\t"));

    // A plug-in plan straddles its own target, so the strict Wilson
    // policy rejects it at this trial count: exit 5, report written.
    let report = dir.path().join("report.toml");
    let report = report.to_str().unwrap();
    let out = run(&[
        "validate", "--plan", plan, "--channel", &channel, "--trials", "20000", "--seed", "5",
        "--out", report,
    ]);
    assert_eq!(code(&out), 5, "{}\n{}", stdout(&out), stderr(&out));
    assert!(stderr(&out).contains("reliability constraint failed"));
    let report_text = fs::read_to_string(report).unwrap();
    assert!(report_text.contains("pass = false"));

    // A rate far below the tail's lower endpoint can never see an
    // outage, so the same channel passes it deterministically.
    let safe_plan = dir.path().join("safe_plan.toml");
    fs::write(
        &safe_plan,
        r#"
rate = 0.001
target_eps = 0.01
adjusted_eps = 0.2
method = "gpd"

[model]
family = "gpd"
tail_mass = 0.05

[model.params]
scale = 0.5
shape = -0.3
threshold = 2.0
"#,
    )
    .unwrap();
    let out = run(&[
        "validate",
        "--plan",
        safe_plan.to_str().unwrap(),
        "--channel",
        &channel,
        "--trials",
        "20000",
        "--seed",
        "5",
        "--out",
        report,
    ]);
    assert_eq!(code(&out), 0, "{}\n{}", stdout(&out), stderr(&out));
    assert!(stdout(&out).contains("pass\ttrue"));
    assert!(fs::read_to_string(report).unwrap().contains("pass = true"));
}

#[test]
fn ingest_logs_counts_and_converts_dbm() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("raw.txt");
    fs::write(&input, "# capture\n-12\n-5\n0\n").unwrap();
    let out_path = dir.path().join("trace.tsv");
    let out = run(&[
        "ingest",
        "--input",
        input.to_str().unwrap(),
        "--unit",
        "dbm",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("ingested 3 samples"));
    let text = fs::read_to_string(&out_path).unwrap();
    assert!(text.contains("6.3095734448019331e-2"));
    assert!(text.contains("1.0000000000000000e0"));
}

#[test]
fn malformed_trace_exits_3_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.txt");
    fs::write(&input, "1.0\nabc\n").unwrap();
    let out = run(&[
        "ingest",
        "--input",
        input.to_str().unwrap(),
        "--out",
        dir.path().join("x.tsv").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("line 2"));
}

#[test]
fn missing_input_file_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "ingest",
        "--input",
        dir.path().join("nope.tsv").to_str().unwrap(),
        "--out",
        dir.path().join("x.tsv").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn invalid_channel_spec_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad_channel.toml");
    // Positive tail shape: unbounded lower tail, rejected up front.
    fs::write(
        &spec,
        r#"
seed = 1

[kind]
kind = "gpd_spliced"
body_mean = 4.0
splice = 2.0
tail_scale = 0.5
tail_shape = 0.2
tail_mass = 0.05
"#,
    )
    .unwrap();
    let out = run(&[
        "generate",
        "--spec",
        spec.to_str().unwrap(),
        "--count",
        "100",
        "--out",
        dir.path().join("t.tsv").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn unreachable_quantile_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let channel = write_channel(dir.path());
    let trace = dir.path().join("trace.tsv");
    let trace = trace.to_str().unwrap();
    let out = run(&[
        "generate", "--spec", &channel, "--count", "40000", "--out", trace,
    ]);
    assert_eq!(code(&out), 0);
    let model = dir.path().join("model.toml");
    let model = model.to_str().unwrap();
    let out = run(&[
        "fit", "--input", trace, "--threshold", "2.0", "--min-tail", "50", "--out", model,
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    // eps of 0.5 against a ~0.05 tail mass needs a conditional level
    // above one: a numeric-domain failure, not a config problem.
    let out = run(&[
        "rate",
        "--model",
        model,
        "--eps",
        "0.5",
        "--out",
        dir.path().join("plan.toml").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}

#[test]
fn segment_decluster_and_sweep_write_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let channel = write_channel(dir.path());
    let trace = dir.path().join("trace.tsv");
    let trace = trace.to_str().unwrap();
    let out = run(&[
        "generate", "--spec", &channel, "--count", "40000", "--out", trace,
    ]);
    assert_eq!(code(&out), 0);

    let kept = dir.path().join("kept.tsv");
    let out = run(&[
        "segment",
        "--input",
        trace,
        "--block-len",
        "100",
        "--floor",
        "1e-6",
        "--out",
        kept.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("kept 40000 of 40000"));

    let exc = dir.path().join("exceedances.tsv");
    let out = run(&[
        "decluster",
        "--input",
        trace,
        "--threshold",
        "2.0",
        "--out",
        exc.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let lines = fs::read_to_string(&exc).unwrap().lines().count();
    assert!(lines > 1_500, "unexpectedly few exceedances: {lines}");

    let sweep = dir.path().join("sweep.tsv");
    let out = run(&[
        "sweep",
        "--input",
        trace,
        "--eps",
        "1e-2",
        "--threshold",
        "2.0",
        "--grid",
        "10000,40000",
        "--min-tail",
        "50",
        "--out",
        sweep.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&sweep).unwrap();
    assert!(text.starts_with("n_samples\tw_normalized_rate"));
}

fn experiment_config(dir: &Path, out_dir: &Path) -> String {
    let path = dir.join("experiment.toml");
    fs::write(
        &path,
        format!(
            r#"
seed = 21
eps = [1e-2]
trials = 5000
min_tail = 50
out_dir = "{}"

[input]
source = "channel"
count = 40000

[input.spec]
seed = 12

[input.spec.kind]
kind = "gpd_spliced"
body_mean = 4.0
splice = 2.0
tail_scale = 0.5
tail_shape = -0.3
tail_mass = 0.05

[threshold]
policy = "manual"
threshold = 2.0
"#,
            out_dir.display()
        ),
    )
    .unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn compare_prints_three_methods_and_reruns_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let config = experiment_config(dir.path(), &out_dir);

    let out = run(&["compare", "--config", &config]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let table = stdout(&out);
    for method in ["gpd", "rayleigh_extrapolated", "rayleigh_mismatch"] {
        assert!(table.contains(method), "table misses {method}:\n{table}");
    }
    let manifest = fs::read(out_dir.join("manifest.txt")).unwrap();

    let again = run(&["compare", "--config", &config]);
    assert_eq!(code(&again), 0);
    assert_eq!(stdout(&again), table, "stdout changed between reruns");
    assert_eq!(
        fs::read(out_dir.join("manifest.txt")).unwrap(),
        manifest,
        "artifacts changed between reruns"
    );
}

#[test]
fn invalid_experiment_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    fs::write(
        &config,
        r#"
seed = 1
eps = [1.5]
out_dir = "/tmp/never"

[input]
source = "channel"
count = 100

[input.spec]
seed = 2

[input.spec.kind]
kind = "exponential_power"
mean_power = 1.0

[threshold]
policy = "auto"
"#,
    )
    .unwrap();
    let out = run(&["compare", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn emit_writes_one_kind_and_rejects_unknown_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let config = experiment_config(dir.path(), &out_dir);

    let plots = dir.path().join("plots");
    let out = run(&[
        "emit",
        "--config",
        &config,
        "--kind",
        "qq",
        "--out",
        plots.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(plots.join("qq.tsv").is_file());
    assert!(stdout(&out).contains("qq.tsv"));

    let out = run(&[
        "emit",
        "--config",
        &config,
        "--kind",
        "nonsense",
        "--out",
        plots.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("rate_sweep"), "{}", stderr(&out));
}

#[test]
fn sequential_flag_matches_default_output() {
    let dir = tempfile::tempdir().unwrap();
    let channel = write_channel(dir.path());
    let a = dir.path().join("a.tsv");
    let b = dir.path().join("b.tsv");
    let out = run(&[
        "generate", "--spec", &channel, "--count", "30000", "--out", a.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let out = run(&[
        "generate",
        "--sequential",
        "--spec",
        &channel,
        "--count",
        "30000",
        "--out",
        b.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}
