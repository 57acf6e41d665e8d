use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chrono::NaiveDate;
use epicurve::ingest::{parse_dataset, IngestConfig};
use epicurve::series::daily_from_cumulative;
use epicurve::Measure;
use epicurve_cli::read_manifest;
use epicurve_cli::svg::{ChartScale, Layout, LineSeries};
use sha2::{Digest, Sha256};

fn snapshot() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/world_snapshot_2020-05-19.csv")
}

fn epicurve(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epicurve"))
        .args(args)
        .arg("--output-dir")
        .arg(out)
        .env_remove("EPICURVE_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], out: &Path) -> String {
    let o = epicurve(args, out);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn with_input<'a>(args: &[&'a str], input: &'a str) -> Vec<&'a str> {
    let mut v = args.to_vec();
    v.extend(["--input", input]);
    v
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, acc: &mut BTreeMap<String, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, acc);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
                acc.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut acc = BTreeMap::new();
    walk(dir, dir, &mut acc);
    acc
}

fn sha(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

const RUNS: &[&[&str]] = &[
    &["ingest"],
    &["fit", "--country", "Algeria", "--split-date", "2020-05-04"],
    &["forecast", "--country", "Algeria", "--measure", "deaths", "--horizon", "30"],
    &["backtest", "--country", "Algeria", "--measure", "cases", "--split-date", "2020-05-04"],
    &["analyze", "--as-of", "2020-05-19"],
    &["plot", "--country", "Algeria"],
];

#[test]
fn manifest_lists_exactly_the_files_written() {
    let input = snapshot();
    let input = input.to_str().unwrap();
    for args in RUNS {
        let dir = tempfile::tempdir().unwrap();
        ok(&with_input(args, input), dir.path());
        let mut on_disk = files(dir.path());
        let manifest = String::from_utf8(on_disk.remove("manifest.txt").expect("manifest written")).unwrap();
        assert!(manifest.contains(&format!("subcommand = {}", args[0])));
        let listed = read_manifest(&manifest);
        assert_eq!(listed.len(), on_disk.len(), "{args:?}");
        for (name, digest) in listed {
            let bytes = on_disk.get(&name).unwrap_or_else(|| panic!("{name} listed but missing"));
            assert_eq!(sha(bytes), digest, "{name}");
        }
    }
}

#[test]
fn reruns_are_byte_identical() {
    let input = snapshot();
    let input = input.to_str().unwrap();
    for args in RUNS {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        ok(&with_input(args, input), a.path());
        ok(&with_input(args, input), b.path());
        let fa = files(a.path());
        let fb = files(b.path());
        assert_eq!(fa.keys().collect::<Vec<_>>(), fb.keys().collect::<Vec<_>>());
        for (name, bytes) in &fa {
            if name == "manifest.txt" {
                // the echoed output directory differs; the artifact list must not
                assert_eq!(read_manifest(&String::from_utf8_lossy(bytes)), read_manifest(&String::from_utf8_lossy(&fb[name])));
            } else {
                assert!(bytes == &fb[name], "{args:?}: {name} differs between runs");
            }
        }
    }
}

#[test]
fn seed_changes_the_sampled_forecast() {
    let input = snapshot();
    let input = input.to_str().unwrap();
    let args = ["forecast", "--country", "Algeria", "--measure", "cases", "--horizon", "10"];
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    ok(&with_input(&args, input), a.path());
    let mut seeded = with_input(&args, input);
    seeded.extend(["--seed", "7"]);
    ok(&seeded, b.path());
    let read = |d: &Path| std::fs::read_to_string(d.join("forecast_algeria_cases.csv")).unwrap();
    assert_ne!(read(a.path()), read(b.path()));
}

#[test]
fn inputs_are_never_modified() {
    let input = snapshot();
    let before = sha(&std::fs::read(&input).unwrap());
    let dir = tempfile::tempdir().unwrap();
    ok(&with_input(&["ingest"], input.to_str().unwrap()), dir.path());
    assert_eq!(sha(&std::fs::read(&input).unwrap()), before);

    let local = dir.path().join("dataset.csv");
    std::fs::copy(&input, &local).unwrap();
    let o = epicurve(&with_input(&["ingest"], local.to_str().unwrap()), dir.path());
    assert_eq!(o.status.code(), Some(6), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(sha(&std::fs::read(&local).unwrap()), before);
}

#[test]
fn failures_map_to_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let input = snapshot();
    let input = input.to_str().unwrap();
    let code = |args: &[&str], out: &Path| epicurve(args, out).status.code();

    assert_eq!(code(&with_input(&["backtest", "--country", "Algeria"], input), dir.path()), Some(2));
    assert_eq!(code(&["fit", "--country", "Algeria"], dir.path()), Some(2));
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "horizn = 3\n").unwrap();
    assert_eq!(code(&["--config", cfg.to_str().unwrap(), "ingest", "--input", input], dir.path()), Some(2));

    let missing = dir.path().join("missing.csv");
    assert_eq!(code(&["ingest", "--input", missing.to_str().unwrap()], dir.path()), Some(3));

    assert_eq!(code(&with_input(&["fit", "--country", "Atlantis"], input), dir.path()), Some(4));
    let broken = dir.path().join("broken.csv");
    std::fs::write(&broken, "country,date\nAlgeria,not-a-date\n").unwrap();
    assert_eq!(code(&["ingest", "--input", broken.to_str().unwrap()], dir.path()), Some(4));
    assert_eq!(
        code(&with_input(&["backtest", "--country", "Algeria", "--split-date", "2019-01-01"], input), dir.path()),
        Some(4)
    );

    let model = dir.path().join("model.txt");
    std::fs::write(&model, "format = 1\nk = banana\n").unwrap();
    assert_eq!(code(&["forecast", "--model", model.to_str().unwrap()], dir.path()), Some(5));

    let blocker = dir.path().join("not-a-dir");
    std::fs::write(&blocker, "x").unwrap();
    assert_eq!(code(&with_input(&["ingest"], input), &blocker), Some(6));
}

#[test]
fn config_file_supplies_values_and_flags_override_them() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        format!(
            "input = {:?}\ncountry = \"Algeria\"\nmeasure = \"cases\"\nhorizon = 5\nsamples = 0\n",
            snapshot().to_str().unwrap()
        ),
    )
    .unwrap();
    let out = dir.path().join("out");
    ok(&["--config", cfg.to_str().unwrap(), "forecast", "--horizon", "7"], &out);
    let csv = std::fs::read_to_string(out.join("forecast_algeria_cases.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 7);
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("horizon = 7"));
    assert!(manifest.contains("samples = 0"));
}

#[test]
fn output_dir_falls_back_to_environment_below_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let env_out = dir.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_epicurve"))
        .args(["ingest", "--input", snapshot().to_str().unwrap()])
        .env("EPICURVE_OUTPUT_DIR", &env_out)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(env_out.join("manifest.txt").is_file());

    let cfg = dir.path().join("run.toml");
    let file_out = dir.path().join("from-file");
    std::fs::write(&cfg, format!("output_dir = {:?}\n", file_out.to_str().unwrap())).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_epicurve"))
        .args(["--config", cfg.to_str().unwrap(), "ingest", "--input", snapshot().to_str().unwrap()])
        .env("EPICURVE_OUTPUT_DIR", dir.path().join("ignored"))
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(file_out.join("manifest.txt").is_file());
    assert!(!dir.path().join("ignored").exists());
}

#[test]
fn forecast_csv_has_one_row_per_day() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(
        &with_input(&["forecast", "--country", "Algeria", "--measure", "deaths", "--horizon", "30"], snapshot().to_str().unwrap()),
        dir.path(),
    );
    assert!(out.contains("Algeria deaths"));
    let csv = std::fs::read_to_string(dir.path().join("forecast_algeria_deaths.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("date,point,lower,upper"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 30);
    assert_eq!(rows[0][0], "2020-05-20");
    assert_eq!(rows[29][0], "2020-06-18");
    for r in &rows {
        let [p, lo, hi] = [r[1], r[2], r[3]].map(|v| v.parse::<f64>().unwrap());
        assert!(lo <= p && p <= hi, "{r:?}");
    }
    let svg = std::fs::read_to_string(dir.path().join("forecast_algeria_deaths.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn saved_model_reproduces_the_forecast() {
    let input = snapshot();
    let a = tempfile::tempdir().unwrap();
    ok(&with_input(&["forecast", "--country", "Algeria", "--measure", "cases"], input.to_str().unwrap()), a.path());
    let b = tempfile::tempdir().unwrap();
    let model = a.path().join("model_algeria_cases.txt");
    ok(&["forecast", "--model", model.to_str().unwrap()], b.path());
    let read = |d: &Path| std::fs::read(d.join("forecast_algeria_cases.csv")).unwrap();
    assert!(read(a.path()) == read(b.path()));
}

#[test]
fn backtest_reports_rmse_and_chart() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(
        &with_input(&["backtest", "--country", "Algeria", "--measure", "cases", "--split-date", "2020-05-04"], snapshot().to_str().unwrap()),
        dir.path(),
    );
    assert!(out.contains("rmse"));
    let csv = std::fs::read_to_string(dir.path().join("backtest_algeria_cases.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 15);
    assert!(csv.lines().nth(1).unwrap().starts_with("2020-05-05,"));
    let svg = std::fs::read_to_string(dir.path().join("backtest_algeria_cases.svg")).unwrap();
    assert!(svg.contains("predicted") && svg.contains("actual"));
}

#[test]
fn heatmap_has_one_cell_per_matrix_entry() {
    let input = snapshot();
    let input = input.to_str().unwrap();
    let dir = tempfile::tempdir().unwrap();
    ok(&with_input(&["analyze", "--as-of", "2020-05-19"], input), dir.path());
    let svg = std::fs::read_to_string(dir.path().join("heatmap.svg")).unwrap();
    assert_eq!(svg.matches("class=\"cell\"").count(), 12 * 12);
    let hist: Vec<_> = files(dir.path()).into_keys().filter(|k| k.starts_with("histograms/") && k.ends_with(".svg")).collect();
    assert_eq!(hist.len(), 12);

    let small = tempfile::tempdir().unwrap();
    ok(&with_input(&["analyze", "--features", "tests,cases"], input), small.path());
    let svg = std::fs::read_to_string(small.path().join("heatmap.svg")).unwrap();
    assert_eq!(svg.matches("class=\"cell\"").count(), 4);
    assert_eq!(svg.matches(">1.00<").count(), 2);
}

#[test]
fn daily_plot_peak_sits_at_the_record_value() {
    let input = snapshot();
    let dir = tempfile::tempdir().unwrap();
    ok(&with_input(&["plot", "--country", "Algeria", "--measure", "cases"], input.to_str().unwrap()), dir.path());
    let svg = std::fs::read_to_string(dir.path().join("plot_algeria_cases_daily.svg")).unwrap();

    let (dataset, _) = parse_dataset(&input, &IngestConfig::default()).unwrap();
    let series = dataset.require("Algeria").unwrap().series(Measure::Cases);
    let daily = daily_from_cumulative(series).unwrap();
    assert_eq!(daily.iter().max(), Some(&199));
    let pts: Vec<(NaiveDate, f64)> = series.dates().zip(daily.iter().map(|&v| v as f64)).collect();
    let scale = ChartScale::fit(&[LineSeries::new("daily", pts, "#000")], &[], Layout::default()).unwrap();

    let line = svg.lines().find(|l| l.starts_with("<polyline class=\"series\"")).unwrap();
    let coords = line.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
    let top = coords
        .split(' ')
        .map(|p| p.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .fold(f64::INFINITY, f64::min);
    assert_eq!(format!("{top:.2}"), format!("{:.2}", scale.y(199.0)));
}
