//! Command-line front end: ingest, fit, forecast, backtest, analyze, plot.
//!
//! Every run writes only into its output directory and finishes with a
//! `manifest.txt` that echoes the resolved settings and lists each artifact
//! with its size and SHA-256 digest.

pub mod config;
pub mod error;
pub mod svg;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use epicurve::analysis::{self, AnalysisOptions, Feature};
use epicurve::evaluation::{self, BacktestConfig, BacktestReport};
use epicurve::ingest::{self, ImputationReport};
use epicurve::series::daily_from_cumulative;
use epicurve::trend::{self, model_io, FittedModel, Forecast, ForecastConfig};
use epicurve::{CountryRecord, Dataset, Measure, TimeSeries};
use sha2::{Digest, Sha256};

pub use config::{Cli, FileConfig, RunConfig, SubcommandKind};
pub use error::CliError;

pub const MANIFEST_NAME: &str = "manifest.txt";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    /// Path relative to the output directory, `/`-separated.
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub artifacts: Vec<Artifact>,
    /// Human-readable summary for stdout.
    pub summary: String,
}

struct Outputs {
    dir: PathBuf,
    protected: Vec<PathBuf>,
    artifacts: Vec<Artifact>,
}

impl Outputs {
    fn new(dir: &Path, inputs: &[&Path]) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
        let protected = inputs.iter().filter_map(|p| std::fs::canonicalize(p).ok()).collect();
        Ok(Self { dir: dir.to_path_buf(), protected, artifacts: Vec::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::Output(format!("{}: {e}", parent.display())))?;
        }
        if let Ok(canonical) = std::fs::canonicalize(&path) {
            if self.protected.contains(&canonical) {
                return Err(CliError::Output(format!("refusing to overwrite input {}", path.display())));
            }
        }
        std::fs::write(&path, bytes).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        self.artifacts.push(Artifact {
            name: name.to_string(),
            bytes: bytes.len(),
            sha256: hex_digest(bytes),
        });
        Ok(())
    }

    fn write_with(&mut self, name: &str, f: impl FnOnce(&mut Vec<u8>) -> epicurve::Result<()>) -> Result<(), CliError> {
        let mut buf = Vec::new();
        f(&mut buf).map_err(|e| CliError::Output(format!("{name}: {e}")))?;
        self.write(name, &buf)
    }

    fn finish(mut self, config: &RunConfig) -> Result<Vec<Artifact>, CliError> {
        let manifest = render_manifest(config, &self.artifacts);
        let path = self.dir.join(MANIFEST_NAME);
        std::fs::write(&path, manifest).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        Ok(std::mem::take(&mut self.artifacts))
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn render_manifest(config: &RunConfig, artifacts: &[Artifact]) -> String {
    let mut out = String::from("# epicurve run manifest\n[config]\n");
    out.push_str(&config.echo());
    out.push_str("[artifacts]\n");
    for a in artifacts {
        let _ = writeln!(out, "{}  {}  {}", a.sha256, a.bytes, a.name);
    }
    out
}

/// Reads the `[artifacts]` section of a manifest as `(name, sha256)` pairs.
pub fn read_manifest(text: &str) -> Vec<(String, String)> {
    text.lines()
        .skip_while(|l| *l != "[artifacts]")
        .skip(1)
        .filter_map(|l| {
            let mut parts = l.splitn(3, "  ");
            let sha = parts.next()?.to_string();
            let _bytes = parts.next()?;
            Some((parts.next()?.to_string(), sha))
        })
        .collect()
}

pub fn run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    config.validate()?;
    let mut inputs: Vec<&Path> = Vec::new();
    if let Some(p) = &config.input_path {
        inputs.push(p);
    }
    if let Some(p) = &config.model_path {
        inputs.push(p);
    }
    let mut out = Outputs::new(&config.output_dir, &inputs)?;
    let summary = match config.subcommand {
        SubcommandKind::Ingest => run_ingest(config, &mut out)?,
        SubcommandKind::Fit => run_fit(config, &mut out)?,
        SubcommandKind::Forecast => run_forecast(config, &mut out)?,
        SubcommandKind::Backtest => run_backtest(config, &mut out)?,
        SubcommandKind::Analyze => run_analyze(config, &mut out)?,
        SubcommandKind::Plot => run_plot(config, &mut out)?,
    };
    let artifacts = out.finish(config)?;
    Ok(RunOutcome { artifacts, summary })
}

fn load(config: &RunConfig) -> Result<(Dataset, ImputationReport), CliError> {
    let path = config.input_path.as_ref().ok_or_else(|| CliError::Usage("--input is required".into()))?;
    if !path.is_file() {
        return Err(CliError::Input(format!("{}: no such file", path.display())));
    }
    Ok(ingest::parse_dataset(path, &config.ingest)?)
}

fn country<'a>(dataset: &'a Dataset, config: &RunConfig) -> Result<&'a CountryRecord, CliError> {
    let name = config.country.as_deref().ok_or_else(|| CliError::Usage("--country is required".into()))?;
    Ok(dataset.require(name)?)
}

fn slug(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect()
}

fn series_through(series: &TimeSeries, end: Option<NaiveDate>) -> Result<TimeSeries, CliError> {
    match end {
        None => Ok(series.clone()),
        Some(date) => {
            let idx = series.index_of(date).ok_or_else(|| {
                CliError::Data(format!(
                    "{date} is outside the {} {} series ({}..{})",
                    series.country(),
                    series.measure(),
                    series.start(),
                    series.end().unwrap_or(series.start())
                ))
            })?;
            Ok(series.slice(0..idx + 1))
        }
    }
}

fn run_ingest(config: &RunConfig, out: &mut Outputs) -> Result<String, CliError> {
    let (dataset, report) = load(config)?;
    out.write_with("dataset.csv", |w| ingest::write_long_csv(&dataset, w))?;
    out.write_with("imputation.csv", |w| report.write_csv(w))?;
    let text = report.to_text();
    out.write("imputation.txt", text.as_bytes())?;

    let mut s = String::new();
    let _ = writeln!(s, "{} countries, {} rows, 15 columns, snapshot {}", dataset.len(), dataset.long_row_count(), dataset.snapshot());
    let counts: Vec<String> = dataset.continent_counts().iter().map(|(c, n)| format!("{c} {n}")).collect();
    let _ = writeln!(s, "continents: {}", counts.join(", "));
    s.push_str(&text);
    Ok(s)
}

fn fitted_csv(model: &FittedModel, series: &TimeSeries) -> epicurve::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["date", "actual", "fitted"])?;
    for (i, fitted) in model.fitted().iter().enumerate() {
        w.write_record([series.date_at(i).to_string(), series.values()[i].to_string(), fitted.to_string()])?;
    }
    w.into_inner().map_err(|e| epicurve::Error::Io(e.to_string()))
}

fn describe(model: &FittedModel) -> String {
    format!(
        "{} {}: trained {}..{} ({} days), k = {:.5}/day, m = {:.2}, {} changepoints, sigma = {:.3}, objective = {:.4}{}",
        model.country,
        model.measure,
        model.train_start,
        model.train_end(),
        model.train_length,
        model.params.k,
        model.params.m,
        model.grid.len(),
        model.params.sigma,
        model.objective_value,
        if model.converged { "" } else { " (not converged)" }
    )
}

fn run_fit(config: &RunConfig, out: &mut Outputs) -> Result<String, CliError> {
    let (dataset, _) = load(config)?;
    let record = country(&dataset, config)?;
    let mut s = String::new();
    for &m in &config.measures {
        let train = series_through(record.series(m), config.split_date)?;
        let model = trend::fit(&train, &config.fit)?;
        let tag = format!("{}_{}", slug(record.name()), m);
        out.write(&format!("model_{tag}.txt"), model_io::to_text(&model).as_bytes())?;
        let csv = fitted_csv(&model, &train).map_err(|e| CliError::Output(e.to_string()))?;
        out.write(&format!("fitted_{tag}.csv"), &csv)?;
        let _ = writeln!(s, "{}", describe(&model));
    }
    Ok(s)
}

fn points(series: &TimeSeries) -> Vec<(NaiveDate, f64)> {
    series.dates().zip(series.values()).map(|(d, &v)| (d, v as f64)).collect()
}

fn forecast_chart(title: &str, history: Option<&TimeSeries>, f: &Forecast, actual: Option<&[f64]>) -> Result<String, CliError> {
    let mut lines = Vec::new();
    if let Some(h) = history {
        let pts = points(h);
        if pts.len() >= 2 {
            lines.push(svg::LineSeries::new("observed", pts, "#222222"));
        }
    }
    let forecast_pts: Vec<(NaiveDate, f64)> = f.dates().zip(f.point.iter().copied()).collect();
    if let Some(actual) = actual {
        let pts: Vec<(NaiveDate, f64)> = f.dates().zip(actual.iter().copied()).collect();
        if pts.len() >= 2 {
            lines.push(svg::LineSeries::new("actual (test)", pts, "#1b7837"));
        }
    }
    if forecast_pts.len() >= 2 {
        lines.push(svg::LineSeries::new("predicted", forecast_pts, "#b2182b").dashed());
    }
    let band = svg::Band {
        name: format!("{:.0}% interval", f.interval_level * 100.0),
        dates: f.dates().collect(),
        lower: f.lower.clone(),
        upper: f.upper.clone(),
        color: "#ef8a62".into(),
    };
    svg::render_line_chart(title, &lines, &[band], svg::Layout::default()).map_err(|e| CliError::Output(e.to_string()))
}

fn run_forecast(config: &RunConfig, out: &mut Outputs) -> Result<String, CliError> {
    let fc = ForecastConfig { horizon: config.horizon, samples: config.samples, seed: config.seed, level: config.level };
    let mut s = String::new();
    let mut jobs: Vec<(FittedModel, Option<TimeSeries>)> = Vec::new();
    if let Some(path) = &config.model_path {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let model = model_io::from_text(&text)?;
        let history = match &config.input_path {
            Some(_) => {
                let (dataset, _) = load(config)?;
                let record = dataset.require(&model.country)?;
                let series = record.series(model.measure);
                Some(series_through(series, Some(model.train_end()))?)
            }
            None => None,
        };
        jobs.push((model, history));
    } else {
        let (dataset, _) = load(config)?;
        let record = country(&dataset, config)?;
        for &m in &config.measures {
            let train = series_through(record.series(m), config.split_date)?;
            let model = trend::fit(&train, &config.fit)?;
            jobs.push((model, Some(train)));
        }
    }
    for (model, history) in &jobs {
        let f = trend::forecast_with(model, &fc)?;
        let tag = format!("{}_{}", slug(&model.country), model.measure);
        if config.model_path.is_none() {
            out.write(&format!("model_{tag}.txt"), model_io::to_text(model).as_bytes())?;
        }
        out.write_with(&format!("forecast_{tag}.csv"), |w| f.write_csv(w))?;
        let title = format!("{} {}: {}-day forecast from {}", model.country, model.measure, f.horizon, f.start);
        out.write(&format!("forecast_{tag}.svg"), forecast_chart(&title, history.as_ref(), &f, None)?.as_bytes())?;
        let last = f.horizon - 1;
        let base = history.as_ref().and_then(|h| h.last()).map(|v| v as f64).unwrap_or_else(|| model.trend_at(model.train_length as f64 - 1.0));
        let _ = writeln!(
            s,
            "{} {}: forecast on {} = {:.0} [{:.0}, {:.0}], {:.1}/day on average",
            model.country,
            model.measure,
            f.start + chrono::Days::new(last as u64),
            f.point[last],
            f.lower[last],
            f.upper[last],
            (f.point[last] - base) / f.horizon as f64
        );
    }
    Ok(s)
}

fn describe_backtest(r: &BacktestReport) -> String {
    format!(
        "{} {}: split {}, horizon {}, rmse {:.2}; actual {:.2} x + {:.2}; predicted {:.2} x + {:.2}",
        r.model.country,
        r.model.measure,
        r.split_date,
        r.horizon,
        r.rmse,
        r.linear_fit_actual.0,
        r.linear_fit_actual.1,
        r.linear_fit_predicted.0,
        r.linear_fit_predicted.1
    )
}

fn run_backtest(config: &RunConfig, out: &mut Outputs) -> Result<String, CliError> {
    let (dataset, _) = load(config)?;
    let record = country(&dataset, config)?;
    let split_date = config.split_date.ok_or_else(|| CliError::Usage("--split-date is required".into()))?;
    let bc = BacktestConfig { samples: config.samples, seed: config.seed, level: config.level, score_on: config.score_on };
    let mut s = String::new();
    for &m in &config.measures {
        let series = record.series(m);
        let r = evaluation::backtest(series, split_date, &config.fit, &bc)?;
        let tag = format!("{}_{}", slug(record.name()), m);
        out.write_with(&format!("backtest_{tag}.csv"), |w| r.write_csv(w))?;
        out.write_with(&format!("backtest_{tag}_summary.csv"), |w| r.write_summary(w))?;
        out.write(&format!("model_{tag}.txt"), model_io::to_text(&r.model).as_bytes())?;
        let train = series_through(series, Some(split_date))?;
        let title = format!("{} {}: predicted vs actual after {}", record.name(), m, split_date);
        out.write(&format!("backtest_{tag}.svg"), forecast_chart(&title, Some(&train), &r.forecast, Some(&r.actual))?.as_bytes())?;
        let _ = writeln!(s, "{}", describe_backtest(&r));
    }
    Ok(s)
}

fn run_analyze(config: &RunConfig, out: &mut Outputs) -> Result<String, CliError> {
    let (dataset, _) = load(config)?;
    let as_of = config.as_of.unwrap_or(dataset.snapshot());
    let opts = AnalysisOptions { per_capita: config.per_capita };

    let totals = analysis::outcome_features(&dataset, as_of)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let fmt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    let csv_err = |e: csv::Error| CliError::Output(e.to_string());
    w.write_record(["country", "cases", "deaths", "tests"]).map_err(csv_err)?;
    for (i, r) in dataset.records().iter().enumerate() {
        w.write_record([r.name().to_string(), fmt(totals.cases.values[i]), fmt(totals.deaths.values[i]), fmt(totals.tests.values[i])])
            .map_err(csv_err)?;
    }
    out.write("outcomes.csv", &w.into_inner().map_err(|e| CliError::Output(e.to_string()))?)?;

    let matrix = analysis::correlation_matrix(&dataset, &config.features, as_of, &opts)?;
    out.write_with("correlation.csv", |w| matrix.write_csv(w))?;
    out.write_with("pair_counts.csv", |w| matrix.write_counts_csv(w))?;
    let title = format!("Feature correlation in all countries as of {as_of}");
    out.write("heatmap.svg", svg::render_heatmap(&title, &matrix).as_bytes())?;

    for &feature in &config.features {
        let hist = analysis::feature_distribution(&dataset, feature, config.bins, as_of, &opts)?;
        out.write_with(&format!("histograms/{}.csv", feature.name()), |w| hist.write_csv(w))?;
        let title = format!("{} ({})", feature.name(), analysis::feature_vector(&dataset, feature, as_of, &opts).units);
        out.write(&format!("histograms/{}.svg", feature.name()), svg::render_histogram(&title, &hist, svg::Layout::default()).as_bytes())?;
    }

    let mut s = String::new();
    let _ = writeln!(s, "{} countries, totals as of {as_of}", dataset.len());
    for f in &totals.fallbacks {
        let _ = writeln!(s, "note: {} {} does not cover {as_of}; used {}", f.country, f.measure, f.used);
    }
    let find = |a: Feature, b: Feature| matrix.between(a.name(), b.name());
    for (a, b) in [
        (Feature::Tests, Feature::Cases),
        (Feature::AvgTemperature, Feature::Latitude),
        (Feature::GdpPerCapita, Feature::Doctors),
        (Feature::GdpPerCapita, Feature::Cases),
    ] {
        if let Some(r) = find(a, b) {
            let _ = writeln!(s, "r({a}, {b}) = {r:.2}");
        }
    }
    Ok(s)
}

fn run_plot(config: &RunConfig, out: &mut Outputs) -> Result<String, CliError> {
    let (dataset, _) = load(config)?;
    let record = country(&dataset, config)?;
    let mut s = String::new();
    for &m in &config.measures {
        let series = record.series(m);
        let (values, kind) = if config.cumulative {
            (series.values().to_vec(), "total")
        } else {
            (daily_from_cumulative(series)?, "daily new")
        };
        let pts: Vec<(NaiveDate, f64)> = series.dates().zip(values.iter().map(|&v| v as f64)).collect();
        let color = match m {
            Measure::Cases => "#2166ac",
            Measure::Deaths => "#b2182b",
            Measure::Tests => "#1b7837",
        };
        let title = format!("{} {kind} {m}", record.name());
        let chart = svg::render_line_chart(&title, &[svg::LineSeries::new(format!("{kind} {m}"), pts, color)], &[], svg::Layout::default())
            .map_err(|e| CliError::Data(e.to_string()))?;
        let name = format!("plot_{}_{}{}.svg", slug(record.name()), m, if config.cumulative { "_total" } else { "_daily" });
        out.write(&name, chart.as_bytes())?;
        let peak = values.iter().copied().max().unwrap_or(0);
        let _ = writeln!(s, "{} {kind} {m}: peak {peak}", record.name());
    }
    Ok(s)
}
