//! Flags, config file and their resolution into a [`RunConfig`].
//!
//! Precedence: command-line flags, then the `--config` TOML file, then
//! built-in defaults. The default output directory can also come from
//! `EPICURVE_OUTPUT_DIR`, which sits between the config file and the
//! built-in `epicurve-out`.
//!
//! Config file keys (all optional):
//!
//! ```toml
//! input = "data/world_snapshot_2020-05-19.csv"
//! output_dir = "out"
//! model = "out/model_cases.txt"
//! country = "Algeria"
//! measure = "cases"          # cases, deaths, tests or both
//! split_date = "2020-05-04"
//! as_of = "2020-05-19"
//! horizon = 30
//! seed = 42
//! samples = 1000
//! level = 0.8
//! score = "cumulative"       # or daily
//! bins = 10
//! per_capita = false
//! cumulative = false
//! features = ["tests", "cases", "deaths"]
//!
//! [ingest]
//! strict_geography = false
//! synthesize_algeria_tests = true
//! leading_gap = "zero"       # or keep
//!
//! [fit]
//! max_changepoints = 25
//! changepoint_range = 0.8
//! tau = 0.05
//! capacity = "cubic_rule"    # or { constant = 10000.0 }
//! starts = 3
//! max_iterations = 10000
//! ```
//!
//! The top-level `seed` also seeds the fitter's multi-starts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use epicurve::analysis::Feature;
use epicurve::evaluation::ScoreOn;
use epicurve::ingest::{IngestConfig, LeadingGap};
use epicurve::trend::{CapacityMode, FitConfig};
use epicurve::Measure;
use serde::Deserialize;

use crate::error::CliError;

pub const OUTPUT_DIR_ENV: &str = "EPICURVE_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "epicurve-out";
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_HORIZON: usize = 30;
pub const DEFAULT_BINS: usize = 10;
pub const DEFAULT_LEVEL: f64 = 0.8;

#[derive(Debug, Parser)]
#[command(name = "epicurve", version, about = "Saturating-growth forecasts and cross-country analysis of epidemic counts")]
pub struct Cli {
    /// TOML config file; flags override its keys.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Directory for all outputs (else config file, then $EPICURVE_OUTPUT_DIR, then epicurve-out)
    #[arg(long, global = true, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and repair a dataset; write the canonical CSV and imputation report.
    Ingest(IngestArgs),
    /// Fit the trend model to one country's series.
    Fit(FitArgs),
    /// Forecast ahead from a fitted or saved model.
    Forecast(ForecastArgs),
    /// Fit up to a split date and score the forecast on the rest.
    Backtest(BacktestArgs),
    /// Correlation matrix, heatmap and feature histograms.
    Analyze(AnalyzeArgs),
    /// Chart a country's daily or cumulative series.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum MeasureArg {
    Cases,
    Deaths,
    Tests,
    Both,
}

impl MeasureArg {
    fn measures(self) -> Vec<Measure> {
        match self {
            MeasureArg::Cases => vec![Measure::Cases],
            MeasureArg::Deaths => vec![Measure::Deaths],
            MeasureArg::Tests => vec![Measure::Tests],
            MeasureArg::Both => vec![Measure::Cases, Measure::Deaths],
        }
    }
}

impl std::str::FromStr for MeasureArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <MeasureArg as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum ScoreArg {
    Cumulative,
    Daily,
}

#[derive(Debug, Clone, Args, Default)]
pub struct InputArgs {
    /// Dataset CSV (long or list layout).
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Enforce the dataset's coordinate envelope.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", require_equals = true, value_name = "BOOL")]
    pub strict_geography: Option<bool>,
    /// Synthesize the missing Algeria test series.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", require_equals = true, value_name = "BOOL")]
    pub synthesize_tests: Option<bool>,
    /// Cases/deaths before the first report: zero, or keep missing.
    #[arg(long, value_name = "POLICY")]
    pub leading_gap: Option<LeadingGapArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum LeadingGapArg {
    Zero,
    Keep,
}

#[derive(Debug, Clone, Args, Default)]
pub struct SeriesArgs {
    #[arg(long)]
    pub country: Option<String>,
    /// cases, deaths, tests, or both (cases and deaths, fitted separately).
    #[arg(long, value_name = "MEASURE")]
    pub measure: Option<MeasureArg>,
}

#[derive(Debug, Clone, Args, Default)]
pub struct FitFlags {
    /// Upper bound on changepoints.
    #[arg(long, value_name = "N")]
    pub changepoints: Option<usize>,
    /// Laplace scale of rate adjustments.
    #[arg(long)]
    pub tau: Option<f64>,
    /// `cubic` or a positive constant.
    #[arg(long, value_name = "cubic|VALUE")]
    pub capacity: Option<String>,
    #[arg(long, value_name = "N")]
    pub starts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub input: InputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub series: SeriesArgs,
    /// Last training date (default: end of series).
    #[arg(long, value_name = "DATE")]
    pub split_date: Option<NaiveDate>,
    #[command(flatten)]
    pub fit: FitFlags,
}

#[derive(Debug, Clone, Args)]
pub struct ForecastArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub series: SeriesArgs,
    /// Saved model to forecast from instead of fitting.
    #[arg(long, value_name = "PATH")]
    pub model: Option<PathBuf>,
    /// Last training date when fitting (default: end of series).
    #[arg(long, value_name = "DATE")]
    pub split_date: Option<NaiveDate>,
    #[arg(long, value_name = "DAYS")]
    pub horizon: Option<usize>,
    #[arg(long, value_name = "N")]
    pub samples: Option<usize>,
    #[arg(long)]
    pub level: Option<f64>,
    #[command(flatten)]
    pub fit: FitFlags,
}

#[derive(Debug, Clone, Args)]
pub struct BacktestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub series: SeriesArgs,
    #[arg(long, value_name = "DATE")]
    pub split_date: Option<NaiveDate>,
    #[arg(long, value_name = "N")]
    pub samples: Option<usize>,
    #[arg(long)]
    pub level: Option<f64>,
    /// Score cumulative totals (default) or daily increments.
    #[arg(long)]
    pub score: Option<ScoreArg>,
    #[command(flatten)]
    pub fit: FitFlags,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Date of the outcome totals (default: snapshot date).
    #[arg(long, value_name = "DATE")]
    pub as_of: Option<NaiveDate>,
    #[arg(long, value_name = "N")]
    pub bins: Option<usize>,
    /// Divide outcome totals by population.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", require_equals = true, value_name = "BOOL")]
    pub per_capita: Option<bool>,
    /// Comma-separated features (default: all).
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    pub features: Option<Vec<String>>,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub series: SeriesArgs,
    /// Plot cumulative totals instead of daily increments.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", require_equals = true, value_name = "BOOL")]
    pub cumulative: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub country: Option<String>,
    pub measure: Option<String>,
    pub split_date: Option<String>,
    pub as_of: Option<String>,
    pub horizon: Option<usize>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub level: Option<f64>,
    pub score: Option<String>,
    pub bins: Option<usize>,
    pub per_capita: Option<bool>,
    pub cumulative: Option<bool>,
    pub features: Option<Vec<String>>,
    pub ingest: Option<IngestConfig>,
    pub fit: Option<FitConfig>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubcommandKind {
    Ingest,
    Fit,
    Forecast,
    Backtest,
    Analyze,
    Plot,
}

impl SubcommandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SubcommandKind::Ingest => "ingest",
            SubcommandKind::Fit => "fit",
            SubcommandKind::Forecast => "forecast",
            SubcommandKind::Backtest => "backtest",
            SubcommandKind::Analyze => "analyze",
            SubcommandKind::Plot => "plot",
        }
    }
}

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: SubcommandKind,
    pub input_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub country: Option<String>,
    pub measures: Vec<Measure>,
    pub split_date: Option<NaiveDate>,
    pub as_of: Option<NaiveDate>,
    pub horizon: usize,
    pub seed: u64,
    pub samples: usize,
    pub level: f64,
    pub score_on: ScoreOn,
    pub model_path: Option<PathBuf>,
    pub bins: usize,
    pub per_capita: bool,
    pub cumulative: bool,
    pub features: Vec<Feature>,
    pub ingest: IngestConfig,
    pub fit: FitConfig,
}

fn parse_date(key: &str, raw: &str) -> Result<NaiveDate, CliError> {
    raw.parse().map_err(|e| CliError::Usage(format!("{key} = {raw:?}: {e}")))
}

fn parse_capacity(raw: &str) -> Result<CapacityMode, CliError> {
    if raw.eq_ignore_ascii_case("cubic") || raw.eq_ignore_ascii_case("cubic_rule") {
        return Ok(CapacityMode::CubicRule);
    }
    match raw.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(CapacityMode::Constant(v)),
        _ => Err(CliError::Usage(format!("capacity must be `cubic` or a positive number, got {raw:?}"))),
    }
}

impl RunConfig {
    /// Merges flags over `file` over defaults. `env_output_dir` is the value
    /// of [`OUTPUT_DIR_ENV`], if set.
    pub fn resolve(cli: &Cli, file: &FileConfig, env_output_dir: Option<PathBuf>) -> Result<Self, CliError> {
        let (kind, input, series, fit_flags) = match &cli.command {
            Command::Ingest(a) => (SubcommandKind::Ingest, &a.input, None, None),
            Command::Fit(a) => (SubcommandKind::Fit, &a.input, Some(&a.series), Some(&a.fit)),
            Command::Forecast(a) => (SubcommandKind::Forecast, &a.input, Some(&a.series), Some(&a.fit)),
            Command::Backtest(a) => (SubcommandKind::Backtest, &a.input, Some(&a.series), Some(&a.fit)),
            Command::Analyze(a) => (SubcommandKind::Analyze, &a.input, None, None),
            Command::Plot(a) => (SubcommandKind::Plot, &a.input, Some(&a.series), None),
        };

        let file_split = file.split_date.as_deref().map(|s| parse_date("split_date", s)).transpose()?;
        let file_as_of = file.as_of.as_deref().map(|s| parse_date("as_of", s)).transpose()?;
        let file_measure = file
            .measure
            .as_deref()
            .map(|s| s.parse::<MeasureArg>().map_err(|e| CliError::Usage(format!("measure: {e}"))))
            .transpose()?;
        let file_score = match file.score.as_deref() {
            None => None,
            Some("cumulative") => Some(ScoreOn::Cumulative),
            Some("daily") => Some(ScoreOn::Daily),
            Some(other) => return Err(CliError::Usage(format!("score must be cumulative or daily, got {other:?}"))),
        };

        let mut ingest = file.ingest.clone().unwrap_or_default();
        if let Some(v) = input.strict_geography {
            ingest.strict_geography = v;
        }
        if let Some(v) = input.synthesize_tests {
            ingest.synthesize_algeria_tests = v;
        }
        if let Some(v) = input.leading_gap {
            ingest.leading_gap = match v {
                LeadingGapArg::Zero => LeadingGap::Zero,
                LeadingGapArg::Keep => LeadingGap::Keep,
            };
        }

        let seed = fit_flags.and_then(|f| f.seed).or(file.seed).unwrap_or(DEFAULT_SEED);
        let mut fit = file.fit.clone().unwrap_or_default();
        fit.seed = seed;
        if let Some(f) = fit_flags {
            if let Some(v) = f.changepoints {
                fit.max_changepoints = v;
            }
            if let Some(v) = f.tau {
                fit.tau = v;
            }
            if let Some(v) = f.starts {
                fit.starts = v;
            }
            if let Some(v) = &f.capacity {
                fit.capacity = parse_capacity(v)?;
            }
        }

        let (split_flag, as_of_flag, horizon_flag, samples_flag, level_flag, model_flag, score_flag) = match &cli.command {
            Command::Fit(a) => (a.split_date, None, None, None, None, None, None),
            Command::Forecast(a) => (a.split_date, None, a.horizon, a.samples, a.level, a.model.clone(), None),
            Command::Backtest(a) => (a.split_date, None, None, a.samples, a.level, None, a.score),
            Command::Analyze(a) => (None, a.as_of, None, None, None, None, None),
            _ => (None, None, None, None, None, None, None),
        };
        let (bins_flag, per_capita_flag, features_flag, cumulative_flag) = match &cli.command {
            Command::Analyze(a) => (a.bins, a.per_capita, a.features.clone(), None),
            Command::Plot(a) => (None, None, None, a.cumulative),
            _ => (None, None, None, None),
        };

        let measure = series.and_then(|s| s.measure).or(file_measure);
        let measures = match (kind, measure) {
            (_, Some(m)) => m.measures(),
            (SubcommandKind::Fit | SubcommandKind::Forecast | SubcommandKind::Backtest | SubcommandKind::Plot, None) => {
                MeasureArg::Both.measures()
            }
            _ => Vec::new(),
        };

        let features = match features_flag.or_else(|| file.features.clone()) {
            Some(names) => names
                .iter()
                .map(|n| n.parse::<Feature>().map_err(|e| CliError::Usage(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?,
            None => Feature::ALL.to_vec(),
        };

        let config = RunConfig {
            subcommand: kind,
            input_path: input.input.clone().or_else(|| file.input.clone()),
            output_dir: cli
                .output_dir
                .clone()
                .or_else(|| file.output_dir.clone())
                .or(env_output_dir)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
            country: series.and_then(|s| s.country.clone()).or_else(|| file.country.clone()),
            measures,
            split_date: split_flag.or(file_split),
            as_of: as_of_flag.or(file_as_of),
            horizon: horizon_flag.or(file.horizon).unwrap_or(DEFAULT_HORIZON),
            seed,
            samples: samples_flag.or(file.samples).unwrap_or(DEFAULT_SAMPLES),
            level: level_flag.or(file.level).unwrap_or(DEFAULT_LEVEL),
            score_on: score_flag
                .map(|s| match s {
                    ScoreArg::Cumulative => ScoreOn::Cumulative,
                    ScoreArg::Daily => ScoreOn::Daily,
                })
                .or(file_score)
                .unwrap_or_default(),
            model_path: model_flag.or_else(|| file.model.clone()),
            bins: bins_flag.or(file.bins).unwrap_or(DEFAULT_BINS),
            per_capita: per_capita_flag.or(file.per_capita).unwrap_or(false),
            cumulative: cumulative_flag.or(file.cumulative).unwrap_or(false),
            features,
            ingest,
            fit,
        };
        config.validate()?;
        Ok(config)
    }

    /// Checks that each subcommand has what it needs before any work starts.
    pub fn validate(&self) -> Result<(), CliError> {
        use SubcommandKind as K;
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(CliError::Usage(format!("{} requires {what}", self.subcommand.as_str())))
            }
        };
        let from_model = self.subcommand == K::Forecast && self.model_path.is_some();
        need(self.input_path.is_some() || from_model, "--input")?;
        match self.subcommand {
            K::Fit | K::Backtest | K::Plot => need(self.country.is_some(), "--country")?,
            K::Forecast => need(self.country.is_some() || from_model, "--country or --model")?,
            K::Ingest | K::Analyze => {}
        }
        if self.subcommand == K::Backtest {
            need(self.split_date.is_some(), "--split-date")?;
        }
        if self.subcommand == K::Forecast && self.horizon == 0 {
            return Err(CliError::Usage("--horizon must be at least 1".into()));
        }
        if self.subcommand == K::Analyze {
            need(self.bins >= 1, "--bins of at least 1")?;
            need(self.features.len() >= 2, "at least two features")?;
        }
        Ok(())
    }

    /// `key = value` lines echoed into the manifest.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
        let _ = writeln!(out, "subcommand = {}", self.subcommand.as_str());
        let _ = writeln!(out, "input = {}", opt(self.input_path.as_ref().map(|p| p.display().to_string())));
        let _ = writeln!(out, "output_dir = {}", self.output_dir.display());
        let _ = writeln!(out, "model = {}", opt(self.model_path.as_ref().map(|p| p.display().to_string())));
        let _ = writeln!(out, "country = {}", opt(self.country.clone()));
        let measures: Vec<&str> = self.measures.iter().map(|m| m.as_str()).collect();
        let _ = writeln!(out, "measures = {}", measures.join(","));
        let _ = writeln!(out, "split_date = {}", opt(self.split_date.map(|d| d.to_string())));
        let _ = writeln!(out, "as_of = {}", opt(self.as_of.map(|d| d.to_string())));
        let _ = writeln!(out, "horizon = {}", self.horizon);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "samples = {}", self.samples);
        let _ = writeln!(out, "level = {}", self.level);
        let _ = writeln!(out, "score = {}", match self.score_on { ScoreOn::Cumulative => "cumulative", ScoreOn::Daily => "daily" });
        let _ = writeln!(out, "bins = {}", self.bins);
        let _ = writeln!(out, "per_capita = {}", self.per_capita);
        let _ = writeln!(out, "cumulative = {}", self.cumulative);
        let features: Vec<&str> = self.features.iter().map(|f| f.name()).collect();
        let _ = writeln!(out, "features = {}", features.join(","));
        let i = &self.ingest;
        let _ = writeln!(out, "ingest.strict_geography = {}", i.strict_geography);
        let _ = writeln!(out, "ingest.synthesize_algeria_tests = {}", i.synthesize_algeria_tests);
        let _ = writeln!(out, "ingest.leading_gap = {:?}", i.leading_gap);
        let f = &self.fit;
        let _ = writeln!(out, "fit.max_changepoints = {}", f.max_changepoints);
        let _ = writeln!(out, "fit.changepoint_range = {}", f.changepoint_range);
        let _ = writeln!(out, "fit.tau = {}", f.tau);
        let _ = writeln!(out, "fit.capacity = {:?}", f.capacity);
        let _ = writeln!(out, "fit.capacity_floor = {}", opt(f.capacity_floor.map(|v| v.to_string())));
        let _ = writeln!(out, "fit.starts = {}", f.starts);
        let _ = writeln!(out, "fit.max_iterations = {}", f.max_iterations);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("epicurve").chain(args.iter().copied())).unwrap()
    }

    fn file(text: &str) -> FileConfig {
        toml::from_str(text).unwrap()
    }

    #[test]
    fn defaults_when_nothing_is_given() {
        let cli = parse(&["forecast", "--input", "x.csv", "--country", "Algeria"]);
        let rc = RunConfig::resolve(&cli, &FileConfig::default(), None).unwrap();
        assert_eq!(rc.output_dir, PathBuf::from(DEFAULT_OUTPUT_DIR));
        assert_eq!(rc.seed, DEFAULT_SEED);
        assert_eq!(rc.fit.seed, DEFAULT_SEED);
        assert_eq!(rc.samples, DEFAULT_SAMPLES);
        assert_eq!(rc.horizon, DEFAULT_HORIZON);
        assert_eq!(rc.measures, vec![Measure::Cases, Measure::Deaths]);
        rc.validate().unwrap();
    }

    #[test]
    fn flag_beats_file_beats_env() {
        let f = file("output_dir = \"from-file\"\nseed = 7\nhorizon = 12\n[fit]\ntau = 0.1\n");
        let cli = parse(&["forecast", "--input", "x.csv", "--country", "Algeria", "--seed", "9"]);
        let rc = RunConfig::resolve(&cli, &f, Some(PathBuf::from("from-env"))).unwrap();
        assert_eq!(rc.output_dir, PathBuf::from("from-file"));
        assert_eq!(rc.seed, 9);
        assert_eq!(rc.fit.seed, 9);
        assert_eq!(rc.horizon, 12);
        assert_eq!(rc.fit.tau, 0.1);

        let cli = parse(&["--output-dir", "from-flag", "forecast", "--input", "x.csv", "--country", "Algeria"]);
        let rc = RunConfig::resolve(&cli, &f, Some(PathBuf::from("from-env"))).unwrap();
        assert_eq!(rc.output_dir, PathBuf::from("from-flag"));
        assert_eq!(rc.seed, 7);

        let cli = parse(&["ingest", "--input", "x.csv"]);
        let rc = RunConfig::resolve(&cli, &FileConfig::default(), Some(PathBuf::from("from-env"))).unwrap();
        assert_eq!(rc.output_dir, PathBuf::from("from-env"));
    }

    #[test]
    fn unknown_file_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("sead = 3\n").is_err());
        assert!(toml::from_str::<FileConfig>("[fit]\ntaw = 3\n").is_err());
    }

    #[test]
    fn missing_required_options_fail_validation() {
        let code = |args: &[&str]| match RunConfig::resolve(&parse(args), &FileConfig::default(), None) {
            Ok(rc) => rc.validate().unwrap_err().exit_code(),
            Err(e) => e.exit_code(),
        };
        assert_eq!(code(&["backtest", "--input", "x.csv", "--country", "Algeria"]), 2);
        assert_eq!(code(&["fit", "--input", "x.csv"]), 2);
        assert_eq!(code(&["analyze"]), 2);
    }

    #[test]
    fn bad_file_values_are_usage_errors() {
        let cli = parse(&["backtest", "--input", "x.csv", "--country", "Algeria"]);
        let err = RunConfig::resolve(&cli, &file("split_date = \"May 4\"\n"), None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = RunConfig::resolve(&cli, &file("measure = \"recovered\"\n"), None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
