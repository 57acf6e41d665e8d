//! Train/test splitting, RMSE scoring and backtests.

use std::io::Write;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::trend::{fit, forecast_with, FitConfig, FittedModel, Forecast, ForecastConfig};

pub fn rmse(predicted: &[f64], actual: &[f64]) -> Result<f64> {
    if predicted.len() != actual.len() {
        return Err(Error::LengthMismatch { left: predicted.len(), right: actual.len() });
    }
    if predicted.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sum: f64 = predicted.iter().zip(actual).map(|(p, a)| (p - a) * (p - a)).sum();
    Ok((sum / predicted.len() as f64).sqrt())
}

/// Train covers the start through `split_date` inclusive, test the rest.
pub fn split(series: &TimeSeries, split_date: NaiveDate) -> Result<(TimeSeries, TimeSeries)> {
    let out_of_range = || Error::SplitOutOfRange {
        date: split_date,
        start: series.start(),
        end: series.end().unwrap_or(series.start()),
    };
    let idx = series.index_of(split_date).ok_or_else(out_of_range)?;
    if idx + 1 >= series.len() {
        return Err(out_of_range());
    }
    Ok((series.slice(0..idx + 1), series.slice(idx + 1..series.len())))
}

/// Least-squares `(slope, intercept)` over `(i, values[i])`, `i` from 0.
pub fn linear_fit(values: &[f64]) -> Result<(f64, f64)> {
    let n = values.len();
    if n < 2 {
        return Err(Error::NotEnoughPoints { required: 2, found: n });
    }
    let nf = n as f64;
    let x_mean = (nf - 1.0) / 2.0;
    let y_mean = values.iter().sum::<f64>() / nf;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, &y) in values.iter().enumerate() {
        let dx = i as f64 - x_mean;
        sxy += dx * (y - y_mean);
        sxx += dx * dx;
    }
    let slope = sxy / sxx;
    Ok((slope, y_mean - slope * x_mean))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreOn {
    /// Cumulative totals, as reported.
    #[default]
    Cumulative,
    /// Daily increments, with the last training day as origin.
    Daily,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BacktestConfig {
    pub samples: usize,
    pub seed: u64,
    pub level: f64,
    pub score_on: ScoreOn,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        let f = ForecastConfig::new(1);
        Self { samples: f.samples, seed: f.seed, level: f.level, score_on: ScoreOn::Cumulative }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestReport {
    pub split_date: NaiveDate,
    pub horizon: usize,
    pub rmse: f64,
    pub score_on: ScoreOn,
    pub predicted: Vec<f64>,
    pub actual: Vec<f64>,
    pub linear_fit_predicted: (f64, f64),
    pub linear_fit_actual: (f64, f64),
    pub forecast: Forecast,
    pub model: FittedModel,
}

pub fn backtest(
    series: &TimeSeries,
    split_date: NaiveDate,
    fit_config: &FitConfig,
    config: &BacktestConfig,
) -> Result<BacktestReport> {
    let (train, test) = split(series, split_date)?;
    let model = fit(&train, fit_config)?;
    let horizon = test.len();
    let forecast = forecast_with(
        &model,
        &ForecastConfig { horizon, samples: config.samples, seed: config.seed, level: config.level },
    )?;
    let predicted = forecast.point.clone();
    let actual = test.as_f64();
    let score = match config.score_on {
        ScoreOn::Cumulative => rmse(&predicted, &actual)?,
        ScoreOn::Daily => {
            let origin = train.last().unwrap_or(0) as f64;
            rmse(&differences(origin, &predicted), &differences(origin, &actual))?
        }
    };
    let (linear_fit_predicted, linear_fit_actual) = if horizon >= 2 {
        (linear_fit(&predicted)?, linear_fit(&actual)?)
    } else {
        ((0.0, predicted[0]), (0.0, actual[0]))
    };
    Ok(BacktestReport {
        split_date,
        horizon,
        rmse: score,
        score_on: config.score_on,
        predicted,
        actual,
        linear_fit_predicted,
        linear_fit_actual,
        forecast,
        model,
    })
}

fn differences(origin: f64, values: &[f64]) -> Vec<f64> {
    let mut prev = origin;
    values
        .iter()
        .map(|&v| {
            let d = v - prev;
            prev = v;
            d
        })
        .collect()
}

impl BacktestReport {
    /// Columns `date,predicted,actual,lower,upper`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["date", "predicted", "actual", "lower", "upper"])?;
        for (i, date) in self.forecast.dates().enumerate() {
            w.write_record([
                date.to_string(),
                self.predicted[i].to_string(),
                self.actual[i].to_string(),
                self.forecast.lower[i].to_string(),
                self.forecast.upper[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Header plus one summary row.
    pub fn write_summary<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "country",
            "measure",
            "split_date",
            "horizon",
            "score_on",
            "rmse",
            "slope_predicted",
            "intercept_predicted",
            "slope_actual",
            "intercept_actual",
        ])?;
        w.write_record([
            self.model.country.clone(),
            self.model.measure.to_string(),
            self.split_date.to_string(),
            self.horizon.to_string(),
            match self.score_on {
                ScoreOn::Cumulative => "cumulative".to_string(),
                ScoreOn::Daily => "daily".to_string(),
            },
            self.rmse.to_string(),
            self.linear_fit_predicted.0.to_string(),
            self.linear_fit_predicted.1.to_string(),
            self.linear_fit_actual.0.to_string(),
            self.linear_fit_actual.1.to_string(),
        ])?;
        w.flush()?;
        Ok(())
    }
}
