use chrono::{Days, NaiveDate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::capacity::{CapacityMode, CapacitySchedule};
use super::lbfgs::{minimize, LbfgsOptions};
use super::logistic::{exponent, saturate, ChangepointGrid, TrendParams};
use super::objective::Problem;
use crate::error::{Error, Result};
use crate::series::{Measure, TimeSeries};

pub const MIN_OBSERVATIONS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    /// Upper bound on changepoints; the grid also caps at `n / 4`.
    pub max_changepoints: usize,
    /// Fraction of the training window that may hold changepoints.
    pub changepoint_range: f64,
    /// Laplace scale of the rate adjustments, in scaled units.
    pub tau: f64,
    pub capacity: CapacityMode,
    /// Defaults to the training maximum plus one.
    pub capacity_floor: Option<f64>,
    pub starts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    pub rel_tolerance: f64,
    pub grad_tolerance: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_changepoints: 25,
            changepoint_range: 0.8,
            tau: 0.05,
            capacity: CapacityMode::CubicRule,
            capacity_floor: None,
            starts: 3,
            seed: 42,
            max_iterations: 10_000,
            rel_tolerance: 1e-9,
            grad_tolerance: 1e-8,
        }
    }
}

impl FitConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidParams(format!("tau must be positive, got {}", self.tau)));
        }
        if !(0.0..=1.0).contains(&self.changepoint_range) {
            return Err(Error::InvalidParams(format!(
                "changepoint range must be in [0, 1], got {}",
                self.changepoint_range
            )));
        }
        if self.starts == 0 {
            return Err(Error::InvalidParams("at least one start is required".into()));
        }
        Ok(())
    }
}

/// Outcome of one optimizer start, in day units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartSummary {
    pub k: f64,
    pub m: f64,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub country: String,
    pub measure: Measure,
    pub params: TrendParams,
    pub grid: ChangepointGrid,
    pub capacity: CapacitySchedule,
    pub train_start: NaiveDate,
    pub train_length: usize,
    pub objective_value: f64,
    pub converged: bool,
    pub iterations: usize,
    pub starts: Vec<StartSummary>,
}

impl FittedModel {
    /// Trend at day index `t` counted from `train_start`.
    pub fn trend_at(&self, t: f64) -> f64 {
        let z = exponent(t, self.params.k, self.params.m, &self.params.delta, &self.grid.as_f64());
        saturate(self.capacity.at(t), z)
    }

    pub fn fitted(&self) -> Vec<f64> {
        (0..self.train_length).map(|i| self.trend_at(i as f64)).collect()
    }

    pub fn train_end(&self) -> NaiveDate {
        self.train_start + Days::new(self.train_length as u64 - 1)
    }

    /// Expected changepoints per day over the training window.
    pub fn changepoint_rate(&self) -> f64 {
        self.grid.len() as f64 / self.train_length as f64
    }
}

/// Fits the trend to every value of `series`.
pub fn fit(series: &TimeSeries, config: &FitConfig) -> Result<FittedModel> {
    fit_values(series.country(), series.measure(), series.start(), series.values(), config)
}

pub fn fit_values(
    country: &str,
    measure: Measure,
    start: NaiveDate,
    values: &[u64],
    config: &FitConfig,
) -> Result<FittedModel> {
    config.validate()?;
    let n = values.len();
    if n < MIN_OBSERVATIONS {
        return Err(Error::TooShort { required: MIN_OBSERVATIONS, found: n });
    }
    let y: Vec<f64> = values.iter().map(|&v| v as f64).collect();
    let y_max = y.iter().cloned().fold(f64::MIN, f64::max);
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::FlatTrend(y[0]));
    }

    let floor = config.capacity_floor.unwrap_or(y_max + 1.0);
    let capacity = CapacitySchedule::new(config.capacity.clone(), floor)?;
    let grid = ChangepointGrid::uniform(n, config.max_changepoints, config.changepoint_range);

    let span = (n - 1) as f64;
    let problem = Problem {
        t: (0..n).map(|i| i as f64 / span).collect(),
        y: y.iter().map(|v| v / y_max).collect(),
        cap: (0..n).map(|i| capacity.at(i as f64) / y_max).collect(),
        changepoints: grid.as_f64().iter().map(|s| s / span).collect(),
        tau: config.tau,
    };

    let opts = LbfgsOptions {
        max_iterations: config.max_iterations,
        rel_tolerance: config.rel_tolerance,
        grad_tolerance: config.grad_tolerance,
        ..LbfgsOptions::default()
    };

    let mut summaries = Vec::with_capacity(config.starts);
    let mut best: Option<super::lbfgs::Minimum> = None;
    for (k0, m0) in initial_points(&y, &capacity, config) {
        let mut x0 = vec![0.0; problem.dim()];
        x0[0] = k0 * span;
        x0[1] = m0 / span;
        let min = minimize(|x| problem.value_and_gradient(x), &x0, &opts);
        summaries.push(StartSummary {
            k: min.x[0] / span,
            m: min.x[1] * span,
            objective: min.value,
            iterations: min.iterations,
            converged: min.converged(),
        });
        if best.as_ref().is_none_or(|b| min.value < b.value) {
            best = Some(min);
        }
    }
    let best = best.expect("at least one start");

    let sigma = ((problem.ssr(&best.x) / n as f64).sqrt() * y_max).max(f64::EPSILON * y_max);
    let delta: Vec<f64> = best.x[2..].iter().map(|d| d / span).collect();
    let params = TrendParams::new(best.x[0] / span, best.x[1] * span, delta, &grid, sigma)?;

    Ok(FittedModel {
        country: country.to_string(),
        measure,
        params,
        grid,
        capacity,
        train_start: start,
        train_length: n,
        objective_value: best.value,
        converged: best.converged(),
        iterations: best.iterations,
        starts: summaries,
    })
}

/// Closed-form warm starts `(k, m)` in day units.
///
/// The first uses the half-maximum day for `m`; the second takes `m` from
/// the intercept of the logit regression; later ones jitter the first.
fn initial_points(y: &[f64], capacity: &CapacitySchedule, config: &FitConfig) -> Vec<(f64, f64)> {
    let n = y.len();
    let span = (n - 1) as f64;
    let last = y[n - 1];
    let m_half = y.iter().position(|&v| v > last / 2.0).unwrap_or(n / 2) as f64;

    let (mut sx, mut sy, mut sxx, mut sxy, mut count) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, &v) in y.iter().enumerate() {
        let c = capacity.at(i as f64);
        if v > 0.0 && v < c {
            let t = i as f64;
            let l = (v / (c - v)).ln();
            sx += t;
            sy += l;
            sxx += t * t;
            sxy += t * l;
            count += 1.0;
        }
    }
    let denom = count * sxx - sx * sx;
    let (slope, intercept) = if count >= 2.0 && denom > 0.0 {
        let b = (count * sxy - sx * sy) / denom;
        (b, (sy - b * sx) / count)
    } else {
        (f64::NAN, f64::NAN)
    };
    let k0 = if slope.is_finite() && slope > 0.0 { slope } else { 8.0 / span };
    let m_ls = if slope.is_finite() && slope > 0.0 && intercept.is_finite() {
        -intercept / slope
    } else {
        m_half + 0.1 * span
    };

    let mut points = vec![(k0, m_half)];
    if config.starts > 1 {
        points.push((k0, m_ls));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    while points.len() < config.starts {
        let a: f64 = StandardNormal.sample(&mut rng);
        let b: f64 = StandardNormal.sample(&mut rng);
        points.push((k0 * (0.25 * a).exp(), m_half + 0.1 * span * b));
    }
    points
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date() -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 3, 1).unwrap()
    }

    #[test]
    fn rejects_short_and_flat_series() {
        let cfg = FitConfig::default();
        assert_eq!(
            fit_values("X", Measure::Cases, date(), &[1, 2, 3], &cfg),
            Err(Error::TooShort { required: 8, found: 3 })
        );
        assert_eq!(fit_values("X", Measure::Cases, date(), &[7; 12], &cfg), Err(Error::FlatTrend(7.0)));
    }

    #[test]
    fn fitted_values_stay_below_capacity() {
        let values: Vec<u64> = (0..40u64).map(|i| i * i + 3 * i).collect();
        let model = fit_values("X", Measure::Cases, date(), &values, &FitConfig::default()).unwrap();
        for (i, v) in model.fitted().iter().enumerate() {
            assert!(v.is_finite() && *v > 0.0 && *v < model.capacity.at(i as f64));
        }
        assert_eq!(model.starts.len(), 3);
        assert_eq!(model.params.delta.len(), model.grid.len());
        assert_eq!(model.train_end(), date() + Days::new(39));
    }

    #[test]
    fn fit_is_deterministic() {
        let values: Vec<u64> = (0..30u64).map(|i| 5 * i * i + (i % 3)).collect();
        let a = fit_values("X", Measure::Deaths, date(), &values, &FitConfig::default()).unwrap();
        let b = fit_values("X", Measure::Deaths, date(), &values, &FitConfig::default()).unwrap();
        assert_eq!(a, b);
    }
}
