//! Point forecasts and simulated uncertainty intervals.
//!
//! Each sample path draws future changepoints from a Poisson process with the
//! training changepoint frequency, places them uniformly over the horizon,
//! and gives them Laplace magnitudes whose scale is the mean absolute fitted
//! adjustment. Observation noise with the fitted residual scale is added on
//! top. Path `p` uses its own ChaCha stream, so results do not depend on the
//! order in which paths are generated.

use std::io::Write;

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use super::fit::FittedModel;
use super::logistic::{exponent, saturate};
use crate::error::{Error, Result};

pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_LEVEL: f64 = 0.8;
pub const MIN_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForecastConfig {
    pub horizon: usize,
    /// 0 disables intervals (`lower == upper == point`).
    pub samples: usize,
    pub seed: u64,
    pub level: f64,
}

impl ForecastConfig {
    pub fn new(horizon: usize) -> Self {
        Self {
            horizon,
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            level: DEFAULT_LEVEL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forecast {
    /// Date of the first forecast day.
    pub start: NaiveDate,
    pub horizon: usize,
    pub point: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub interval_level: f64,
}

impl Forecast {
    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        (0..self.horizon).map(|i| self.start + Days::new(i as u64))
    }

    /// Columns `date,point,lower,upper`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["date", "point", "lower", "upper"])?;
        for (i, date) in self.dates().enumerate() {
            w.write_record([
                date.to_string(),
                self.point[i].to_string(),
                self.lower[i].to_string(),
                self.upper[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn forecast(model: &FittedModel, horizon: usize, samples: usize, seed: u64) -> Result<Forecast> {
    forecast_with(model, &ForecastConfig { horizon, samples, seed, level: DEFAULT_LEVEL })
}

pub fn forecast_with(model: &FittedModel, config: &ForecastConfig) -> Result<Forecast> {
    if config.horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    if config.samples != 0 && config.samples < MIN_SAMPLES {
        return Err(Error::InvalidParams(format!(
            "at least {MIN_SAMPLES} samples are required for intervals, got {}",
            config.samples
        )));
    }
    if !(config.level > 0.0 && config.level < 1.0) {
        return Err(Error::InvalidParams(format!("interval level must be in (0, 1), got {}", config.level)));
    }

    let origin = model.train_length as f64;
    let times: Vec<f64> = (0..config.horizon).map(|i| origin + i as f64).collect();
    let cps = model.grid.as_f64();
    let p = &model.params;
    let z: Vec<f64> = times.iter().map(|&t| exponent(t, p.k, p.m, &p.delta, &cps)).collect();
    let caps: Vec<f64> = times.iter().map(|&t| model.capacity.at(t)).collect();
    let point: Vec<f64> = z.iter().zip(&caps).map(|(&z, &c)| saturate(c, z).max(0.0)).collect();

    let (mut lower, mut upper) = if config.samples == 0 {
        (point.clone(), point.clone())
    } else {
        simulate_bounds(model, &times, &z, &caps, config)?
    };
    for i in 0..config.horizon {
        lower[i] = lower[i].min(point[i]).max(0.0);
        upper[i] = upper[i].max(point[i]);
    }

    Ok(Forecast {
        start: model.train_end() + Days::new(1),
        horizon: config.horizon,
        point,
        lower,
        upper,
        interval_level: config.level,
    })
}

fn simulate_bounds(
    model: &FittedModel,
    times: &[f64],
    z: &[f64],
    caps: &[f64],
    config: &ForecastConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let horizon = times.len();
    let origin = times[0] - 1.0;
    let expected = model.changepoint_rate() * horizon as f64;
    let scale = if model.params.delta.is_empty() {
        0.0
    } else {
        model.params.delta.iter().map(|d| d.abs()).sum::<f64>() / model.params.delta.len() as f64
    };
    let noise = Normal::new(0.0, model.params.sigma)
        .map_err(|e| Error::InvalidParams(format!("residual scale: {e}")))?;
    let poisson = if expected > 0.0 && scale > 0.0 {
        Some(Poisson::new(expected).map_err(|e| Error::InvalidParams(format!("changepoint rate: {e}")))?)
    } else {
        None
    };

    // paths[d * samples + p] keeps each day's draws contiguous for the quantiles
    let mut paths = vec![0.0; horizon * config.samples];
    let mut new_cps: Vec<(f64, f64)> = Vec::new();
    for path in 0..config.samples {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(path as u64);
        new_cps.clear();
        if let Some(poisson) = &poisson {
            let count = poisson.sample(&mut rng) as usize;
            for _ in 0..count {
                let at = origin + rng.random::<f64>() * horizon as f64;
                new_cps.push((at, laplace(&mut rng, scale)));
            }
        }
        for d in 0..horizon {
            let t = times[d];
            let mut zt = z[d];
            for &(s, delta) in &new_cps {
                if t >= s {
                    zt += delta * (t - s);
                }
            }
            paths[d * config.samples + path] = saturate(caps[d], zt) + noise.sample(&mut rng);
        }
    }

    let tail = (1.0 - config.level) / 2.0;
    let mut lower = Vec::with_capacity(horizon);
    let mut upper = Vec::with_capacity(horizon);
    for day in paths.chunks_mut(config.samples) {
        day.sort_by(f64::total_cmp);
        lower.push(quantile_sorted(day, tail));
        upper.push(quantile_sorted(day, 1.0 - tail));
    }
    Ok((lower, upper))
}

/// Laplace(0, b) by inversion.
fn laplace<R: Rng>(rng: &mut R, b: f64) -> f64 {
    let u: f64 = rng.random::<f64>() - 0.5;
    -b * u.signum() * (1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE).ln()
}

/// Linear interpolation between order statistics (Hyndman-Fan type 7).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}
