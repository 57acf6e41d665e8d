//! Plain-text model files.
//!
//! One `key = value` pair per line; lines starting with `#` are comments.
//! Lists are comma separated. Floats use Rust's shortest round-trip formatting, so a saved
//! model reloads bit-exactly.
//!
//! ```text
//! format = 1
//! country = Algeria
//! measure = cases
//! train_start = 2020-02-26
//! train_length = 69
//! k = 0.061
//! m = 31.2
//! sigma = 40.5
//! delta = 0.0, -0.01
//! gamma = 0.0, 1.7
//! changepoints = 3, 6
//! capacity_mode = cubic_rule
//! capacity_floor = 4649.0
//! objective_value = -120.4
//! converged = true
//! iterations = 57
//! start.0 = k, m, objective, iterations, converged
//! ```
//!
//! `capacity_mode = constant` adds `capacity_constant = <value>`;
//! `capacity_mode = user_table` adds `capacity_table = t:c, t:c, ..`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use chrono::NaiveDate;

use super::capacity::{CapacityMode, CapacitySchedule};
use super::fit::{FittedModel, StartSummary};
use super::logistic::{ChangepointGrid, TrendParams};
use crate::error::{Error, Result};
use crate::series::Measure;

const FORMAT_VERSION: u32 = 1;

fn join<T: std::fmt::Debug>(items: &[T]) -> String {
    items.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(", ")
}

pub fn to_text(model: &FittedModel) -> String {
    let mut out = String::new();
    let p = &model.params;
    let _ = writeln!(out, "# epicurve trend model");
    let _ = writeln!(out, "format = {FORMAT_VERSION}");
    let _ = writeln!(out, "country = {}", model.country);
    let _ = writeln!(out, "measure = {}", model.measure);
    let _ = writeln!(out, "train_start = {}", model.train_start);
    let _ = writeln!(out, "train_length = {}", model.train_length);
    let _ = writeln!(out, "k = {:?}", p.k);
    let _ = writeln!(out, "m = {:?}", p.m);
    let _ = writeln!(out, "sigma = {:?}", p.sigma);
    let _ = writeln!(out, "delta = {}", join(&p.delta));
    let _ = writeln!(out, "gamma = {}", join(&p.gamma));
    let _ = writeln!(out, "changepoints = {}", join(model.grid.locations()));
    match model.capacity.mode() {
        CapacityMode::CubicRule => {
            let _ = writeln!(out, "capacity_mode = cubic_rule");
        }
        CapacityMode::Constant(c) => {
            let _ = writeln!(out, "capacity_mode = constant");
            let _ = writeln!(out, "capacity_constant = {c:?}");
        }
        CapacityMode::UserTable(knots) => {
            let table: Vec<String> = knots.iter().map(|(t, c)| format!("{t:?}:{c:?}")).collect();
            let _ = writeln!(out, "capacity_mode = user_table");
            let _ = writeln!(out, "capacity_table = {}", table.join(", "));
        }
    }
    let _ = writeln!(out, "capacity_floor = {:?}", model.capacity.floor());
    let _ = writeln!(out, "objective_value = {:?}", model.objective_value);
    let _ = writeln!(out, "converged = {}", model.converged);
    let _ = writeln!(out, "iterations = {}", model.iterations);
    for (i, s) in model.starts.iter().enumerate() {
        let _ = writeln!(
            out,
            "start.{i} = {:?}, {:?}, {:?}, {}, {}",
            s.k, s.m, s.objective, s.iterations, s.converged
        );
    }
    out
}

struct Fields(HashMap<String, String>);

impl Fields {
    fn raw(&self, key: &str) -> Result<&str> {
        self.0
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::ModelFormat(format!("missing key {key:?}")))
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.raw(key)?;
        raw.parse()
            .map_err(|e| Error::ModelFormat(format!("{key} = {raw:?}: {e}")))
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>>
    where
        T::Err: std::fmt::Display,
    {
        parse_list(self.raw(key)?, key)
    }
}

fn parse_list<T: FromStr>(raw: &str, key: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    if raw.trim().is_empty() {
        return Ok(Vec::new());
    }
    raw.split(',')
        .map(|item| {
            item.trim()
                .parse()
                .map_err(|e| Error::ModelFormat(format!("{key}: {item:?}: {e}")))
        })
        .collect()
}

pub fn from_text(text: &str) -> Result<FittedModel> {
    let mut map = HashMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::ModelFormat(format!("line {}: expected key = value", n + 1)))?;
        let key = key.trim().to_string();
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::ModelFormat(format!("line {}: duplicate key {key:?}", n + 1)));
        }
    }
    let f = Fields(map);

    let version: u32 = f.parse("format")?;
    if version != FORMAT_VERSION {
        return Err(Error::ModelFormat(format!("unsupported format version {version}")));
    }
    let mode = match f.raw("capacity_mode")? {
        "cubic_rule" => CapacityMode::CubicRule,
        "constant" => CapacityMode::Constant(f.parse("capacity_constant")?),
        "user_table" => {
            let knots = f
                .raw("capacity_table")?
                .split(',')
                .map(|pair| {
                    let (t, c) = pair
                        .trim()
                        .split_once(':')
                        .ok_or_else(|| Error::ModelFormat(format!("capacity_table: {pair:?}")))?;
                    let num = |s: &str| {
                        s.trim()
                            .parse::<f64>()
                            .map_err(|e| Error::ModelFormat(format!("capacity_table: {s:?}: {e}")))
                    };
                    Ok((num(t)?, num(c)?))
                })
                .collect::<Result<Vec<_>>>()?;
            CapacityMode::UserTable(knots)
        }
        other => return Err(Error::ModelFormat(format!("unknown capacity_mode {other:?}"))),
    };
    let capacity = CapacitySchedule::new(mode, f.parse("capacity_floor")?)?;
    let grid = ChangepointGrid::new(f.list("changepoints")?)?;
    let params = TrendParams {
        k: f.parse("k")?,
        m: f.parse("m")?,
        delta: f.list("delta")?,
        gamma: f.list("gamma")?,
        sigma: f.parse("sigma")?,
    };
    if params.delta.len() != grid.len() || params.gamma.len() != grid.len() {
        return Err(Error::ModelFormat(format!(
            "{} changepoints but {} delta and {} gamma values",
            grid.len(),
            params.delta.len(),
            params.gamma.len()
        )));
    }
    if !(params.sigma > 0.0) {
        return Err(Error::ModelFormat(format!("sigma must be positive, got {}", params.sigma)));
    }

    let mut starts = Vec::new();
    while let Ok(raw) = f.raw(&format!("start.{}", starts.len())) {
        let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
        let idx = starts.len();
        let bad = || Error::ModelFormat(format!("start.{idx}: {raw:?}"));
        if parts.len() != 5 {
            return Err(bad());
        }
        starts.push(StartSummary {
            k: parts[0].parse().map_err(|_| bad())?,
            m: parts[1].parse().map_err(|_| bad())?,
            objective: parts[2].parse().map_err(|_| bad())?,
            iterations: parts[3].parse().map_err(|_| bad())?,
            converged: parts[4].parse().map_err(|_| bad())?,
        });
    }

    let train_length: usize = f.parse("train_length")?;
    if train_length == 0 {
        return Err(Error::ModelFormat("train_length must be positive".into()));
    }
    Ok(FittedModel {
        country: f.raw("country")?.to_string(),
        measure: f.parse::<Measure>("measure")?,
        params,
        grid,
        capacity,
        train_start: f.parse::<NaiveDate>("train_start")?,
        train_length,
        objective_value: f.parse("objective_value")?,
        converged: f.parse("converged")?,
        iterations: f.parse("iterations")?,
        starts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trend::fit::{fit_values, FitConfig};

    fn model(capacity: CapacityMode) -> FittedModel {
        let values: Vec<u64> = (0..40u64).map(|i| 7 * i * i + i).collect();
        let cfg = FitConfig {
            capacity,
            capacity_floor: Some(20_000.0),
            ..FitConfig::default()
        };
        fit_values("Some Country", Measure::Deaths, NaiveDate::from_ymd_opt(2020, 2, 26).unwrap(), &values, &cfg).unwrap()
    }

    #[test]
    fn round_trips_bit_exactly() {
        for mode in [
            CapacityMode::CubicRule,
            CapacityMode::Constant(30_000.0),
            CapacityMode::UserTable(vec![(0.0, 20_000.0), (60.0, 50_000.5)]),
        ] {
            let m = model(mode);
            let text = to_text(&m);
            let back = from_text(&text).unwrap();
            assert_eq!(back, m);
            assert_eq!(to_text(&back), text);
        }
    }

    #[test]
    fn reports_format_errors() {
        let text = to_text(&model(CapacityMode::CubicRule));
        let missing: String = text.lines().filter(|l| !l.starts_with("k =")).map(|l| format!("{l}\n")).collect();
        assert_eq!(from_text(&missing), Err(Error::ModelFormat("missing key \"k\"".into())));
        assert!(from_text(&text.replace("format = 1", "format = 9")).is_err());
        assert!(from_text(&format!("{text}k = 1.0\n")).is_err());
        assert!(from_text("nonsense").is_err());
    }
}
