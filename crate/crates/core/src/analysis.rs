//! Cross-country feature distributions and Pearson correlations.
//!
//! Correlations use pairwise deletion: each coefficient is computed over the
//! countries where both variables are present, and the matrix records how
//! many that was. Correlation does not always indicate causation; nothing
//! here attempts to separate the two.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::series::{CountryRecord, Dataset, Measure, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Feature {
    Latitude,
    Longitude,
    AvgTemperature,
    HospitalBeds,
    Doctors,
    GdpPerCapita,
    Population,
    MedianAge,
    ShareOver65,
    Cases,
    Deaths,
    Tests,
}

impl Feature {
    pub const ALL: [Feature; 12] = [
        Feature::Latitude,
        Feature::Longitude,
        Feature::AvgTemperature,
        Feature::HospitalBeds,
        Feature::Doctors,
        Feature::GdpPerCapita,
        Feature::Population,
        Feature::MedianAge,
        Feature::ShareOver65,
        Feature::Cases,
        Feature::Deaths,
        Feature::Tests,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::Latitude => "latitude",
            Feature::Longitude => "longitude",
            Feature::AvgTemperature => "avg_temperature",
            Feature::HospitalBeds => "hospital_beds_per_1000",
            Feature::Doctors => "doctors_per_1000",
            Feature::GdpPerCapita => "gdp_per_capita",
            Feature::Population => "population",
            Feature::MedianAge => "median_age",
            Feature::ShareOver65 => "share_over_65",
            Feature::Cases => "cases",
            Feature::Deaths => "deaths",
            Feature::Tests => "tests",
        }
    }

    pub fn units(self) -> &'static str {
        match self {
            Feature::Latitude | Feature::Longitude => "degrees",
            Feature::AvgTemperature => "degrees Celsius",
            Feature::HospitalBeds | Feature::Doctors => "per 1000 people",
            Feature::GdpPerCapita => "USD",
            Feature::Population | Feature::Cases | Feature::Deaths | Feature::Tests => "count",
            Feature::MedianAge => "years",
            Feature::ShareOver65 => "percent",
        }
    }

    pub fn outcome(self) -> Option<Measure> {
        match self {
            Feature::Cases => Some(Measure::Cases),
            Feature::Deaths => Some(Measure::Deaths),
            Feature::Tests => Some(Measure::Tests),
            _ => None,
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Feature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        let found = match key.as_str() {
            "lat" => Some(Feature::Latitude),
            "lng" | "lon" => Some(Feature::Longitude),
            "temperature" => Some(Feature::AvgTemperature),
            "beds" | "hospital_beds" => Some(Feature::HospitalBeds),
            "doctors" => Some(Feature::Doctors),
            "gdp" => Some(Feature::GdpPerCapita),
            "age" => Some(Feature::MedianAge),
            "over_65" | "aged_65" => Some(Feature::ShareOver65),
            _ => Feature::ALL.into_iter().find(|f| f.name() == key),
        };
        found.ok_or_else(|| Error::UnknownFeature(s.to_string()))
    }
}

/// Per-country values aligned to dataset order; `None` marks a missing value.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub feature_name: String,
    pub units: String,
    pub values: Vec<Option<f64>>,
}

impl FeatureVector {
    pub fn present(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().flatten().copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalysisOptions {
    /// Divide outcome totals by population.
    pub per_capita: bool,
}

/// A country whose series did not cover `as_of`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fallback {
    pub country: String,
    pub measure: Measure,
    /// Date whose value was used instead.
    pub used: NaiveDate,
}

/// Cumulative total on `as_of`; later dates fall back to the series end and
/// earlier ones to zero (cases, deaths) or missing (tests).
fn total_on(series: &TimeSeries, as_of: NaiveDate) -> (Option<f64>, Option<NaiveDate>) {
    if let Some(v) = series.value_on(as_of) {
        return (Some(v as f64), None);
    }
    match series.end() {
        Some(end) if as_of > end => (series.last().map(|v| v as f64), Some(end)),
        _ if series.measure().is_cumulative() => (Some(0.0), Some(series.start())),
        _ => (None, None),
    }
}

fn country_value(record: &CountryRecord, feature: Feature, as_of: NaiveDate, opts: &AnalysisOptions) -> Option<f64> {
    let f = record.features();
    match feature {
        Feature::Latitude => Some(f.latitude),
        Feature::Longitude => Some(f.longitude),
        Feature::AvgTemperature => f.avg_temperature,
        Feature::HospitalBeds => f.hospital_beds_per_1000,
        Feature::Doctors => f.doctors_per_1000,
        Feature::GdpPerCapita => f.gdp_per_capita,
        Feature::Population => Some(f.population as f64),
        Feature::MedianAge => f.median_age,
        Feature::ShareOver65 => f.share_over_65,
        Feature::Cases | Feature::Deaths | Feature::Tests => {
            let measure = feature.outcome().expect("outcome feature");
            let total = total_on(record.series(measure), as_of).0?;
            Some(if opts.per_capita { total / f.population as f64 } else { total })
        }
    }
}

pub fn feature_vector(dataset: &Dataset, feature: Feature, as_of: NaiveDate, opts: &AnalysisOptions) -> FeatureVector {
    let units = if opts.per_capita && feature.outcome().is_some() { "per capita" } else { feature.units() };
    FeatureVector {
        feature_name: feature.name().to_string(),
        units: units.to_string(),
        values: dataset.records().iter().map(|r| country_value(r, feature, as_of, opts)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeTotals {
    pub cases: FeatureVector,
    pub deaths: FeatureVector,
    pub tests: FeatureVector,
    pub fallbacks: Vec<Fallback>,
}

/// Per-country totals of cases, deaths and tests on `as_of`.
pub fn outcome_features(dataset: &Dataset, as_of: NaiveDate) -> Result<OutcomeTotals> {
    if dataset.is_empty() {
        return Err(Error::EmptyInput);
    }
    let opts = AnalysisOptions::default();
    let mut fallbacks = Vec::new();
    for record in dataset.records() {
        for measure in Measure::ALL {
            if let (_, Some(used)) = total_on(record.series(measure), as_of) {
                fallbacks.push(Fallback { country: record.name().to_string(), measure, used });
            }
        }
    }
    Ok(OutcomeTotals {
        cases: feature_vector(dataset, Feature::Cases, as_of, &opts),
        deaths: feature_vector(dataset, Feature::Deaths, as_of, &opts),
        tests: feature_vector(dataset, Feature::Tests, as_of, &opts),
        fallbacks,
    })
}

/// Pearson coefficient of two complete samples, by the two-pass formula.
pub fn pearson_values(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::NotEnoughPoints { required: 2, found: n });
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::UndefinedCorrelation("x".into()));
    }
    if syy == 0.0 {
        return Err(Error::UndefinedCorrelation("y".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Coefficient over the countries where both values are present, and their count.
pub fn pearson(x: &FeatureVector, y: &FeatureVector) -> Result<(f64, usize)> {
    if x.values.len() != y.values.len() {
        return Err(Error::LengthMismatch { left: x.values.len(), right: y.values.len() });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = x
        .values
        .iter()
        .zip(&y.values)
        .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
        .unzip();
    let n = xs.len();
    let r = pearson_values(&xs, &ys).map_err(|e| match e {
        Error::UndefinedCorrelation(side) => {
            Error::UndefinedCorrelation(if side == "x" { x.feature_name.clone() } else { y.feature_name.clone() })
        }
        other => other,
    })?;
    Ok((r, n))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    feature_names: Vec<String>,
    entries: Vec<Vec<Option<f64>>>,
    pair_counts: Vec<Vec<usize>>,
}

impl CorrelationMatrix {
    /// Checks shape, symmetry, unit diagonal and range.
    pub fn new(feature_names: Vec<String>, entries: Vec<Vec<Option<f64>>>, pair_counts: Vec<Vec<usize>>) -> Result<Self> {
        let n = feature_names.len();
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMatrix("entries are not square".into()));
        }
        if pair_counts.len() != n || pair_counts.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMatrix("pair counts are not square".into()));
        }
        for i in 0..n {
            if let Some(d) = entries[i][i] {
                if (d - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidMatrix(format!("diagonal entry {i} is {d}")));
                }
            }
            for j in 0..n {
                if entries[i][j] != entries[j][i] || pair_counts[i][j] != pair_counts[j][i] {
                    return Err(Error::InvalidMatrix(format!("not symmetric at ({i}, {j})")));
                }
                if let Some(v) = entries[i][j] {
                    if !(-1.0..=1.0).contains(&v) {
                        return Err(Error::InvalidMatrix(format!("entry ({i}, {j}) = {v}")));
                    }
                }
            }
        }
        Ok(Self { feature_names, entries, pair_counts })
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn len(&self) -> usize {
        self.feature_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.feature_names.is_empty()
    }

    /// `None` when either variable is constant over the paired countries.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.entries[i][j]
    }

    pub fn pair_count(&self, i: usize, j: usize) -> usize {
        self.pair_counts[i][j]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    pub fn between(&self, a: &str, b: &str) -> Option<f64> {
        self.get(self.index_of(a)?, self.index_of(b)?)
    }

    /// Two-decimal label, `NA` for undefined entries.
    pub fn label(&self, i: usize, j: usize) -> String {
        match self.entries[i][j] {
            Some(v) => format!("{v:.2}"),
            None => "NA".to_string(),
        }
    }

    /// Square table at full precision with header row and column.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        self.write_table(writer, |i, j| self.entries[i][j].map_or("NA".to_string(), |v| format!("{v:?}")))
    }

    pub fn write_counts_csv<W: Write>(&self, writer: W) -> Result<()> {
        self.write_table(writer, |i, j| self.pair_counts[i][j].to_string())
    }

    fn write_table<W: Write>(&self, writer: W, cell: impl Fn(usize, usize) -> String) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["feature".to_string()];
        header.extend(self.feature_names.iter().cloned());
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut row = vec![self.feature_names[i].clone()];
            row.extend((0..self.len()).map(|j| cell(i, j)));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn correlation_matrix(
    dataset: &Dataset,
    features: &[Feature],
    as_of: NaiveDate,
    opts: &AnalysisOptions,
) -> Result<CorrelationMatrix> {
    if features.len() < 2 {
        return Err(Error::NotEnoughPoints { required: 2, found: features.len() });
    }
    if dataset.is_empty() {
        return Err(Error::EmptyInput);
    }
    let vectors: Vec<FeatureVector> = features.iter().map(|&f| feature_vector(dataset, f, as_of, opts)).collect();
    let n = vectors.len();
    let mut entries = vec![vec![None; n]; n];
    let mut counts = vec![vec![0; n]; n];
    for i in 0..n {
        for j in i..n {
            let (r, count) = match pearson(&vectors[i], &vectors[j]) {
                Ok((r, count)) => (Some(if i == j { 1.0 } else { r }), count),
                Err(Error::UndefinedCorrelation(_)) | Err(Error::NotEnoughPoints { .. }) => {
                    let count = vectors[i].values.iter().zip(&vectors[j].values).filter(|(a, b)| a.is_some() && b.is_some()).count();
                    (None, count)
                }
                Err(e) => return Err(e),
            };
            entries[i][j] = r;
            entries[j][i] = r;
            counts[i][j] = count;
            counts[j][i] = count;
        }
    }
    CorrelationMatrix::new(features.iter().map(|f| f.name().to_string()).collect(), entries, counts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub feature_name: String,
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Columns `bin_start,bin_end,count`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["bin_start", "bin_end", "count"])?;
        for (i, count) in self.counts.iter().enumerate() {
            w.write_record([self.bin_edges[i].to_string(), self.bin_edges[i + 1].to_string(), count.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Equal-width bins over the observed range, closed on the left except the
/// last bin, which also holds the maximum. A single distinct value gets a
/// unit-wide range centred on it.
pub fn histogram(name: &str, values: &[f64], bins: usize) -> Result<Histogram> {
    if bins == 0 {
        return Err(Error::InvalidParams("at least one bin is required".into()));
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..bins).map(|i| lo + width * i as f64).collect();
    edges.push(hi);
    let mut counts = vec![0; bins];
    for &v in values {
        let mut idx = (((v - lo) / width).floor() as usize).min(bins - 1);
        while idx > 0 && v < edges[idx] {
            idx -= 1;
        }
        while idx + 1 < bins && v >= edges[idx + 1] {
            idx += 1;
        }
        counts[idx] += 1;
    }
    Ok(Histogram { feature_name: name.to_string(), bin_edges: edges, counts })
}

pub fn feature_distribution(
    dataset: &Dataset,
    feature: Feature,
    bins: usize,
    as_of: NaiveDate,
    opts: &AnalysisOptions,
) -> Result<Histogram> {
    let v = feature_vector(dataset, feature, as_of, opts);
    let present: Vec<f64> = v.present().collect();
    histogram(feature.name(), &present, bins)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Mean product of standard scores; an independent route to the coefficient.
    fn direct(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let zs = |v: &[f64]| {
            let mean = v.iter().sum::<f64>() / n;
            let sd = (v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n).sqrt();
            v.iter().map(|a| (a - mean) / sd).collect::<Vec<f64>>()
        };
        zs(x).iter().zip(zs(y)).map(|(a, b)| a * b).sum::<f64>() / n
    }

    fn fv(name: &str, values: Vec<Option<f64>>) -> FeatureVector {
        FeatureVector { feature_name: name.into(), units: String::new(), values }
    }

    #[test]
    fn self_and_negated_correlation() {
        let x = [1.0, 4.0, 2.0, 8.0];
        assert!((pearson_values(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson_values(&x, &neg).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_variable_is_undefined() {
        let a = fv("a", vec![Some(1.0), Some(2.0), Some(3.0)]);
        let b = fv("b", vec![Some(5.0), Some(5.0), Some(5.0)]);
        assert_eq!(pearson(&a, &b), Err(Error::UndefinedCorrelation("b".into())));
    }

    #[test]
    fn pairwise_deletion() {
        let a = fv("a", vec![Some(1.0), None, Some(3.0), Some(4.0)]);
        let b = fv("b", vec![Some(2.0), Some(9.0), None, Some(8.0)]);
        let (r, n) = pearson(&a, &b).unwrap();
        assert_eq!(n, 2);
        assert!((r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn histogram_examples() {
        let h = histogram("t", &[-14.0, 0.0, 29.0, 10.0], 4).unwrap();
        assert_eq!(h.bin_edges.first(), Some(&-14.0));
        assert_eq!(h.bin_edges.last(), Some(&29.0));
        assert_eq!(h.counts, [1, 1, 1, 1]);
        let single = histogram("x", &[3.0], 1).unwrap();
        assert_eq!(single.counts, [1]);
        assert!(single.bin_edges[0] < single.bin_edges[1]);
        assert!(histogram("x", &[1.0], 0).is_err());
    }

    #[test]
    fn matrix_rejects_asymmetry() {
        let names = vec!["a".to_string(), "b".to_string()];
        let bad = vec![vec![Some(1.0), Some(0.5)], vec![Some(0.4), Some(1.0)]];
        assert!(CorrelationMatrix::new(names.clone(), bad, vec![vec![2; 2]; 2]).is_err());
        let ok = vec![vec![Some(1.0), Some(-1.0)], vec![Some(-1.0), Some(1.0)]];
        let m = CorrelationMatrix::new(names, ok, vec![vec![2; 2]; 2]).unwrap();
        assert_eq!(m.label(0, 1), "-1.00");
        assert_eq!(m.between("b", "a"), Some(-1.0));
    }

    #[test]
    fn feature_names_parse() {
        assert_eq!("GDP".parse::<Feature>().unwrap(), Feature::GdpPerCapita);
        assert_eq!("hospital_beds_per_1000".parse::<Feature>().unwrap(), Feature::HospitalBeds);
        assert!(matches!("wealth".parse::<Feature>(), Err(Error::UnknownFeature(_))));
    }

    fn sample() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (3usize..=100).prop_flat_map(|n| {
            (prop::collection::vec(-1e3f64..1e3, n), prop::collection::vec(-1e3f64..1e3, n))
        })
    }

    proptest! {
        #[test]
        fn matches_direct_formula((x, y) in sample()) {
            let r = pearson_values(&x, &y).unwrap();
            prop_assert!((r - direct(&x, &y)).abs() < 1e-12);
        }

        #[test]
        fn symmetric_exactly((x, y) in sample()) {
            prop_assert_eq!(pearson_values(&x, &y).unwrap(), pearson_values(&y, &x).unwrap());
        }

        #[test]
        fn affine_invariance((x, y) in sample(), a in 0.1f64..10.0, b in -100.0f64..100.0, flip in any::<bool>()) {
            let a = if flip { -a } else { a };
            let ax: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            let r = pearson_values(&x, &y).unwrap();
            let r2 = pearson_values(&ax, &y).unwrap();
            let expected = if a > 0.0 { r } else { -r };
            prop_assert!((r2 - expected).abs() < 1e-12, "{} vs {}", r2, expected);
        }

        #[test]
        fn histogram_conserves_counts(v in prop::collection::vec(-1e3f64..1e3, 1..200), bins in 1usize..30) {
            let h = histogram("x", &v, bins).unwrap();
            prop_assert_eq!(h.total(), v.len());
            prop_assert!(h.bin_edges.windows(2).all(|w| w[0] < w[1]));
            let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
            if min < max {
                let last = v.iter().filter(|&&x| x >= h.bin_edges[bins - 1]).count();
                prop_assert_eq!(h.counts[bins - 1], last);
            }
        }
    }
}
