//! Shared data model: daily series, country records and the dataset.
//!
//! Counts are exact integers. Conversion to `f64` happens only where a model
//! consumes them ([`TimeSeries::as_f64`]).

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Cases,
    Deaths,
    Tests,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::Cases, Measure::Deaths, Measure::Tests];

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Cases => "cases",
            Measure::Deaths => "deaths",
            Measure::Tests => "tests",
        }
    }

    /// Cases and deaths are validated as cumulative (non-decreasing).
    pub fn is_cumulative(self) -> bool {
        matches!(self, Measure::Cases | Measure::Deaths)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cases" | "case" | "total_cases" => Ok(Measure::Cases),
            "deaths" | "death" | "total_deaths" => Ok(Measure::Deaths),
            "tests" | "test" | "total_tests" => Ok(Measure::Tests),
            other => Err(Error::Config(format!("unknown measure {other:?}"))),
        }
    }
}

/// Consecutive daily counts for one country and one measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeSeries {
    country: String,
    measure: Measure,
    start: NaiveDate,
    values: Vec<u64>,
}

impl TimeSeries {
    pub fn new(
        country: impl Into<String>,
        measure: Measure,
        start: NaiveDate,
        values: Vec<u64>,
    ) -> Result<Self> {
        let country = country.into();
        if measure.is_cumulative() {
            check_non_decreasing(&country, measure, &values)?;
        }
        Ok(Self {
            country,
            measure,
            start,
            values,
        })
    }

    pub fn country(&self) -> &str {
        &self.country
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Date of the last observation, or `None` for an empty series.
    pub fn end(&self) -> Option<NaiveDate> {
        let last = self.values.len().checked_sub(1)?;
        Some(self.date_at(last))
    }

    pub fn date_at(&self, index: usize) -> NaiveDate {
        self.start + Days::new(index as u64)
    }

    /// Index of `date` if it falls inside the series.
    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        let offset = (date - self.start).num_days();
        if offset < 0 || offset as usize >= self.values.len() {
            None
        } else {
            Some(offset as usize)
        }
    }

    pub fn value_on(&self, date: NaiveDate) -> Option<u64> {
        self.index_of(date).map(|i| self.values[i])
    }

    pub fn last(&self) -> Option<u64> {
        self.values.last().copied()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.values.iter().map(|&v| v as f64).collect()
    }

    /// Sub-series covering `range` of indices, keeping dates aligned.
    pub fn slice(&self, range: std::ops::Range<usize>) -> TimeSeries {
        TimeSeries {
            country: self.country.clone(),
            measure: self.measure,
            start: self.date_at(range.start),
            values: self.values[range].to_vec(),
        }
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        (0..self.values.len()).map(|i| self.date_at(i))
    }
}

fn check_non_decreasing(country: &str, measure: Measure, values: &[u64]) -> Result<()> {
    for (i, pair) in values.windows(2).enumerate() {
        if pair[1] < pair[0] {
            return Err(Error::Decreasing {
                country: country.to_string(),
                measure,
                index: i + 1,
                previous: pair[0],
                current: pair[1],
            });
        }
    }
    Ok(())
}

/// Daily increments of a cumulative series. The first output equals the
/// first cumulative value.
pub fn daily_from_cumulative(series: &TimeSeries) -> Result<Vec<u64>> {
    check_non_decreasing(series.country(), series.measure(), series.values())?;
    Ok(increments(series.values()))
}

/// Differencing on a raw slice; the caller guarantees non-decreasing input.
pub(crate) fn increments(values: &[u64]) -> Vec<u64> {
    let mut prev = 0;
    values
        .iter()
        .map(|&v| {
            let d = v - prev;
            prev = v;
            d
        })
        .collect()
}

/// Prefix sums of daily increments.
pub fn cumulative_from_daily(increments: &[i64]) -> Result<Vec<u64>> {
    let mut total = 0u64;
    increments
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            if value < 0 {
                return Err(Error::NegativeIncrement { index, value });
            }
            total += value as u64;
            Ok(total)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Continent {
    Africa,
    Asia,
    Europe,
    NorthAmerica,
    SouthAmerica,
    Oceania,
}

impl Continent {
    pub const ALL: [Continent; 6] = [
        Continent::Africa,
        Continent::Asia,
        Continent::Europe,
        Continent::NorthAmerica,
        Continent::SouthAmerica,
        Continent::Oceania,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Continent::Africa => "Africa",
            Continent::Asia => "Asia",
            Continent::Europe => "Europe",
            Continent::NorthAmerica => "NorthAmerica",
            Continent::SouthAmerica => "SouthAmerica",
            Continent::Oceania => "Oceania",
        }
    }
}

impl fmt::Display for Continent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Continent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "africa" => Ok(Continent::Africa),
            "asia" => Ok(Continent::Asia),
            "europe" => Ok(Continent::Europe),
            "northamerica" => Ok(Continent::NorthAmerica),
            "southamerica" => Ok(Continent::SouthAmerica),
            "oceania" | "australia" => Ok(Continent::Oceania),
            _ => Err(Error::Config(format!("unknown continent {s:?}"))),
        }
    }
}

/// Per-country features. Optional fields are unknown for some countries and
/// are dropped pairwise by the analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct CountryFeatures {
    pub continent: Continent,
    pub latitude: f64,
    pub longitude: f64,
    pub avg_temperature: Option<f64>,
    pub hospital_beds_per_1000: Option<f64>,
    pub doctors_per_1000: Option<f64>,
    pub gdp_per_capita: Option<f64>,
    pub population: u64,
    pub median_age: Option<f64>,
    pub share_over_65: Option<f64>,
}

/// One country: features plus the three cumulative series.
///
/// The test series may start later than the case series when the first
/// days had no test report.
#[derive(Debug, Clone, PartialEq)]
pub struct CountryRecord {
    name: String,
    features: CountryFeatures,
    cases: TimeSeries,
    deaths: TimeSeries,
    tests: TimeSeries,
}

impl CountryRecord {
    pub fn new(
        name: impl Into<String>,
        features: CountryFeatures,
        cases: TimeSeries,
        deaths: TimeSeries,
        tests: TimeSeries,
    ) -> Result<Self> {
        let name = name.into();
        let invalid = |field: &'static str, reason: String| Error::InvalidRecord {
            country: name.clone(),
            field,
            reason,
        };
        check_range(&name, "latitude", features.latitude, -90.0, 90.0)?;
        check_range(&name, "longitude", features.longitude, -180.0, 180.0)?;
        if features.population < 1 {
            return Err(invalid("population", "must be at least 1".into()));
        }
        if let Some(share) = features.share_over_65 {
            if !(0.0..=100.0).contains(&share) {
                return Err(invalid("share_over_65", format!("{share} not in [0, 100]")));
            }
        }
        if let Some(age) = features.median_age {
            if !(age > 0.0 && age < 120.0) {
                return Err(invalid("median_age", format!("{age} not in (0, 120)")));
            }
        }
        for (field, value) in [
            ("avg_temperature", features.avg_temperature),
            ("hospital_beds_per_1000", features.hospital_beds_per_1000),
            ("doctors_per_1000", features.doctors_per_1000),
            ("gdp_per_capita", features.gdp_per_capita),
        ] {
            if let Some(v) = value {
                if !v.is_finite() {
                    return Err(invalid(field, format!("{v} is not finite")));
                }
            }
        }
        for (series, measure) in [
            (&cases, Measure::Cases),
            (&deaths, Measure::Deaths),
            (&tests, Measure::Tests),
        ] {
            if series.country() != name {
                return Err(invalid(
                    "series",
                    format!("{measure} series belongs to {:?}", series.country()),
                ));
            }
            if series.measure() != measure {
                return Err(invalid(
                    "series",
                    format!("expected {measure} series, got {}", series.measure()),
                ));
            }
        }
        Ok(Self {
            name,
            features,
            cases,
            deaths,
            tests,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn features(&self) -> &CountryFeatures {
        &self.features
    }

    pub fn continent(&self) -> Continent {
        self.features.continent
    }

    pub fn cases(&self) -> &TimeSeries {
        &self.cases
    }

    pub fn deaths(&self) -> &TimeSeries {
        &self.deaths
    }

    pub fn tests(&self) -> &TimeSeries {
        &self.tests
    }

    pub fn series(&self, measure: Measure) -> &TimeSeries {
        match measure {
            Measure::Cases => &self.cases,
            Measure::Deaths => &self.deaths,
            Measure::Tests => &self.tests,
        }
    }
}

pub(crate) fn check_range(
    country: &str,
    coordinate: &'static str,
    value: f64,
    min: f64,
    max: f64,
) -> Result<()> {
    if value.is_finite() && value >= min && value <= max {
        Ok(())
    } else {
        Err(Error::Geography {
            country: country.to_string(),
            coordinate,
            value,
            min,
            max,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<CountryRecord>,
    snapshot: NaiveDate,
}

impl Dataset {
    pub fn new(records: Vec<CountryRecord>, snapshot: NaiveDate) -> Result<Self> {
        let mut seen = HashSet::new();
        for record in &records {
            if !seen.insert(record.name()) {
                return Err(Error::DuplicateCountry(record.name().to_string()));
            }
        }
        Ok(Self { records, snapshot })
    }

    pub fn records(&self) -> &[CountryRecord] {
        &self.records
    }

    pub fn snapshot(&self) -> NaiveDate {
        self.snapshot
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, country: &str) -> Option<&CountryRecord> {
        self.records
            .iter()
            .find(|r| r.name().eq_ignore_ascii_case(country))
    }

    pub fn require(&self, country: &str) -> Result<&CountryRecord> {
        self.get(country)
            .ok_or_else(|| Error::UnknownCountry(country.to_string()))
    }

    /// Number of rows in the long (one row per country-day) layout.
    pub fn long_row_count(&self) -> usize {
        self.records.iter().map(|r| r.cases().len()).sum()
    }

    pub fn continent_counts(&self) -> Vec<(Continent, usize)> {
        Continent::ALL
            .iter()
            .map(|&c| (c, self.records.iter().filter(|r| r.continent() == c).count()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn cases(values: Vec<u64>) -> TimeSeries {
        TimeSeries::new("X", Measure::Cases, day("2020-03-01"), values).unwrap()
    }

    #[test]
    fn differencing_examples() {
        assert_eq!(daily_from_cumulative(&cases(vec![0, 1, 3, 6])).unwrap(), [0, 1, 2, 3]);
        assert_eq!(daily_from_cumulative(&cases(vec![5, 5, 5])).unwrap(), [5, 0, 0]);
    }

    #[test]
    fn prefix_sum_examples() {
        assert_eq!(cumulative_from_daily(&[0, 1, 2, 3]).unwrap(), [0, 1, 3, 6]);
        assert!(cumulative_from_daily(&[]).unwrap().is_empty());
        assert_eq!(
            cumulative_from_daily(&[1, -2]),
            Err(Error::NegativeIncrement { index: 1, value: -2 })
        );
    }

    #[test]
    fn decreasing_cumulative_names_index() {
        let err = TimeSeries::new("X", Measure::Deaths, day("2020-03-01"), vec![1, 4, 3]).unwrap_err();
        assert!(matches!(err, Error::Decreasing { index: 2, .. }), "{err}");
        // tests are not validated as cumulative at construction, but differencing still guards
        let tests = TimeSeries::new("X", Measure::Tests, day("2020-03-01"), vec![10, 9]).unwrap();
        assert!(matches!(
            daily_from_cumulative(&tests),
            Err(Error::Decreasing { index: 1, .. })
        ));
    }

    #[test]
    fn dates_are_consecutive() {
        let s = cases(vec![1, 2, 3]);
        assert_eq!(s.end(), Some(day("2020-03-03")));
        assert_eq!(s.index_of(day("2020-03-02")), Some(1));
        assert_eq!(s.index_of(day("2020-02-29")), None);
        assert_eq!(s.slice(1..3).start(), day("2020-03-02"));
    }

    #[test]
    fn continent_names_parse_loosely() {
        assert_eq!("South America".parse::<Continent>().unwrap(), Continent::SouthAmerica);
        assert_eq!("north_america".parse::<Continent>().unwrap(), Continent::NorthAmerica);
        assert!("Atlantis".parse::<Continent>().is_err());
    }

    fn features() -> CountryFeatures {
        CountryFeatures {
            continent: Continent::Europe,
            latitude: 10.0,
            longitude: 10.0,
            avg_temperature: Some(10.0),
            hospital_beds_per_1000: None,
            doctors_per_1000: None,
            gdp_per_capita: None,
            population: 10,
            median_age: Some(40.0),
            share_over_65: Some(15.0),
        }
    }

    fn record(name: &str, f: CountryFeatures) -> Result<CountryRecord> {
        let s = |m| TimeSeries::new(name, m, day("2020-03-01"), vec![1]).unwrap();
        CountryRecord::new(name, f, s(Measure::Cases), s(Measure::Deaths), s(Measure::Tests))
    }

    #[test]
    fn record_invariants() {
        assert!(record("A", features()).is_ok());
        let mut f = features();
        f.latitude = 95.0;
        assert!(matches!(record("A", f), Err(Error::Geography { .. })));
        let mut f = features();
        f.population = 0;
        assert!(matches!(record("A", f), Err(Error::InvalidRecord { .. })));
        let mut f = features();
        f.share_over_65 = Some(101.0);
        assert!(record("A", f).is_err());
        let mut f = features();
        f.median_age = Some(0.0);
        assert!(record("A", f).is_err());

        let s = |c: &str, m| TimeSeries::new(c, m, day("2020-03-01"), vec![1]).unwrap();
        let mixed = CountryRecord::new(
            "A",
            features(),
            s("A", Measure::Cases),
            s("B", Measure::Deaths),
            s("A", Measure::Tests),
        );
        assert!(mixed.is_err());
    }

    #[test]
    fn dataset_rejects_duplicates() {
        let a = record("A", features()).unwrap();
        let err = Dataset::new(vec![a.clone(), a], day("2020-05-19")).unwrap_err();
        assert_eq!(err, Error::DuplicateCountry("A".into()));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn differencing_inverts_prefix_sums(incs in prop::collection::vec(0i64..1_000_000, 0..200)) {
                let cumulative = cumulative_from_daily(&incs).unwrap();
                let series = TimeSeries::new("X", Measure::Cases, day("2020-01-01"), cumulative).unwrap();
                let back = daily_from_cumulative(&series).unwrap();
                prop_assert_eq!(back, incs.iter().map(|&v| v as u64).collect::<Vec<_>>());
            }
        }
    }
}
