//! Dataset ingestion.
//!
//! The canonical on-disk layout is long format: one row per country-day with
//! 15 columns (11 country columns, the date, and cumulative cases, deaths and
//! tests). A per-country layout where each series is a bracketed list
//! (`[1, 2, , 4]`, empty entries missing) plus a `start_date` column is also
//! accepted and exploded into long format before parsing.
//!
//! Missing cells are repaired by forward propagation. Leading gaps in cases
//! and deaths become zero under [`LeadingGap::Zero`]; leading gaps in tests are
//! never filled, so a test series starts on its first report. Decreasing
//! cumulative values are clamped to the running maximum. Every change is
//! counted in the [`ImputationReport`].

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{
    check_range, Continent, CountryFeatures, CountryRecord, Dataset, Measure, TimeSeries,
};

/// Canonical long-format header, in output order.
pub const LONG_HEADER: [&str; 15] = [
    "country",
    "continent",
    "latitude",
    "longitude",
    "avg_temperature",
    "hospital_beds_per_1000",
    "doctors_per_1000",
    "gdp_per_capita",
    "population",
    "median_age",
    "share_over_65",
    "date",
    "cases",
    "deaths",
    "tests",
];

const ALIASES: [(&str, &[&str]); 16] = [
    ("country", &["country", "country_name", "location"]),
    ("continent", &["continent"]),
    ("latitude", &["latitude", "lat"]),
    ("longitude", &["longitude", "lng", "lon", "long"]),
    (
        "avg_temperature",
        &["avg_temperature", "average_temperature", "average_temperature_per_year", "temperature"],
    ),
    (
        "hospital_beds_per_1000",
        &["hospital_beds_per_1000", "hospital_beds_per_1000_people", "hospital_beds_per_thousand"],
    ),
    (
        "doctors_per_1000",
        &["doctors_per_1000", "medical_doctors_per_1000", "medical_doctors_per_1000_people"],
    ),
    ("gdp_per_capita", &["gdp_per_capita", "gdp_capita"]),
    ("population", &["population"]),
    ("median_age", &["median_age"]),
    (
        "share_over_65",
        &["share_over_65", "population_aged_65_and_over", "aged_65_older"],
    ),
    ("date", &["date"]),
    ("cases", &["cases", "total_cases"]),
    ("deaths", &["deaths", "total_deaths"]),
    ("tests", &["tests", "total_tests"]),
    ("start_date", &["start_date", "first_date"]),
];

/// Dataset used when synthesizing a missing test series.
const SYNTH_TEST_COUNTRY: &str = "Algeria";
const SYNTH_SWITCH_DATE: (i32, u32, u32) = (2020, 5, 1);
const SYNTH_EARLY_RATE: u64 = 200;
const SYNTH_LATE_RATE: u64 = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeadingGap {
    /// Days before the first report count as zero.
    #[default]
    Zero,
    /// Days before the first report stay missing; the series starts later.
    Keep,
}

/// Bounding box used by strict geography checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoEnvelope {
    pub min_latitude: f64,
    pub max_latitude: f64,
    pub min_longitude: f64,
    pub max_longitude: f64,
}

impl Default for GeoEnvelope {
    /// Extremes of the 2020-05-19 snapshot: New Zealand (south, east),
    /// Iceland (north) and Canada (west).
    fn default() -> Self {
        Self {
            min_latitude: -40.900557,
            max_latitude: 64.963051,
            min_longitude: -106.346771,
            max_longitude: 174.885971,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    pub strict_geography: bool,
    pub envelope: GeoEnvelope,
    pub synthesize_algeria_tests: bool,
    /// Policy for cases and deaths before their first report.
    pub leading_gap: LeadingGap,
    /// Snapshot date; defaults to the last date in the file.
    pub snapshot_date: Option<NaiveDate>,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            strict_geography: false,
            envelope: GeoEnvelope::default(),
            synthesize_algeria_tests: true,
            leading_gap: LeadingGap::Zero,
            snapshot_date: None,
        }
    }
}

/// Rectangular text table as read from disk, in long format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// 1-based source line of each row.
    pub lines: Vec<u64>,
}

impl RawTable {
    pub fn read_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_reader(file)
    }

    /// Reads either layout; the list layout is exploded to long format.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let table = read_csv(reader)?;
        let columns = ColumnMap::new(&table.header);
        if columns.get("date").is_some() {
            Ok(table)
        } else if columns.get("start_date").is_some() {
            explode_lists(&table, &columns)
        } else {
            Err(Error::MissingColumn("date".into()))
        }
    }

    pub fn column_count(&self) -> usize {
        self.header.len()
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }
}

fn read_csv<R: Read>(reader: R) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|h| h.trim_start_matches('\u{feff}').trim().to_string())
        .collect();
    if header.iter().all(|h| h.is_empty()) {
        return Err(Error::EmptyInput);
    }
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(Error::RowWidth {
                line,
                expected: header.len(),
                found: record.len(),
            });
        }
        rows.push(record.iter().map(|c| c.trim().to_string()).collect());
        lines.push(line);
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(RawTable {
        header,
        rows,
        lines,
    })
}

fn normalize(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

struct ColumnMap {
    index: HashMap<&'static str, usize>,
}

impl ColumnMap {
    fn new(header: &[String]) -> Self {
        let mut index = HashMap::new();
        for (i, h) in header.iter().enumerate() {
            let key = normalize(h);
            if let Some((canonical, _)) = ALIASES
                .iter()
                .find(|(_, aliases)| aliases.iter().any(|a| *a == key))
            {
                index.entry(*canonical).or_insert(i);
            }
        }
        Self { index }
    }

    fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    fn require(&self, name: &str) -> Result<usize> {
        self.get(name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }
}

fn explode_lists(table: &RawTable, columns: &ColumnMap) -> Result<RawTable> {
    let start_col = columns.require("start_date")?;
    let series_cols = [
        columns.require("cases")?,
        columns.require("deaths")?,
        columns.require("tests")?,
    ];
    let feature_cols: Vec<usize> = LONG_HEADER[..11]
        .iter()
        .map(|name| columns.require(name))
        .collect::<Result<_>>()?;

    let mut out = RawTable {
        header: LONG_HEADER.iter().map(|s| s.to_string()).collect(),
        rows: Vec::new(),
        lines: Vec::new(),
    };
    for (row, &line) in table.rows.iter().zip(&table.lines) {
        let start = parse_date(&row[start_col], line, &table.header[start_col])?;
        let lists: Vec<Vec<String>> = series_cols
            .iter()
            .map(|&c| parse_list(&row[c], line, &table.header[c]))
            .collect::<Result<_>>()?;
        let days = lists.iter().map(Vec::len).max().unwrap_or(0);
        for day in 0..days {
            let mut cells: Vec<String> = feature_cols.iter().map(|&c| row[c].clone()).collect();
            cells.push((start + Days::new(day as u64)).to_string());
            for list in &lists {
                cells.push(list.get(day).cloned().unwrap_or_default());
            }
            out.rows.push(cells);
            out.lines.push(line);
        }
    }
    Ok(out)
}

fn parse_list(cell: &str, line: u64, column: &str) -> Result<Vec<String>> {
    let inner = cell
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::Cell {
            line,
            column: column.to_string(),
            value: cell.to_string(),
            reason: "expected a bracketed list".into(),
        })?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    Ok(inner.split(',').map(|s| s.trim().to_string()).collect())
}

fn cell_error(line: u64, column: &str, value: &str, reason: impl Into<String>) -> Error {
    Error::Cell {
        line,
        column: column.to_string(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

fn parse_date(raw: &str, line: u64, column: &str) -> Result<NaiveDate> {
    raw.parse::<NaiveDate>()
        .map_err(|e| cell_error(line, column, raw, e.to_string()))
}

fn is_missing(raw: &str) -> bool {
    matches!(
        raw.to_ascii_lowercase().as_str(),
        "" | "na" | "nan" | "null" | "none" | "-"
    )
}

fn parse_count(raw: &str, line: u64, column: &str) -> Result<Option<u64>> {
    if is_missing(raw) {
        return Ok(None);
    }
    if let Ok(v) = raw.parse::<u64>() {
        return Ok(Some(v));
    }
    let v: f64 = raw
        .parse()
        .map_err(|_| cell_error(line, column, raw, "not a number"))?;
    if !v.is_finite() || v < 0.0 || v.fract() != 0.0 || v > 9.0e15 {
        return Err(cell_error(line, column, raw, "not a non-negative integer count"));
    }
    Ok(Some(v as u64))
}

fn parse_real(raw: &str, line: u64, column: &str) -> Result<Option<f64>> {
    if is_missing(raw) {
        return Ok(None);
    }
    let v: f64 = raw
        .parse()
        .map_err(|_| cell_error(line, column, raw, "not a number"))?;
    if !v.is_finite() {
        return Err(cell_error(line, column, raw, "not finite"));
    }
    Ok(Some(v))
}

/// Cells changed per measure by imputation, plus bookkeeping.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ImputationReport {
    pub filled_cases: usize,
    pub filled_deaths: usize,
    pub filled_tests: usize,
    pub clamped_cases: usize,
    pub clamped_deaths: usize,
    pub clamped_tests: usize,
    pub synthesized_tests: usize,
    /// Days before the first report, per country and measure (non-zero only).
    pub leading_gaps: Vec<LeadingGapEntry>,
    /// Countries dropped because they never reported tests.
    pub excluded: Vec<String>,
    pub per_country: Vec<CountryImputation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeadingGapEntry {
    pub country: String,
    pub measure: Measure,
    pub days: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CountryImputation {
    pub country: String,
    pub filled: [usize; 3],
    pub clamped: [usize; 3],
    pub synthesized_tests: usize,
}

impl ImputationReport {
    pub fn filled_total(&self) -> usize {
        self.filled_cases + self.filled_deaths + self.filled_tests
    }

    pub fn is_clean(&self) -> bool {
        self.filled_total() == 0
            && self.clamped_cases + self.clamped_deaths + self.clamped_tests == 0
            && self.synthesized_tests == 0
    }

    fn add(&mut self, entry: CountryImputation) {
        self.filled_cases += entry.filled[0];
        self.filled_deaths += entry.filled[1];
        self.filled_tests += entry.filled[2];
        self.clamped_cases += entry.clamped[0];
        self.clamped_deaths += entry.clamped[1];
        self.clamped_tests += entry.clamped[2];
        self.synthesized_tests += entry.synthesized_tests;
        self.per_country.push(entry);
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Imputation report");
        let _ = writeln!(out, "  forward-filled cells: cases {}, deaths {}, tests {}",
            self.filled_cases, self.filled_deaths, self.filled_tests);
        let _ = writeln!(out, "  clamped decreases:    cases {}, deaths {}, tests {}",
            self.clamped_cases, self.clamped_deaths, self.clamped_tests);
        let _ = writeln!(out, "  synthesized tests:    {}", self.synthesized_tests);
        let test_gaps: usize = self
            .leading_gaps
            .iter()
            .filter(|g| g.measure == Measure::Tests)
            .map(|g| g.days)
            .sum();
        let _ = writeln!(out, "  leading test gaps:    {} days over {} countries", test_gaps,
            self.leading_gaps.iter().filter(|g| g.measure == Measure::Tests).count());
        if self.excluded.is_empty() {
            let _ = writeln!(out, "  excluded countries:   none");
        } else {
            let _ = writeln!(out, "  excluded countries:   {}", self.excluded.join(", "));
        }
        out
    }

    /// One row per country plus a `TOTAL` row.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "country",
            "filled_cases",
            "filled_deaths",
            "filled_tests",
            "clamped_cases",
            "clamped_deaths",
            "clamped_tests",
            "synthesized_tests",
            "leading_cases",
            "leading_deaths",
            "leading_tests",
        ])?;
        let leading = |country: &str, measure: Measure| {
            self.leading_gaps
                .iter()
                .find(|g| g.country == country && g.measure == measure)
                .map_or(0, |g| g.days)
        };
        let mut totals = [0usize; 3];
        for entry in &self.per_country {
            let gaps = Measure::ALL.map(|m| leading(&entry.country, m));
            for (t, g) in totals.iter_mut().zip(gaps) {
                *t += g;
            }
            let mut row = vec![entry.country.clone()];
            row.extend(entry.filled.iter().map(usize::to_string));
            row.extend(entry.clamped.iter().map(usize::to_string));
            row.push(entry.synthesized_tests.to_string());
            row.extend(gaps.iter().map(usize::to_string));
            w.write_record(&row)?;
        }
        let total_row = [
            "TOTAL".to_string(),
            self.filled_cases.to_string(),
            self.filled_deaths.to_string(),
            self.filled_tests.to_string(),
            self.clamped_cases.to_string(),
            self.clamped_deaths.to_string(),
            self.clamped_tests.to_string(),
            self.synthesized_tests.to_string(),
            totals[0].to_string(),
            totals[1].to_string(),
            totals[2].to_string(),
        ];
        w.write_record(&total_row)?;
        w.flush()?;
        Ok(())
    }
}

/// Propagates the most recent present value into later missing cells.
///
/// Leading missing cells become `Some(0)` under [`LeadingGap::Zero`] and stay
/// `None` under [`LeadingGap::Keep`]. Present values are never changed.
pub fn forward_fill(values: &[Option<u64>], leading: LeadingGap) -> Result<Vec<Option<u64>>> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut last = match leading {
        LeadingGap::Zero => {
            if values.iter().all(Option::is_none) {
                return Err(Error::AllMissing {
                    country: String::new(),
                    measure: Measure::Cases,
                });
            }
            Some(0)
        }
        LeadingGap::Keep => None,
    };
    Ok(values
        .iter()
        .map(|v| {
            if v.is_some() {
                last = *v;
            }
            last
        })
        .collect())
}

/// Checks global coordinate bounds, and the dataset envelope when `strict`.
pub fn validate_geography(record: &CountryRecord, strict: bool, envelope: &GeoEnvelope) -> Result<()> {
    let f = record.features();
    check_range(record.name(), "latitude", f.latitude, -90.0, 90.0)?;
    check_range(record.name(), "longitude", f.longitude, -180.0, 180.0)?;
    if strict {
        check_range(record.name(), "latitude", f.latitude, envelope.min_latitude, envelope.max_latitude)?;
        check_range(record.name(), "longitude", f.longitude, envelope.min_longitude, envelope.max_longitude)?;
    }
    Ok(())
}

struct CountryRows {
    name: String,
    first_line: u64,
    feature_cells: Vec<String>,
    days: Vec<(NaiveDate, [Option<u64>; 3], u64)>,
}

pub fn parse_dataset(path: impl AsRef<Path>, config: &IngestConfig) -> Result<(Dataset, ImputationReport)> {
    let table = RawTable::read_path(path)?;
    dataset_from_table(&table, config)
}

pub fn parse_dataset_reader<R: Read>(reader: R, config: &IngestConfig) -> Result<(Dataset, ImputationReport)> {
    let table = RawTable::from_reader(reader)?;
    dataset_from_table(&table, config)
}

pub fn dataset_from_table(table: &RawTable, config: &IngestConfig) -> Result<(Dataset, ImputationReport)> {
    let columns = ColumnMap::new(&table.header);
    let feature_cols: Vec<usize> = LONG_HEADER[..11]
        .iter()
        .map(|name| columns.require(name))
        .collect::<Result<_>>()?;
    let date_col = columns.require("date")?;
    let series_cols = [
        columns.require("cases")?,
        columns.require("deaths")?,
        columns.require("tests")?,
    ];

    let mut order: Vec<CountryRows> = Vec::new();
    let mut by_name: HashMap<String, usize> = HashMap::new();
    for (row, &line) in table.rows.iter().zip(&table.lines) {
        let name = &row[feature_cols[0]];
        if name.is_empty() {
            return Err(cell_error(line, &table.header[feature_cols[0]], name, "empty country name"));
        }
        let date = parse_date(&row[date_col], line, &table.header[date_col])?;
        let mut counts = [None; 3];
        for (slot, &c) in counts.iter_mut().zip(&series_cols) {
            *slot = parse_count(&row[c], line, &table.header[c])?;
        }
        let feature_cells: Vec<String> = feature_cols.iter().map(|&c| row[c].clone()).collect();
        let idx = *by_name.entry(name.clone()).or_insert_with(|| {
            order.push(CountryRows {
                name: name.clone(),
                first_line: line,
                feature_cells: feature_cells.clone(),
                days: Vec::new(),
            });
            order.len() - 1
        });
        let entry = &mut order[idx];
        if let Some(pos) = entry.feature_cells.iter().zip(&feature_cells).position(|(a, b)| a != b) {
            let column = &table.header[feature_cols[pos]];
            return Err(cell_error(
                line,
                column,
                &feature_cells[pos],
                format!("inconsistent with line {} ({:?})", entry.first_line, entry.feature_cells[pos]),
            ));
        }
        entry.days.push((date, counts, line));
    }

    let snapshot = match config.snapshot_date {
        Some(d) => d,
        None => order
            .iter()
            .flat_map(|c| c.days.iter().map(|d| d.0))
            .max()
            .ok_or(Error::EmptyInput)?,
    };

    let mut report = ImputationReport::default();
    let mut records = Vec::with_capacity(order.len());
    for rows in order {
        let header = |i: usize| table.header[feature_cols[i]].as_str();
        if let Some(record) = build_record(rows, config, &mut report, &header)? {
            validate_geography(&record, config.strict_geography, &config.envelope)?;
            records.push(record);
        }
    }
    let dataset = Dataset::new(records, snapshot)?;
    Ok((dataset, report))
}

fn build_record<'a>(
    mut rows: CountryRows,
    config: &IngestConfig,
    report: &mut ImputationReport,
    header: &dyn Fn(usize) -> &'a str,
) -> Result<Option<CountryRecord>> {
    let line = rows.first_line;
    let cells = &rows.feature_cells;
    let real = |i: usize| parse_real(&cells[i], line, header(i));
    let required = |i: usize| -> Result<f64> {
        real(i)?.ok_or_else(|| cell_error(line, header(i), &cells[i], "required value is missing"))
    };
    let continent: Continent = cells[1]
        .parse()
        .map_err(|_| cell_error(line, header(1), &cells[1], "unknown continent"))?;
    let population = parse_count(&cells[8], line, header(8))?
        .ok_or_else(|| cell_error(line, header(8), &cells[8], "required value is missing"))?;
    let features = CountryFeatures {
        continent,
        latitude: required(2)?,
        longitude: required(3)?,
        avg_temperature: real(4)?,
        hospital_beds_per_1000: real(5)?,
        doctors_per_1000: real(6)?,
        gdp_per_capita: real(7)?,
        population,
        median_age: real(9)?,
        share_over_65: real(10)?,
    };

    rows.days.sort_by_key(|d| d.0);
    for pair in rows.days.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(cell_error(pair[1].2, "date", &pair[1].0.to_string(), "duplicate date for country"));
        }
    }
    let start = rows.days[0].0;
    let end = rows.days[rows.days.len() - 1].0;
    let n = (end - start).num_days() as usize + 1;
    // absent dates inside the range are treated as missing cells
    let mut columns: [Vec<Option<u64>>; 3] = [vec![None; n], vec![None; n], vec![None; n]];
    for (date, counts, _) in &rows.days {
        let i = (*date - start).num_days() as usize;
        for (col, v) in columns.iter_mut().zip(counts) {
            col[i] = *v;
        }
    }

    let name = rows.name;
    let mut entry = CountryImputation {
        country: name.clone(),
        ..Default::default()
    };
    let mut gaps = Vec::new();

    let mut tests_raw = std::mem::take(&mut columns[2]);
    let mut synthesized = 0;
    if tests_raw.iter().all(Option::is_none) {
        if config.synthesize_algeria_tests && name.eq_ignore_ascii_case(SYNTH_TEST_COUNTRY) {
            tests_raw = synthesize_tests(start, n).into_iter().map(Some).collect();
            synthesized = n;
        } else {
            report.excluded.push(name);
            return Ok(None);
        }
    }

    let mut series = Vec::with_capacity(3);
    for (k, measure) in Measure::ALL.into_iter().enumerate() {
        let raw = if k == 2 { &tests_raw } else { &columns[k] };
        if raw.iter().all(Option::is_none) {
            return Err(Error::AllMissing {
                country: name.clone(),
                measure,
            });
        }
        let policy = if k == 2 { LeadingGap::Keep } else { config.leading_gap };
        let filled = forward_fill(raw, policy)?;
        let leading = raw.iter().take_while(|v| v.is_none()).count();
        if leading > 0 {
            gaps.push(LeadingGapEntry {
                country: name.clone(),
                measure,
                days: leading,
            });
        }
        entry.filled[k] = raw
            .iter()
            .zip(&filled)
            .filter(|(before, after)| before.is_none() && after.is_some())
            .count();
        let skip = filled.iter().take_while(|v| v.is_none()).count();
        let mut values: Vec<u64> = filled[skip..].iter().map(|v| v.unwrap_or(0)).collect();
        entry.clamped[k] = clamp_running_max(&mut values);
        series.push(TimeSeries::new(name.clone(), measure, start + Days::new(skip as u64), values)?);
    }
    entry.synthesized_tests = synthesized;
    report.leading_gaps.extend(gaps);
    report.add(entry);

    let tests = series.pop().unwrap();
    let deaths = series.pop().unwrap();
    let cases = series.pop().unwrap();
    CountryRecord::new(name, features, cases, deaths, tests).map(Some)
}

fn clamp_running_max(values: &mut [u64]) -> usize {
    let mut clamped = 0;
    let mut max = 0;
    for v in values.iter_mut() {
        if *v < max {
            *v = max;
            clamped += 1;
        } else {
            max = *v;
        }
    }
    clamped
}

/// Cumulative tests at 200 per day from `start`, 400 per day from May 1st 2020.
pub fn synthesize_tests(start: NaiveDate, days: usize) -> Vec<u64> {
    let (y, m, d) = SYNTH_SWITCH_DATE;
    let switch = NaiveDate::from_ymd_opt(y, m, d).expect("valid date");
    let mut total = 0;
    (0..days)
        .map(|i| {
            let date = start + Days::new(i as u64);
            total += if date < switch { SYNTH_EARLY_RATE } else { SYNTH_LATE_RATE };
            total
        })
        .collect()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the dataset in canonical long format.
pub fn write_long_csv<W: Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(LONG_HEADER)?;
    for record in dataset.records() {
        let f = record.features();
        let fixed = [
            record.name().to_string(),
            f.continent.to_string(),
            f.latitude.to_string(),
            f.longitude.to_string(),
            fmt_opt(f.avg_temperature),
            fmt_opt(f.hospital_beds_per_1000),
            fmt_opt(f.doctors_per_1000),
            fmt_opt(f.gdp_per_capita),
            f.population.to_string(),
            fmt_opt(f.median_age),
            fmt_opt(f.share_over_65),
        ];
        for date in record.cases().dates() {
            let mut row: Vec<String> = fixed.to_vec();
            row.push(date.to_string());
            for m in Measure::ALL {
                row.push(
                    record
                        .series(m)
                        .value_on(date)
                        .map(|v| v.to_string())
                        .unwrap_or_default(),
                );
            }
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}
