use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use epicurve::analysis::{self, AnalysisOptions, Feature};
use epicurve::ingest::{parse_dataset, parse_dataset_reader, write_long_csv, IngestConfig};
use epicurve::series::daily_from_cumulative;
use epicurve::{Dataset, Measure};

fn snapshot() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/world_snapshot_2020-05-19.csv")
}

fn load() -> Dataset {
    parse_dataset(snapshot(), &IngestConfig::default()).unwrap().0
}

fn day(s: &str) -> NaiveDate {
    s.parse().unwrap()
}

fn extreme<F: Fn(&epicurve::CountryRecord) -> Option<f64>>(ds: &Dataset, f: F, max: bool) -> (Vec<String>, f64) {
    let vals: Vec<(String, f64)> = ds.records().iter().filter_map(|r| f(r).map(|v| (r.name().to_string(), v))).collect();
    let best = vals.iter().map(|(_, v)| *v).fold(if max { f64::MIN } else { f64::MAX }, |a, v| if max { a.max(v) } else { a.min(v) });
    let names = vals.into_iter().filter(|(_, v)| *v == best).map(|(n, _)| n).collect();
    (names, best)
}

#[test]
fn algeria_totals_on_snapshot_day() {
    let ds = load();
    assert_eq!(ds.snapshot(), day("2020-05-19"));
    let dz = ds.require("Algeria").unwrap();
    assert_eq!(dz.cases().start(), day("2020-02-26"));
    assert_eq!(dz.cases().value_on(day("2020-05-19")), Some(7201));
    assert_eq!(dz.deaths().value_on(day("2020-05-19")), Some(555));
    let daily_cases = daily_from_cumulative(dz.cases()).unwrap();
    let daily_deaths = daily_from_cumulative(dz.deaths()).unwrap();
    assert_eq!(daily_cases.iter().max(), Some(&199));
    assert_eq!(daily_deaths.iter().max(), Some(&42));
}

#[test]
fn geographic_extremes() {
    let ds = load();
    let lat = |max| extreme(&ds, |r| Some(r.features().latitude), max);
    let lng = |max| extreme(&ds, |r| Some(r.features().longitude), max);
    assert_eq!(lat(true), (vec!["Iceland".to_string()], 64.963051));
    assert_eq!(lat(false), (vec!["New Zealand".to_string()], -40.900557));
    assert_eq!(lng(true), (vec!["New Zealand".to_string()], 174.885971));
    assert_eq!(lng(false).1, -106.346771);
}

#[test]
fn climate_health_and_economy_descriptives() {
    let ds = load();
    let f = |r: &epicurve::CountryRecord| r.features().clone();
    let (cold, tmin) = extreme(&ds, |r| f(r).avg_temperature, false);
    assert_eq!((cold, tmin), (vec!["Denmark".to_string()], -14.0));
    let (_, tmax) = extreme(&ds, |r| f(r).avg_temperature, true);
    assert_eq!(tmax, 29.0);

    let (_, beds_max) = extreme(&ds, |r| f(r).hospital_beds_per_1000, true);
    assert_eq!(beds_max, 13.05);
    let few_beds = ds.records().iter().filter(|r| f(r).hospital_beds_per_1000.is_some_and(|b| b < 2.0)).count();
    assert_eq!(few_beds, 27);
    let (cuba, docs_max) = extreme(&ds, |r| f(r).doctors_per_1000, true);
    assert_eq!((cuba, docs_max), (vec!["Cuba".to_string()], 7.52));
    let (smallest, pop) = extreme(&ds, |r| Some(f(r).population as f64), false);
    assert_eq!((smallest, pop), (vec!["Iceland".to_string()], 341284.0));
    let (largest, _) = extreme(&ds, |r| Some(f(r).population as f64), true);
    assert_eq!(largest, vec!["China".to_string()]);
}

#[test]
fn parsing_is_deterministic_and_round_trips() {
    let (a, ra) = parse_dataset(snapshot(), &IngestConfig::default()).unwrap();
    let (b, rb) = parse_dataset(snapshot(), &IngestConfig::default()).unwrap();
    assert_eq!(a, b);
    assert_eq!(ra, rb);

    let mut first = Vec::new();
    write_long_csv(&a, &mut first).unwrap();
    let (c, rc) = parse_dataset_reader(first.as_slice(), &IngestConfig::default()).unwrap();
    let mut second = Vec::new();
    write_long_csv(&c, &mut second).unwrap();
    assert!(first == second);
    // a canonical file needs no further imputation
    assert_eq!(rc.filled_total(), 0, "{}", rc.to_text());
    for (x, y) in a.records().iter().zip(c.records()) {
        for m in Measure::ALL {
            assert_eq!(x.series(m).values(), y.series(m).values());
        }
    }
}

#[test]
fn outcome_totals_and_matrix_shape() {
    let ds = load();
    let totals = analysis::outcome_features(&ds, ds.snapshot()).unwrap();
    assert!(totals.fallbacks.is_empty(), "{:?}", totals.fallbacks);
    let i = ds.records().iter().position(|r| r.name() == "Algeria").unwrap();
    assert_eq!(totals.cases.values[i], Some(7201.0));
    assert_eq!(totals.deaths.values[i], Some(555.0));

    let m = analysis::correlation_matrix(&ds, &Feature::ALL, ds.snapshot(), &AnalysisOptions::default()).unwrap();
    assert_eq!(m.len(), 12);
    for a in 0..12 {
        assert_eq!(m.get(a, a), Some(1.0));
        for b in 0..12 {
            assert_eq!(m.get(a, b), m.get(b, a));
        }
    }
}
