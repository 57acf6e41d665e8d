//! Saturating-growth trend fitting for cumulative epidemic counts, with
//! backtesting and cross-country feature analysis.
//!
//! - [`series`]: daily series, country records and the dataset container.
//! - [`ingest`]: CSV parsing and forward-fill repair.
//! - [`trend`]: the piecewise logistic model, its fitter and forecasts.
//! - [`evaluation`]: splits, RMSE and backtests.
//! - [`analysis`]: distributions and Pearson correlations across countries.

pub mod analysis;
pub mod error;
pub mod evaluation;
pub mod ingest;
pub mod series;
pub mod trend;

pub use error::{Error, Result};
pub use series::{Continent, CountryFeatures, CountryRecord, Dataset, Measure, TimeSeries};
