//! Piecewise logistic trend with changepoints.
//!
//! ```text
//! g(t) = C(t) / (1 + exp(-(k + a(t)'delta) (t - (m + a(t)'gamma))))
//! ```
//!
//! `a(t)` switches on every changepoint at or before `t`, and `gamma` keeps
//! `g` continuous where the rate changes. Time is in days since the first
//! day of the training series.

pub mod capacity;
pub mod fit;
pub mod forecast;
pub mod lbfgs;
pub mod logistic;
pub mod model_io;
pub mod objective;

pub use capacity::{capacity, CapacityMode, CapacitySchedule};
pub use fit::{fit, fit_values, FitConfig, FittedModel, StartSummary, MIN_OBSERVATIONS};
pub use forecast::{forecast, forecast_with, Forecast, ForecastConfig};
pub use logistic::{gamma_adjustments, logistic_trend, ChangepointGrid, TrendParams};
pub use objective::{objective_and_gradient, Problem};
