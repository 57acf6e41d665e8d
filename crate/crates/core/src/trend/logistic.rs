use serde::{Deserialize, Serialize};

use super::capacity::CapacitySchedule;
use crate::error::{Error, Result};

/// Changepoint day indices, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChangepointGrid {
    locations: Vec<usize>,
}

impl ChangepointGrid {
    pub fn new(locations: Vec<usize>) -> Result<Self> {
        if locations.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParams("changepoints must be strictly increasing".into()));
        }
        Ok(Self { locations })
    }

    /// Up to `max` changepoints spread over the first `range` fraction of `n`
    /// training days, capped at `n / 4`. Index 0 is never a changepoint.
    pub fn uniform(n: usize, max: usize, range: f64) -> Self {
        let count = max.min(n / 4);
        let hist = ((n as f64) * range).floor() as usize;
        if count == 0 || hist < 2 {
            return Self::default();
        }
        let last = (hist - 1) as f64;
        let mut locations: Vec<usize> = (1..=count)
            .map(|i| (last * i as f64 / count as f64).round() as usize)
            .filter(|&s| s > 0)
            .collect();
        locations.dedup();
        Self { locations }
    }

    pub fn locations(&self) -> &[usize] {
        &self.locations
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    /// `a_j(t) = 1` iff `t >= s_j`.
    pub fn indicator(&self, t: f64) -> Vec<bool> {
        self.locations.iter().map(|&s| t >= s as f64).collect()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.locations.iter().map(|&s| s as f64).collect()
    }
}

/// Trend parameters in day units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendParams {
    pub k: f64,
    pub m: f64,
    pub delta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub sigma: f64,
}

impl TrendParams {
    /// Builds parameters with `gamma` derived from the other fields.
    pub fn new(k: f64, m: f64, delta: Vec<f64>, grid: &ChangepointGrid, sigma: f64) -> Result<Self> {
        if delta.len() != grid.len() {
            return Err(Error::InvalidParams(format!(
                "{} rate adjustments for {} changepoints",
                delta.len(),
                grid.len()
            )));
        }
        if !(k.is_finite() && m.is_finite() && delta.iter().all(|d| d.is_finite())) {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParams(format!("sigma must be positive, got {sigma}")));
        }
        let gamma = gamma_adjustments(k, m, &delta, &grid.as_f64())?;
        Ok(Self {
            k,
            m,
            delta,
            gamma,
            sigma,
        })
    }

    /// Growth rate after the last changepoint.
    pub fn final_rate(&self) -> f64 {
        self.k + self.delta.iter().sum::<f64>()
    }
}

/// Offset corrections that make the trend continuous at each changepoint.
pub fn gamma_adjustments(k: f64, m: f64, delta: &[f64], locations: &[f64]) -> Result<Vec<f64>> {
    if delta.len() != locations.len() {
        return Err(Error::InvalidParams(format!(
            "{} rate adjustments for {} changepoints",
            delta.len(),
            locations.len()
        )));
    }
    let mut gamma = Vec::with_capacity(delta.len());
    let mut offset = m;
    let mut rate = k;
    for (i, (&d, &s)) in delta.iter().zip(locations).enumerate() {
        let next = rate + d;
        if next == 0.0 || rate == 0.0 {
            return Err(Error::DegenerateRate { index: i });
        }
        let g = (s - offset) * (1.0 - rate / next);
        gamma.push(g);
        offset += g;
        rate = next;
    }
    Ok(gamma)
}

/// `C / (1 + exp(-z))`, saturating instead of overflowing.
pub fn saturate(cap: f64, z: f64) -> f64 {
    cap * sigmoid(z)
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Logistic exponent in the continuity-equivalent closed form
/// `k (t - m) + sum_j delta_j (t - s_j)_+`.
pub fn exponent(t: f64, k: f64, m: f64, delta: &[f64], locations: &[f64]) -> f64 {
    let mut z = k * (t - m);
    for (&d, &s) in delta.iter().zip(locations) {
        if t >= s {
            z += d * (t - s);
        }
    }
    z
}

/// Trend value at day `t` using the rate and offset active at `t`.
pub fn logistic_trend(t: f64, params: &TrendParams, grid: &ChangepointGrid, schedule: &CapacitySchedule) -> f64 {
    let mut rate = params.k;
    let mut offset = params.m;
    for ((&s, &d), &g) in grid.locations().iter().zip(&params.delta).zip(&params.gamma) {
        if t >= s as f64 {
            rate += d;
            offset += g;
        }
    }
    saturate(schedule.at(t), rate * (t - offset))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trend::capacity::CapacitySchedule;
    use proptest::prelude::*;

    fn plain(k: f64, m: f64) -> TrendParams {
        TrendParams::new(k, m, vec![], &ChangepointGrid::default(), 1.0).unwrap()
    }

    #[test]
    fn empty_and_zero_adjustments() {
        assert_eq!(gamma_adjustments(0.3, 5.0, &[], &[]).unwrap(), Vec::<f64>::new());
        assert_eq!(gamma_adjustments(0.3, 5.0, &[0.0; 3], &[2.0, 4.0, 6.0]).unwrap(), [0.0; 3]);
    }

    #[test]
    fn zero_rate_is_degenerate() {
        assert_eq!(
            gamma_adjustments(0.3, 5.0, &[0.1, -0.4], &[2.0, 4.0]),
            Err(Error::DegenerateRate { index: 1 })
        );
    }

    #[test]
    fn textbook_values() {
        let cap = CapacitySchedule::constant(1000.0).unwrap();
        let grid = ChangepointGrid::default();
        let p = plain(0.1, 50.0);
        assert_eq!(logistic_trend(50.0, &p, &grid, &cap), 500.0);
        let v = logistic_trend(60.0, &p, &grid, &cap);
        assert!((v - 731.058_578_630_004_9).abs() < 1e-9, "{v}");
        let far = logistic_trend(1e6, &p, &grid, &cap);
        assert!(far <= 1000.0 && far > 1000.0 - 1e-9);
        assert_eq!(logistic_trend(-1e6, &p, &grid, &cap), 0.0);
    }

    #[test]
    fn grid_placement() {
        let g = ChangepointGrid::uniform(100, 25, 0.8);
        assert_eq!(g.len(), 25);
        assert_eq!(g.locations()[0], 3);
        assert_eq!(*g.locations().last().unwrap(), 79);
        let short = ChangepointGrid::uniform(20, 25, 0.8);
        assert_eq!(short.locations(), [3, 6, 9, 12, 15]);
        assert!(ChangepointGrid::uniform(3, 25, 0.8).is_empty());
        assert!(ChangepointGrid::new(vec![3, 3]).is_err());
        assert_eq!(g.indicator(3.0)[..2], [true, false]);
    }

    fn params_strategy() -> impl Strategy<Value = (f64, f64, Vec<f64>)> {
        (0.02f64..0.5, 5.0f64..60.0, prop::collection::vec(-0.01f64..0.05, 4))
    }

    proptest! {
        #[test]
        fn both_forms_agree((k, m, delta) in params_strategy(), t in 0.0f64..120.0) {
            let grid = ChangepointGrid::new(vec![10, 25, 40, 70]).unwrap();
            let p = TrendParams::new(k, m, delta.clone(), &grid, 1.0).unwrap();
            let cap = CapacitySchedule::constant(5000.0).unwrap();
            let a = logistic_trend(t, &p, &grid, &cap);
            let b = saturate(5000.0, exponent(t, k, m, &delta, &grid.as_f64()));
            prop_assert!((a - b).abs() <= 1e-9 * 5000.0);
        }

        #[test]
        fn bounded_and_continuous((k, m, delta) in params_strategy()) {
            let grid = ChangepointGrid::new(vec![10, 25, 40, 70]).unwrap();
            let p = TrendParams::new(k, m, delta, &grid, 1.0).unwrap();
            let cap = CapacitySchedule::cubic(100.0).unwrap();
            for t in 1..120 {
                let v = logistic_trend(t as f64, &p, &grid, &cap);
                // saturation to exactly 0 is only possible far below the midpoint
                prop_assert!(v >= 0.0 && v < cap.at(t as f64) * (1.0 + 1e-15));
            }
            let eps = 1e-6;
            for &s in grid.locations() {
                let s = s as f64;
                let jump = (logistic_trend(s - eps, &p, &grid, &cap) - logistic_trend(s + eps, &p, &grid, &cap)).abs();
                prop_assert!(jump < 1e-6 * cap.at(s), "jump {jump} at {s}");
            }
        }

        #[test]
        fn midpoint_symmetry(k in 0.01f64..1.0, m in -50.0f64..50.0, u in 0.0f64..40.0) {
            let cap = CapacitySchedule::constant(2500.0).unwrap();
            let grid = ChangepointGrid::default();
            let p = plain(k, m);
            let sum = logistic_trend(m + u, &p, &grid, &cap) + logistic_trend(m - u, &p, &grid, &cap);
            prop_assert!((sum - 2500.0).abs() < 1e-9);
        }

        #[test]
        fn monotone_for_positive_rates(k in 0.05f64..0.4, m in 10.0f64..60.0, delta in prop::collection::vec(-0.01f64..0.05, 4)) {
            let grid = ChangepointGrid::new(vec![10, 25, 40, 70]).unwrap();
            let p = TrendParams::new(k, m, delta, &grid, 1.0).unwrap();
            let cap = CapacitySchedule::cubic(50.0).unwrap();
            let mut prev = 0.0;
            for t in 0..150 {
                let v = logistic_trend(t as f64, &p, &grid, &cap);
                prop_assert!(v >= prev);
                prev = v;
            }
        }
    }
}
