use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the carrying capacity before the floor is applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacityMode {
    /// `C(t) = t^3`.
    CubicRule,
    Constant(f64),
    /// `(t, C)` knots, linearly interpolated and held flat past both ends.
    UserTable(Vec<(f64, f64)>),
}

impl Default for CapacityMode {
    fn default() -> Self {
        CapacityMode::CubicRule
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacitySchedule {
    mode: CapacityMode,
    floor: f64,
}

impl CapacitySchedule {
    pub fn new(mode: CapacityMode, floor: f64) -> Result<Self> {
        if !(floor.is_finite() && floor > 0.0) {
            return Err(Error::InvalidCapacity(format!("floor must be positive, got {floor}")));
        }
        match &mode {
            CapacityMode::CubicRule => {}
            CapacityMode::Constant(c) => {
                if !(c.is_finite() && *c > 0.0) {
                    return Err(Error::InvalidCapacity(format!("constant must be positive, got {c}")));
                }
            }
            CapacityMode::UserTable(knots) => {
                if knots.is_empty() {
                    return Err(Error::InvalidCapacity("table is empty".into()));
                }
                if knots.iter().any(|(t, c)| !t.is_finite() || !c.is_finite() || *c <= 0.0) {
                    return Err(Error::InvalidCapacity("table values must be finite and positive".into()));
                }
                if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::InvalidCapacity("table times must be strictly increasing".into()));
                }
            }
        }
        Ok(Self { mode, floor })
    }

    pub fn cubic(floor: f64) -> Result<Self> {
        Self::new(CapacityMode::CubicRule, floor)
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::new(CapacityMode::Constant(value), value)
    }

    pub fn mode(&self) -> &CapacityMode {
        &self.mode
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn at(&self, t: f64) -> f64 {
        let raw = match &self.mode {
            CapacityMode::CubicRule => t * t * t,
            CapacityMode::Constant(c) => *c,
            CapacityMode::UserTable(knots) => interpolate(knots, t),
        };
        raw.max(self.floor)
    }
}

fn interpolate(knots: &[(f64, f64)], t: f64) -> f64 {
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if t <= first.0 {
        return first.1;
    }
    if t >= last.0 {
        return last.1;
    }
    let i = knots.partition_point(|k| k.0 <= t);
    let (t0, c0) = knots[i - 1];
    let (t1, c1) = knots[i];
    c0 + (c1 - c0) * (t - t0) / (t1 - t0)
}

/// Capacity at day index `t`.
pub fn capacity(t: f64, schedule: &CapacitySchedule) -> f64 {
    schedule.at(t)
}
