//! Penalized fitting objective in scaled units.
//!
//! Times are divided by the last training index and counts by the training
//! maximum. The parameter vector is `[k, m, delta_1, .., delta_S]`.
//!
//! The loss is the sum of squared scaled residuals plus an L1 penalty on
//! the rate adjustments, smoothed as `sqrt(delta^2 + 1e-10) / tau` (a
//! Laplace prior of scale `tau`). `k` and `m` are unpenalized. The offsets `gamma` never appear: the exponent is evaluated
//! in its continuity-equivalent closed form, which is what `gamma` encodes.

use super::logistic::sigmoid;

pub const L1_SMOOTHING: f64 = 1e-10;
/// Returned for non-finite evaluations so a line search retreats.
pub const GUARD_LOSS: f64 = 1e300;

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    pub cap: Vec<f64>,
    pub changepoints: Vec<f64>,
    pub tau: f64,
}

impl Problem {
    pub fn dim(&self) -> usize {
        2 + self.changepoints.len()
    }

    pub fn exponent(&self, x: &[f64], t: f64) -> f64 {
        super::logistic::exponent(t, x[0], x[1], &x[2..], &self.changepoints)
    }

    pub fn ssr(&self, x: &[f64]) -> f64 {
        self.t
            .iter()
            .zip(&self.y)
            .zip(&self.cap)
            .map(|((&t, &y), &c)| {
                let r = c * sigmoid(self.exponent(x, t)) - y;
                r * r
            })
            .sum()
    }

    pub fn penalty(&self, x: &[f64]) -> f64 {
        x[2..].iter().map(|d| (d * d + L1_SMOOTHING).sqrt()).sum::<f64>() / self.tau
    }

    pub fn loss(&self, x: &[f64]) -> f64 {
        self.value_and_gradient(x).0
    }

    pub fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let dim = self.dim();
        let (k, m) = (x[0], x[1]);
        let mut ssr = 0.0;
        let mut grad = vec![0.0; dim];
        for ((&t, &y), &c) in self.t.iter().zip(&self.y).zip(&self.cap) {
            let sig = sigmoid(self.exponent(x, t));
            let r = c * sig - y;
            ssr += r * r;
            // d(residual^2)/dz
            let w = 2.0 * r * c * sig * (1.0 - sig);
            grad[0] += w * (t - m);
            grad[1] -= w * k;
            for (g, &s) in grad[2..].iter_mut().zip(&self.changepoints) {
                if t >= s {
                    *g += w * (t - s);
                }
            }
        }
        let loss = ssr + self.penalty(x);
        if !loss.is_finite() {
            return (GUARD_LOSS, vec![0.0; dim]);
        }
        for (g, &d) in grad[2..].iter_mut().zip(&x[2..]) {
            *g += d / ((d * d + L1_SMOOTHING).sqrt() * self.tau);
        }
        if grad.iter().any(|g| !g.is_finite()) {
            return (GUARD_LOSS, vec![0.0; dim]);
        }
        (loss, grad)
    }
}

/// Free-function form of [`Problem::value_and_gradient`].
pub fn objective_and_gradient(params: &[f64], problem: &Problem) -> (f64, Vec<f64>) {
    problem.value_and_gradient(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn synthetic(noise: bool) -> (Problem, Vec<f64>) {
        let n = 50;
        let t: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let cps = vec![0.2, 0.4, 0.6];
        let truth = vec![8.0, 0.5, 1.0, -2.0, 0.5];
        let cap = vec![1.2; n];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y = t
            .iter()
            .map(|&t| {
                let z = super::super::logistic::exponent(t, truth[0], truth[1], &truth[2..], &cps);
                1.2 * sigmoid(z) + if noise { rng.random_range(-0.01..0.01) } else { 0.0 }
            })
            .collect();
        (
            Problem {
                t,
                y,
                cap,
                changepoints: cps,
                tau: 0.05,
            },
            truth,
        )
    }

    #[test]
    fn penalty_vanishes_at_zero() {
        let (p, _) = synthetic(false);
        let at_zero = p.penalty(&[1.0, 0.5, 0.0, 0.0, 0.0]);
        assert!((at_zero - 3.0 * L1_SMOOTHING.sqrt() / 0.05).abs() < 1e-15);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let (p, _) = synthetic(true);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let x: Vec<f64> = vec![
                rng.random_range(2.0..12.0),
                rng.random_range(0.2..0.8),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ];
            let (_, g) = p.value_and_gradient(&x);
            for i in 0..x.len() {
                let h = 1e-6 * x[i].abs().max(1e-3);
                let mut up = x.clone();
                let mut down = x.clone();
                up[i] += h;
                down[i] -= h;
                let fd = (p.loss(&up) - p.loss(&down)) / (2.0 * h);
                let err = (fd - g[i]).abs() / g[i].abs().max(1e-3);
                assert!(err < 1e-5, "component {i}: analytic {} vs fd {fd}", g[i]);
            }
        }
    }

    #[test]
    fn truth_is_a_local_minimum_on_clean_data_without_penalty() {
        let (mut p, truth) = synthetic(false);
        p.tau = 1e12;
        let base = p.loss(&truth);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let x: Vec<f64> = truth.iter().map(|v| v + rng.random_range(-0.05..0.05)).collect();
            assert!(p.loss(&x) > base);
        }
    }

    #[test]
    fn non_finite_inputs_are_guarded() {
        let (p, _) = synthetic(false);
        let (f, g) = p.value_and_gradient(&[f64::NAN, 0.5, 0.0, 0.0, 0.0]);
        assert_eq!(f, GUARD_LOSS);
        assert!(g.iter().all(|&v| v == 0.0));
    }
}
