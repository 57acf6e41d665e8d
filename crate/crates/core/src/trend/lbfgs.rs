//! Limited-memory BFGS with a strong Wolfe line search.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsOptions {
    pub memory: usize,
    pub max_iterations: usize,
    /// Stop when `(f_prev - f) / max(|f_prev|, |f|)` drops below this.
    pub rel_tolerance: f64,
    /// Stop when the gradient max-norm drops below this.
    pub grad_tolerance: f64,
    /// Sufficient-decrease constant of the strong Wolfe conditions.
    pub armijo: f64,
    /// Curvature constant of the strong Wolfe conditions.
    pub curvature: f64,
    /// Objective evaluations allowed per line search.
    pub max_backtracks: usize,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            memory: 10,
            max_iterations: 10_000,
            rel_tolerance: 1e-9,
            grad_tolerance: 1e-8,
            armijo: 1e-4,
            curvature: 0.9,
            max_backtracks: 60,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Gradient,
    RelativeDecrease,
    /// No decrease along the steepest-descent direction.
    LineSearch,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub reason: StopReason,
}

impl Minimum {
    pub fn converged(&self) -> bool {
        self.reason != StopReason::MaxIterations
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn minimize<F>(mut f: F, x0: &[f64], opts: &LbfgsOptions) -> Minimum
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let mut x = x0.to_vec();
    let (mut fx, mut g) = f(&x);
    let mut evaluations = 1;
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);

    for iter in 0..opts.max_iterations {
        if max_norm(&g) < opts.grad_tolerance {
            return Minimum { x, value: fx, iterations: iter, evaluations, reason: StopReason::Gradient };
        }

        let mut dir = two_loop(&g, &history);
        let mut slope = dot(&dir, &g);
        if !(slope < 0.0) {
            history.clear();
            dir = g.iter().map(|v| -v).collect();
            slope = dot(&dir, &g);
        }
        let step = if history.is_empty() {
            (1.0 / max_norm(&g)).min(1.0)
        } else {
            1.0
        };

        let ls = wolfe_search(&mut f, &x, fx, &dir, slope, step, opts);
        evaluations += ls.evaluations;
        let accepted = ls.point;

        let Some((xn, fn_, gn)) = accepted else {
            if history.is_empty() {
                return Minimum { x, value: fx, iterations: iter, evaluations, reason: StopReason::LineSearch };
            }
            // stale curvature pairs; retry from steepest descent
            history.clear();
            continue;
        };

        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 0.0 {
            if history.len() == opts.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }

        let decrease = (fx - fn_) / fx.abs().max(fn_.abs()).max(f64::MIN_POSITIVE);
        x = xn;
        fx = fn_;
        g = gn;
        if decrease < opts.rel_tolerance {
            return Minimum { x, value: fx, iterations: iter + 1, evaluations, reason: StopReason::RelativeDecrease };
        }
    }
    Minimum { x, value: fx, iterations: opts.max_iterations, evaluations, reason: StopReason::MaxIterations }
}

struct LineSearch {
    point: Option<(Vec<f64>, f64, Vec<f64>)>,
    evaluations: usize,
}

/// Bracketing and zoom line search for the strong Wolfe conditions.
///
/// Non-finite trial values count as too large. If the evaluation budget runs
/// out, the best point seen that satisfies sufficient decrease is returned.
fn wolfe_search<F>(f: &mut F, x: &[f64], f0: f64, dir: &[f64], slope0: f64, step0: f64, opts: &LbfgsOptions) -> LineSearch
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    struct Trial {
        a: f64,
        f: f64,
        d: f64,
        x: Vec<f64>,
        g: Vec<f64>,
    }
    let budget = opts.max_backtracks.max(1);
    let mut evaluations = 0;
    let mut eval = |a: f64, evaluations: &mut usize| {
        let xt: Vec<f64> = x.iter().zip(dir).map(|(xi, di)| xi + a * di).collect();
        let (ft, gt) = f(&xt);
        *evaluations += 1;
        let (ft, d) = if ft.is_finite() { (ft, dot(&gt, dir)) } else { (f64::INFINITY, f64::NAN) };
        Trial { a, f: ft, d, x: xt, g: gt }
    };
    let sufficient = |t: &Trial| t.f <= f0 + opts.armijo * t.a * slope0;
    let curvature = |t: &Trial| t.d.abs() <= -opts.curvature * slope0;
    let mut best: Option<Trial> = None;
    let keep = |best: &mut Option<Trial>, t: Trial| {
        if best.as_ref().is_none_or(|b| t.f < b.f) {
            *best = Some(t);
        }
    };
    let done = |t: Trial, evaluations| LineSearch { point: Some((t.x, t.f, t.g)), evaluations };

    // lo/hi hold (step, value, derivative) of the bracket ends
    let mut prev = (0.0, f0, slope0);
    let mut a = step0;
    let mut bracket = None;
    while evaluations < budget {
        let t = eval(a, &mut evaluations);
        if !sufficient(&t) || (prev.0 > 0.0 && t.f >= prev.1) {
            bracket = Some((prev, (t.a, t.f, t.d)));
            if sufficient(&t) {
                keep(&mut best, t);
            }
            break;
        }
        if curvature(&t) {
            return done(t, evaluations);
        }
        let cur = (t.a, t.f, t.d);
        keep(&mut best, t);
        if cur.2 >= 0.0 {
            bracket = Some((cur, prev));
            break;
        }
        prev = cur;
        a *= 2.0;
    }

    if let Some((mut lo, mut hi)) = bracket {
        while evaluations < budget {
            let a = interpolate(lo, hi);
            if (hi.0 - lo.0).abs() <= f64::EPSILON * lo.0.abs().max(hi.0.abs()) {
                break;
            }
            let t = eval(a, &mut evaluations);
            if !sufficient(&t) || t.f >= lo.1 {
                hi = (t.a, t.f, t.d);
                continue;
            }
            if curvature(&t) {
                return done(t, evaluations);
            }
            let cur = (t.a, t.f, t.d);
            keep(&mut best, t);
            if cur.2 * (hi.0 - lo.0) >= 0.0 {
                hi = lo;
            }
            lo = cur;
        }
    }
    LineSearch { point: best.map(|t| (t.x, t.f, t.g)), evaluations }
}

/// Cubic minimizer of the bracket, kept inside its middle 80%; bisection
/// when the cubic is unusable.
fn interpolate(lo: (f64, f64, f64), hi: (f64, f64, f64)) -> f64 {
    let (a0, f0, d0) = lo;
    let (a1, f1, d1) = hi;
    let (left, right) = if a0 < a1 { (a0, a1) } else { (a1, a0) };
    let width = right - left;
    let mid = 0.5 * (a0 + a1);
    if !(f1.is_finite() && d1.is_finite()) {
        return mid;
    }
    let h = a1 - a0;
    let t1 = d0 + d1 - 3.0 * (f0 - f1) / (a0 - a1);
    let disc = t1 * t1 - d0 * d1;
    if disc < 0.0 {
        return mid;
    }
    let t2 = h.signum() * disc.sqrt();
    let a = a1 - h * (d1 + t2 - t1) / (d1 - d0 + 2.0 * t2);
    if a.is_finite() && a >= left + 0.1 * width && a <= right - 0.1 * width {
        a
    } else {
        mid
    }
}

fn two_loop(g: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let scale = dot(s, y) / dot(y, y);
        for qi in q.iter_mut() {
            *qi *= scale;
        }
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> (f64, Vec<f64>) {
        let (a, b) = (x[0], x[1]);
        let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)];
        (f, g)
    }

    #[test]
    fn solves_rosenbrock() {
        let opts = LbfgsOptions { rel_tolerance: 0.0, grad_tolerance: 1e-10, ..Default::default() };
        let min = minimize(rosenbrock, &[-1.2, 1.0], &opts);
        assert!(min.converged());
        assert!((min.x[0] - 1.0).abs() < 1e-6 && (min.x[1] - 1.0).abs() < 1e-6, "{:?}", min);
    }

    #[test]
    fn quadratic_converges_by_gradient() {
        let f = |x: &[f64]| {
            let v: f64 = x.iter().enumerate().map(|(i, xi)| (i as f64 + 1.0) * xi * xi).sum();
            let g = x.iter().enumerate().map(|(i, xi)| 2.0 * (i as f64 + 1.0) * xi).collect();
            (v, g)
        };
        let opts = LbfgsOptions { rel_tolerance: 0.0, ..Default::default() };
        let min = minimize(f, &[3.0, -2.0, 1.0, 0.5], &opts);
        assert_eq!(min.reason, StopReason::Gradient);
        assert!(min.value < 1e-15);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let opts = LbfgsOptions { max_iterations: 3, rel_tolerance: 0.0, grad_tolerance: 0.0, ..Default::default() };
        let min = minimize(rosenbrock, &[-1.2, 1.0], &opts);
        assert_eq!(min.reason, StopReason::MaxIterations);
        assert!(!min.converged());
    }

    #[test]
    fn line_search_meets_strong_wolfe_conditions() {
        let opts = LbfgsOptions::default();
        let mut f = |x: &[f64]| ((x[0] - 3.0).powi(4) + x[1] * x[1], vec![4.0 * (x[0] - 3.0).powi(3), 2.0 * x[1]]);
        let x = [0.0, 1.0];
        let (f0, g0) = f(&x);
        let dir: Vec<f64> = g0.iter().map(|v| -v).collect();
        let slope = dot(&dir, &g0);
        for step0 in [1e-4, 1e-2, 1.0, 10.0] {
            let ls = wolfe_search(&mut f, &x, f0, &dir, slope, step0, &opts);
            let (_, ft, gt) = ls.point.expect("step found");
            assert!(ft < f0);
            assert!(dot(&gt, &dir).abs() <= -opts.curvature * slope, "step0 {step0}");
        }
    }

    #[test]
    fn interpolation_stays_inside_the_bracket() {
        for (lo, hi) in [((0.0, 1.0, -1.0), (1.0, 2.0, 3.0)), ((2.0, 0.5, 1.0), (0.5, 0.7, -2.0)), ((0.0, 1.0, -1.0), (1.0, f64::INFINITY, f64::NAN))] {
            let a = interpolate(lo, hi);
            let (l, r) = if lo.0 < hi.0 { (lo.0, hi.0) } else { (hi.0, lo.0) };
            assert!(a > l && a < r, "{a} outside ({l}, {r})");
        }
    }
}
