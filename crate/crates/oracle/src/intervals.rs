//! Coordinate-descent optimization of interval partitions for the best
//! step-function approximation of the linear ramp on [0, 1].
//!
//! With interior endpoints fixed, the optimal coefficient of each indicator
//! is `c_k = sqrt(3) (a_{k+1}^2 - a_k^2) / (2 (a_{k+1} - a_k))`, and the
//! captured weight is `sum c_k^2 (a_{k+1} - a_k)`. Optimizing one endpoint
//! with its neighbours held fixed places it at their midpoint, so cyclic
//! sweeps converge to the equal-width partition and the value
//! `1 - 1/(4 d_bar^2)`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntervalOpt {
    /// `d_bar + 1` endpoints from 0 to 1.
    pub endpoints: Vec<f64>,
    /// Captured weight of the ramp, at most 1.
    pub value: f64,
    pub converged: bool,
    pub sweeps: usize,
}

/// Projection weight captured by the step function on the given partition.
pub fn partition_value(endpoints: &[f64]) -> f64 {
    let mut total = 0.0;
    for w in endpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let c = 3f64.sqrt() * (b * b - a * a) / (2.0 * (b - a));
        total += c * c * (b - a);
    }
    total
}

/// Maximizes the captured weight over partitions of [0, 1] into `d_bar`
/// intervals by cyclic midpoint updates from a deliberately skewed start.
/// Exceeding the sweep cap reports the best partition so far with
/// `converged = false`.
pub fn interval_partition_opt(d_bar: usize, max_sweeps: usize) -> IntervalOpt {
    assert!(d_bar >= 1, "needs at least one interval");
    let mut a: Vec<f64> = (0..=d_bar)
        .map(|k| {
            let t = k as f64 / d_bar as f64;
            t * t // skewed start, far from the optimum
        })
        .collect();
    let mut sweeps = 0usize;
    let mut converged = d_bar <= 1;
    while !converged && sweeps < max_sweeps {
        let mut max_move: f64 = 0.0;
        for k in 1..d_bar {
            let target = 0.5 * (a[k - 1] + a[k + 1]);
            max_move = max_move.max((a[k] - target).abs());
            a[k] = target;
        }
        sweeps += 1;
        if max_move < 1e-13 {
            converged = true;
        }
    }
    IntervalOpt {
        value: partition_value(&a),
        endpoints: a,
        converged,
        sweeps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_interval_captures_three_quarters() {
        let out = interval_partition_opt(1, 10);
        assert!(out.converged);
        assert_eq!(out.endpoints, vec![0.0, 1.0]);
        assert!((out.value - 0.75).abs() < 1e-15);
    }

    #[test]
    fn two_intervals_converge_to_equal_widths() {
        let out = interval_partition_opt(2, 10_000);
        assert!(out.converged);
        assert!((out.endpoints[1] - 0.5).abs() < 1e-5);
        assert!((out.value - 0.9375).abs() < 1e-6);
    }

    #[test]
    fn five_intervals_match_closed_form() {
        let out = interval_partition_opt(5, 100_000);
        assert!(out.converged);
        for (k, w) in out.endpoints.windows(2).enumerate() {
            assert!(
                (w[1] - w[0] - 0.2).abs() < 1e-5,
                "interval {k} has width {}",
                w[1] - w[0]
            );
        }
        assert!((out.value - 0.99).abs() < 1e-6);
    }

    #[test]
    fn sweep_cap_reports_nonconvergence() {
        let out = interval_partition_opt(8, 1);
        assert!(!out.converged);
        assert!(out.value <= 1.0);
    }
}
