//! Empirical distribution functions of bootstrap roots and their
//! right-continuous inverse.

use crate::error::{Error, Result};

/// `ceil(level * count)`, clamped to `[1, count]`.
///
/// Products that are integers in exact arithmetic (`0.9 * 10`) can land a few
/// ulps above the integer in floating point; anything within `1e-9` relative
/// of an integer is snapped to it before taking the ceiling.
pub fn order_index(level: f64, count: usize) -> usize {
    let x = level * count as f64;
    let r = x.round();
    let k = if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r
    } else {
        x.ceil()
    };
    (k.max(1.0) as usize).min(count)
}

/// Step-function CDF `F(x) = B^-1 #{R_b <= x}` over sorted values.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    /// Sorts `values`; infinities go to the extremes. Values must not be NaN.
    pub fn new(mut values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| !v.is_nan()));
        values.sort_unstable_by(f64::total_cmp);
        EmpiricalCdf { sorted: values }
    }

    pub fn from_slice(values: &[f64]) -> Self {
        Self::new(values.to_vec())
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.count_at_most(x) as f64 / self.sorted.len() as f64
    }

    /// `#{R_b <= x}`
    pub fn count_at_most(&self, x: f64) -> usize {
        self.sorted.partition_point(|&v| v <= x)
    }

    /// `#{R_b < x}`
    pub fn count_below(&self, x: f64) -> usize {
        self.sorted.partition_point(|&v| v < x)
    }

    /// The `ceil(level * B)`-th order statistic.
    pub fn quantile(&self, level: f64) -> Result<f64> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::InvalidLevel(level));
        }
        Ok(self.order_statistic(order_index(level, self.sorted.len())))
    }

    /// The `k`-th smallest value, `k` in `1..=B`.
    pub fn order_statistic(&self, k: usize) -> f64 {
        self.sorted[k - 1]
    }
}

/// Free-function form of [`EmpiricalCdf::quantile`].
pub fn quantile(cdf: &EmpiricalCdf, level: f64) -> Result<f64> {
    cdf.quantile(level)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_examples() {
        let cdf = EmpiricalCdf::new(vec![5.0, 3.0, 1.0, 4.0, 2.0]);
        assert_eq!(cdf.quantile(0.5).unwrap(), 3.0);
        let cdf = EmpiricalCdf::new((1..=10).map(f64::from).collect());
        assert_eq!(cdf.quantile(0.9).unwrap(), 9.0);
        assert_eq!(cdf.quantile(0.91).unwrap(), 10.0);
        assert_eq!(cdf.quantile(0.01).unwrap(), 1.0);
    }

    #[test]
    fn invalid_levels() {
        let cdf = EmpiricalCdf::new(vec![1.0, 2.0]);
        for a in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(cdf.quantile(a), Err(Error::InvalidLevel(_))));
        }
    }

    #[test]
    fn order_index_snaps_near_integers() {
        assert_eq!(order_index(0.9, 10), 9);
        assert_eq!(order_index(0.7, 10), 7);
        assert_eq!(order_index(0.9, 500), 450);
        assert_eq!(order_index(0.95, 20), 19);
        assert_eq!(order_index(0.901, 10), 10);
        assert_eq!(order_index(1e-12, 10), 1);
        for k in 1..=700 {
            assert_eq!(order_index(k as f64 / 700.0, 700), k);
        }
    }

    #[test]
    fn counts_and_infinities() {
        let cdf = EmpiricalCdf::new(vec![f64::INFINITY, 1.0, 1.0, f64::NEG_INFINITY, 2.0]);
        assert_eq!(cdf.sorted()[0], f64::NEG_INFINITY);
        assert_eq!(cdf.sorted()[4], f64::INFINITY);
        assert_eq!(cdf.count_below(1.0), 1);
        assert_eq!(cdf.count_at_most(1.0), 3);
        assert_eq!(cdf.eval(2.0), 0.8);
    }
}
